//! Algebraic invariants checked on generated inputs.

use proptest::prelude::*;

use tamegrade::automorphism::{compose, random_tame, verify_inverse_pair};
use tamegrade::corpus::{liftable_plane_map, random_graded_map};
use tamegrade::graded3::{
    decompose_graded, decompose_positive, l_hat, lift_alpha_inverse, q_hat, restrict_alpha,
    GradedOutcome,
};
use tamegrade::grading::{is_graded_map, normalize, weighted_degree, Grading};
use tamegrade::jung::decompose_plane;
use tamegrade::newton::newton_polygon;
use tamegrade::{Monomial, QMap, QPoly, Rational};

fn poly(arity: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((prop::collection::vec(0u32..4, arity), -5i64..=5), 0..6).prop_map(
        move |terms| {
            QPoly::from_terms(
                arity,
                terms
                    .into_iter()
                    .map(|(e, c)| (Monomial::new(&e), Rational::from(c))),
            )
        },
    )
}

fn small_map(arity: usize) -> impl Strategy<Value = QMap> {
    prop::collection::vec(poly(arity), arity).prop_map(|c| QMap::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly(3), q in poly(3), r in poly(3)) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn substitution_is_a_ring_map(p in poly(2), q in poly(2), m in small_map(2)) {
        let lhs = (&p * &q).substitute(m.coords()).unwrap();
        let rhs = &p.substitute(m.coords()).unwrap() * &q.substitute(m.coords()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_associative(a in small_map(2), b in small_map(2), c in small_map(2)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(compose(&a, &QMap::identity(2)).unwrap(), a.clone());
        prop_assert_eq!(compose(&QMap::identity(2), &a).unwrap(), a);
    }

    #[test]
    fn jung_recomposes_and_inverts(seed in 0u64..10_000, factors in 1usize..=5) {
        let (m, _) = random_tame::<Rational>(2, factors, 3, 3, seed);
        let chain = decompose_plane(&m).unwrap();
        prop_assert_eq!(chain.compose_all(), m.clone());
        // the direct inverse check is quadratic in the degree; keep it cheap
        if m.total_degree() <= 27 {
            let inverse = chain.inverse_map().unwrap();
            prop_assert!(verify_inverse_pair(&m, &inverse).unwrap());
        }
    }

    #[test]
    fn newton_polygon_contains_support(p in poly(2)) {
        prop_assume!(!p.is_constant());
        let polygon = newton_polygon(&p).unwrap();
        // hull vertices are exponents of p or the origin
        for v in polygon.hull() {
            let is_origin = *v == (0, 0);
            let in_support = polygon.support().contains(v);
            prop_assert!(is_origin || in_support);
        }
    }

    #[test]
    fn weighted_degree_is_additive(w in prop::collection::vec(-4i64..=4, 3), a in prop::collection::vec(0u32..5, 3), b in prop::collection::vec(0u32..5, 3)) {
        let g = Grading::integer(&w);
        let ma = QPoly::monomial(3, &a, Rational::from(1));
        let mb = QPoly::monomial(3, &b, Rational::from(1));
        let da = weighted_degree(&ma, &g).unwrap();
        let db = weighted_degree(&mb, &g).unwrap();
        prop_assert_eq!(weighted_degree(&(&ma * &mb), &g).unwrap(), da + db);
    }

    #[test]
    fn normalization_round_trips(w in prop::collection::vec(-9i64..=9, 3), seed in 0u64..1000) {
        let g = Grading::integer(&w);
        let n = normalize(&g).unwrap();
        prop_assert_eq!(normalize(&n.grading()).unwrap().weights(), n.weights());
        let (m, _) = random_tame::<Rational>(3, 2, 2, 2, seed);
        prop_assert_eq!(n.to_original(&n.to_normalized(&m)), m);
    }

    #[test]
    fn q_hat_and_l_hat_match_their_definitions(a in 1i64..60, b in 1i64..60, c in 1i64..30) {
        use num_integer::Integer;
        prop_assume!(b.gcd(&c) == 1 && a.gcd(&c) == 1);
        let q = q_hat(a, b, c).unwrap();
        prop_assert!(b * q < a && (b * q - a).rem_euclid(c) == 0);
        prop_assert!(b * (q + c) >= a);
        let l = l_hat(a, b, c).unwrap();
        prop_assert!(l >= 1 && l <= c && (a * l - b).rem_euclid(c) == 0);
        prop_assert!((1..l).all(|k| (a * k - b).rem_euclid(c) != 0));
    }

    #[test]
    fn lift_inverts_restriction(seed in 0u64..10_000, which in 0usize..3) {
        let w = [[7, 2, -3], [5, 2, -3], [11, 4, -5]][which];
        let n = normalize(&Grading::integer(&w)).unwrap();
        let (pm, _) = liftable_plane_map::<Rational>(&n, 3, 7, 3, seed).unwrap();
        let lifted = lift_alpha_inverse(&pm, &n).unwrap();
        prop_assert!(is_graded_map(&lifted, &n.grading()));
        prop_assert_eq!(restrict_alpha(&lifted).unwrap(), pm);
    }

    #[test]
    fn positive_decomposition_recomposes(seed in 0u64..10_000, factors in 1usize..5) {
        let g = Grading::integer(&[2, 3, 5]);
        let (m, _) = random_graded_map::<Rational>(&g, &[0, 1, 2], factors, 3, 3, seed);
        let chain = decompose_positive(&m, &g).unwrap();
        prop_assert_eq!(chain.compose_all(), m);
        prop_assert!(chain.iter().all(|f| is_graded_map(&f.map, &g)));
    }

    #[test]
    fn permuted_gradings_decompose(seed in 0u64..10_000, perm in 0usize..6) {
        // the weights (5, 2, -3) in every variable order
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let base = [5i64, 2, -3];
        let w: Vec<i64> = orders[perm].iter().map(|&i| base[i]).collect();
        let g = Grading::integer(&w);
        let (m, _) = random_graded_map::<Rational>(&g, &[0, 1, 2], 3, 5, 3, seed);
        match decompose_graded(&m, &g).unwrap() {
            GradedOutcome::Tame(chain) => prop_assert_eq!(chain.compose_all(), m),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}
