//! Seeded generators of graded maps for tests and benchmarks.
//!
//! Every generator returns the factors it multiplied together, so callers
//! can compare a decomposition against a known one.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{scalar, Monomial, Polynomial, Scalar};
use crate::automorphism::{elementary_map, linear_map, matrix_determinant, PolyMap};
use crate::error::Result;
use crate::graded3::q_hat;
use crate::grading::{Grading, NormalizedGrading};
use crate::jung::{FactorChain, Provenance};

fn nonzero_coeff<S: Scalar>(rng: &mut ChaCha8Rng, height: i64) -> S {
    let h = height.max(1);
    loop {
        let c = rng.gen_range(-h..=h);
        if c != 0 {
            return scalar(c);
        }
    }
}

/// Monomials in the variables other than `index` whose weight equals the
/// weight of `x_index`, with every exponent at most `max_exp`.
pub fn graded_addend_monomials(grading: &Grading, index: usize, max_exp: u32) -> Vec<Monomial> {
    let n = grading.arity();
    let w = grading.weights();
    let others: Vec<usize> = (0..n).filter(|&j| j != index).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    loop {
        let weight: i64 = others.iter().map(|&j| w[j] * i64::from(exps[j])).sum();
        if weight == w[index] {
            out.push(Monomial::new(&exps));
        }
        // odometer over the other variables
        let mut k = 0;
        loop {
            if k == others.len() {
                return out;
            }
            let j = others[k];
            if exps[j] < max_exp {
                exps[j] += 1;
                break;
            }
            exps[j] = 0;
            k += 1;
        }
    }
}

/// A graded elementary map changing `x_index`, or `None` when no addend
/// monomial of the right weight exists within `max_exp`.
pub fn graded_elementary<S: Scalar>(
    rng: &mut ChaCha8Rng,
    grading: &Grading,
    index: usize,
    max_exp: u32,
    height: i64,
) -> Option<PolyMap<S>> {
    let candidates = graded_addend_monomials(grading, index, max_exp);
    if candidates.is_empty() {
        return None;
    }
    let count = rng.gen_range(1..=candidates.len().min(2));
    let chosen = candidates.choose_multiple(rng, count);
    let addend = Polynomial::from_terms(
        grading.arity(),
        chosen.map(|m| (*m, nonzero_coeff::<S>(rng, height))),
    );
    Some(elementary_map(grading.arity(), index, addend))
}

/// An invertible linear map mixing only variables of equal weight among
/// `slots`; the other variables are fixed.
pub fn graded_linear<S: Scalar>(
    rng: &mut ChaCha8Rng,
    grading: &Grading,
    slots: &[usize],
    height: i64,
) -> PolyMap<S> {
    let n = grading.arity();
    let w = grading.weights();
    loop {
        let mut matrix: Vec<Vec<S>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        for &i in slots {
            for &j in slots {
                if w[i] == w[j] {
                    matrix[i][j] = scalar(rng.gen_range(-height..=height));
                }
            }
        }
        if !matrix_determinant(&matrix).is_zero() {
            return linear_map(&matrix);
        }
    }
}

/// Composition of `factor_count` random graded factors acting on `slots`.
///
/// Factors are elementary with probability 2/3 and linear otherwise.
pub fn random_graded_map<S: Scalar>(
    grading: &Grading,
    slots: &[usize],
    factor_count: usize,
    max_exp: u32,
    height: i64,
    seed: u64,
) -> (PolyMap<S>, FactorChain<S>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = FactorChain::new(grading.arity());
    let mut made = 0;
    while made < factor_count {
        let factor = if rng.gen_bool(2.0 / 3.0) {
            let index = *slots.choose(&mut rng).expect("at least one slot");
            match graded_elementary(&mut rng, grading, index, max_exp, height) {
                Some(f) => f,
                None => continue,
            }
        } else {
            graded_linear(&mut rng, grading, slots, height)
        };
        chain.push_map(factor, Provenance::Generated);
        made += 1;
    }
    (chain.compose_all(), chain)
}

/// A composition of plane factors that each lift through the restriction
/// map for the normalized grading `g`, with `a, b, c > 0` and the gcd
/// conditions in place.
pub fn liftable_plane_map<S: Scalar>(
    g: &NormalizedGrading,
    factor_count: usize,
    max_exp: u32,
    height: i64,
    seed: u64,
) -> Result<(PolyMap<S>, FactorChain<S>)> {
    let (a, b, c) = (g.a(), g.b(), g.c());
    let qh = q_hat(a, b, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (u + v^q, v) lifts when b q = a mod c and q > q_hat
    let u_exps: Vec<u32> = (0..=max_exp)
        .filter(|&q| (i64::from(q) * b - a) % c == 0 && i64::from(q) > qh)
        .collect();
    // (u, v + u^p) lifts when a p = b mod c and p >= 1
    let v_exps: Vec<u32> = (1..=max_exp)
        .filter(|&p| (i64::from(p) * a - b) % c == 0)
        .collect();
    let mut chain = FactorChain::new(2);
    let mut made = 0;
    while made < factor_count {
        let factor = match rng.gen_range(0..3) {
            0 if !u_exps.is_empty() => {
                let q = *u_exps.choose(&mut rng).expect("nonempty");
                let addend = Polynomial::monomial(2, &[0, q], nonzero_coeff::<S>(&mut rng, height));
                elementary_map(2, 0, addend)
            }
            1 if !v_exps.is_empty() => {
                let p = *v_exps.choose(&mut rng).expect("nonempty");
                let addend = Polynomial::monomial(2, &[p, 0], nonzero_coeff::<S>(&mut rng, height));
                elementary_map(2, 1, addend)
            }
            2 => {
                let d = [
                    nonzero_coeff::<S>(&mut rng, height),
                    nonzero_coeff::<S>(&mut rng, height),
                ];
                linear_map(&[vec![d[0].clone(), S::zero()], vec![S::zero(), d[1].clone()]])
            }
            _ => continue,
        };
        chain.push_map(factor, Provenance::Generated);
        made += 1;
    }
    Ok((chain.compose_all(), chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::{is_graded_map, normalize, residue_grading};
    use crate::Rational;

    #[test]
    fn addend_monomials_have_the_right_weight() {
        let g = Grading::integer(&[5, 2, -3]);
        let ms = graded_addend_monomials(&g, 0, 4);
        assert_eq!(ms, vec![Monomial::new(&[0, 4, 1])]);
        let ms = graded_addend_monomials(&g, 1, 4);
        assert_eq!(ms, vec![Monomial::new(&[1, 0, 1])]);
        let zero = Grading::integer(&[1, 1, 0]);
        assert_eq!(graded_addend_monomials(&zero, 0, 4).len(), 5);
    }

    #[test]
    fn generated_maps_are_graded() {
        for (w, slots) in [
            ([1, 1, 2], vec![0, 1, 2]),
            ([5, 2, -3], vec![0, 1, 2]),
            ([1, 1, 0], vec![0, 1]),
        ] {
            let g = Grading::integer(&w);
            for seed in 0..10 {
                let (m, chain) = random_graded_map::<Rational>(&g, &slots, 4, 4, 3, seed);
                assert!(is_graded_map(&m, &g), "{w:?} seed {seed}");
                assert!(chain.len() <= 4);
            }
        }
    }

    #[test]
    fn plane_maps_are_residue_graded() {
        let n = normalize(&Grading::integer(&[7, 2, -3])).unwrap();
        let residue = residue_grading(&n).unwrap();
        for seed in 0..10 {
            let (m, _) = liftable_plane_map::<Rational>(&n, 4, 8, 3, seed).unwrap();
            assert!(is_graded_map(&m, &residue));
        }
    }
}
