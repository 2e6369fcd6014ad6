//! Gradings by `Z` and by `Z/c` in which every variable is homogeneous.

use num_integer::Integer;

use crate::arith::{Monomial, Polynomial, Scalar};
use crate::automorphism::PolyMap;
use crate::error::{Error, Result};

/// Variable weights, either integers or residues modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grading {
    weights: Vec<i64>,
    modulus: Option<i64>,
}

impl Grading {
    pub fn integer(weights: &[i64]) -> Self {
        Grading {
            weights: weights.to_vec(),
            modulus: None,
        }
    }

    /// Residue grading; weights are reduced into `0..modulus`.
    pub fn residue(weights: &[i64], modulus: i64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::ZeroModulus);
        }
        Ok(Grading {
            weights: weights.iter().map(|w| w.mod_floor(&modulus)).collect(),
            modulus: Some(modulus),
        })
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn modulus(&self) -> Option<i64> {
        self.modulus
    }

    pub fn is_integer(&self) -> bool {
        self.modulus.is_none()
    }

    pub fn is_trivial(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    fn reduce(&self, d: i64) -> i64 {
        match self.modulus {
            Some(c) => d.mod_floor(&c),
            None => d,
        }
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        let d = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * i64::from(m.exponent(i)))
            .sum();
        self.reduce(d)
    }
}

/// Degree under the grading: the maximum over terms for `Z`, the common
/// residue for `Z/c`.
pub fn weighted_degree<S: Scalar>(p: &Polynomial<S>, g: &Grading) -> Result<i64> {
    check_arity(p.arity(), g)?;
    let mut degrees = p.terms().map(|(m, _)| g.monomial_degree(m));
    let first = degrees.next().ok_or(Error::ZeroPolynomial)?;
    if g.is_integer() {
        Ok(degrees.fold(first, i64::max))
    } else if degrees.all(|d| d == first) {
        Ok(first)
    } else {
        Err(Error::NotHomogeneous)
    }
}

fn check_arity(arity: usize, g: &Grading) -> Result<()> {
    if arity == g.arity() {
        Ok(())
    } else {
        Err(Error::ArityMismatch {
            left: arity,
            right: g.arity(),
        })
    }
}

pub fn is_homogeneous<S: Scalar>(p: &Polynomial<S>, g: &Grading) -> bool {
    if p.arity() != g.arity() {
        return false;
    }
    let mut degrees = p.terms().map(|(m, _)| g.monomial_degree(m));
    match degrees.next() {
        None => true,
        Some(first) => degrees.all(|d| d == first),
    }
}

/// Terms of maximal weighted degree.
pub fn top_component<S: Scalar>(p: &Polynomial<S>, g: &Grading) -> Result<Polynomial<S>> {
    if !g.is_integer() {
        return Err(Error::WrongGradingKind(
            "top component needs integer weights",
        ));
    }
    let top = weighted_degree(p, g)?;
    Ok(p.filter_terms(|m| g.monomial_degree(m) == top))
}

/// Every coordinate is homogeneous of its variable's degree (zero coordinates pass).
pub fn is_graded_map<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> bool {
    if m.arity() != g.arity() {
        return false;
    }
    m.coords().iter().enumerate().all(|(i, c)| {
        let want = g.reduce(g.weights[i]);
        c.terms().all(|(mono, _)| g.monomial_degree(mono) == want)
    })
}

/// Three weights brought to the form `(a, b, -c)` with `a >= b >= 0`,
/// `c >= 0` and no common divisor, or stored descending when no weight is
/// negative after the sign flip.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalizedGrading {
    weights: [i64; 3],
    permutation: [usize; 3],
    sign_flipped: bool,
    gcd_divisor: i64,
}

/// Shape of a normalized weight triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightPattern {
    Trivial,
    /// All three weights positive (possibly after the sign flip).
    Positive,
    /// `a, b, c > 0`.
    Mixed,
    Zero(ZeroSubcase),
}

/// The zero-weight configurations that survive normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroSubcase {
    /// `c = 0`, `a > b > 0`.
    CZeroUnequal,
    /// `c = 0`, `a = b > 0` (so `a = b = 1`).
    CZeroEqual,
    /// `b = 0`, `a, c > 0`.
    BZero,
    /// `b = c = 0`, `a > 0`.
    BAndCZero,
}

impl NormalizedGrading {
    /// Normalized weights `(w_x, w_y, w_z)`; for mixed patterns `w_z = -c`.
    pub fn weights(&self) -> [i64; 3] {
        self.weights
    }

    pub fn a(&self) -> i64 {
        self.weights[0]
    }

    pub fn b(&self) -> i64 {
        self.weights[1]
    }

    /// `c` as in `(a, b, -c)`; negative for all-positive triples.
    pub fn c(&self) -> i64 {
        -self.weights[2]
    }

    /// Normalized variable `j` is original variable `permutation()[j]`.
    pub fn permutation(&self) -> [usize; 3] {
        self.permutation
    }

    pub fn inverse_permutation(&self) -> [usize; 3] {
        let mut inv = [0; 3];
        for (j, &i) in self.permutation.iter().enumerate() {
            inv[i] = j;
        }
        inv
    }

    pub fn sign_flipped(&self) -> bool {
        self.sign_flipped
    }

    pub fn gcd_divisor(&self) -> i64 {
        self.gcd_divisor
    }

    pub fn grading(&self) -> Grading {
        Grading::integer(&self.weights)
    }

    /// Undoes the normalization.
    pub fn original_weights(&self) -> [i64; 3] {
        let sign = if self.sign_flipped { -1 } else { 1 };
        let mut out = [0; 3];
        for (j, &i) in self.permutation.iter().enumerate() {
            out[i] = sign * self.gcd_divisor * self.weights[j];
        }
        out
    }

    pub fn pattern(&self) -> WeightPattern {
        let [a, b, w] = self.weights;
        match (a, b, w) {
            (0, 0, 0) => WeightPattern::Trivial,
            (_, _, w) if w > 0 => WeightPattern::Positive,
            (_, 0, 0) => WeightPattern::Zero(ZeroSubcase::BAndCZero),
            (_, _, 0) if a == b => WeightPattern::Zero(ZeroSubcase::CZeroEqual),
            (_, _, 0) => WeightPattern::Zero(ZeroSubcase::CZeroUnequal),
            (_, 0, _) => WeightPattern::Zero(ZeroSubcase::BZero),
            _ => WeightPattern::Mixed,
        }
    }

    /// Rewrites a map in original coordinates into normalized coordinates.
    pub fn to_normalized<S: Scalar>(&self, m: &PolyMap<S>) -> PolyMap<S> {
        m.permute_variables(&self.permutation)
    }

    /// Rewrites a map in normalized coordinates back into original ones.
    pub fn to_original<S: Scalar>(&self, m: &PolyMap<S>) -> PolyMap<S> {
        m.permute_variables(&self.inverse_permutation())
    }
}

pub fn normalize(g: &Grading) -> Result<NormalizedGrading> {
    if !g.is_integer() {
        return Err(Error::WrongGradingKind(
            "normalization needs integer weights",
        ));
    }
    if g.arity() != 3 {
        return Err(Error::UnsupportedArity(g.arity()));
    }
    let w = [g.weights[0], g.weights[1], g.weights[2]];
    let divisor = w.iter().fold(0i64, |acc, x| acc.gcd(x));
    if divisor == 0 {
        return Ok(NormalizedGrading {
            weights: [0; 3],
            permutation: [0, 1, 2],
            sign_flipped: false,
            gcd_divisor: 1,
        });
    }
    let positives = w.iter().filter(|&&x| x > 0).count();
    let negatives = w.iter().filter(|&&x| x < 0).count();
    let sign_flipped = negatives > positives;
    let sign = if sign_flipped { -1 } else { 1 };
    let scaled: [i64; 3] = w.map(|x| sign * x / divisor);
    let permutation = match scaled.iter().position(|&x| x < 0) {
        Some(neg) => {
            let mut rest: Vec<usize> = (0..3).filter(|&i| i != neg).collect();
            if scaled[rest[0]] < scaled[rest[1]] {
                rest.swap(0, 1);
            }
            [rest[0], rest[1], neg]
        }
        None => {
            let mut order = [0, 1, 2];
            order.sort_by(|&i, &j| scaled[j].cmp(&scaled[i]));
            order
        }
    };
    if permutation.iter().filter(|&&i| scaled[i] < 0).count() > 1 {
        return Err(Error::Invariant(
            "more than one negative weight after sign flip".into(),
        ));
    }
    Ok(NormalizedGrading {
        weights: permutation.map(|i| scaled[i]),
        permutation,
        sign_flipped,
        gcd_divisor: divisor,
    })
}

/// The plane grading by `Z/c` with weights `(a mod c, b mod c)`.
pub fn residue_grading(g: &NormalizedGrading) -> Result<Grading> {
    let c = g.c();
    if c < 1 {
        return Err(Error::ZeroModulus);
    }
    Grading::residue(&[g.a(), g.b()], c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_map, parse_polynomial};
    use crate::{QMap, QPoly};

    const XYZ: [&str; 3] = ["x", "y", "z"];

    fn p3(s: &str) -> QPoly {
        parse_polynomial(s, &XYZ).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(
            weighted_degree(&p3("x*y^2*z"), &Grading::integer(&[7, 2, -3])),
            Ok(8)
        );
        assert_eq!(
            weighted_degree(&p3("x^2 - y*z"), &Grading::integer(&[1, 1, -1])),
            Ok(2)
        );
        let z3 = Grading::residue(&[1, 2], 3).unwrap();
        let f: QPoly = parse_polynomial("u + v^5", &["u", "v"]).unwrap();
        assert_eq!(weighted_degree(&f, &z3), Ok(1));
        let mixed: QPoly = parse_polynomial("u + v", &["u", "v"]).unwrap();
        assert_eq!(weighted_degree(&mixed, &z3), Err(Error::NotHomogeneous));
        assert_eq!(
            weighted_degree(&QPoly::zero(3), &Grading::integer(&[1, 1, 1])),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn homogeneity() {
        assert!(is_homogeneous(
            &p3("x^2 - y*z"),
            &Grading::integer(&[1, 1, 1])
        ));
        assert!(!is_homogeneous(
            &p3("x^2 - y*z"),
            &Grading::integer(&[1, 1, 2])
        ));
        assert!(is_homogeneous(&p3("y^2*z"), &Grading::integer(&[1, 1, -1])));
        assert!(is_homogeneous(
            &QPoly::zero(3),
            &Grading::integer(&[1, 1, 1])
        ));
    }

    #[test]
    fn tops() {
        let w = Grading::integer(&[2, 1]);
        let f: QPoly = parse_polynomial("y^2 - x + 1", &["x", "y"]).unwrap();
        assert_eq!(top_component(&f, &w).unwrap().to_string(), "y^2 - x");
        let g: QPoly = parse_polynomial("(y^2 - x)^3 + y", &["x", "y"]).unwrap();
        let cube: QPoly = parse_polynomial("(y^2 - x)^3", &["x", "y"]).unwrap();
        assert_eq!(top_component(&g, &w).unwrap(), cube);
    }

    #[test]
    fn graded_maps() {
        let m: QMap = parse_map("(x + y^2*z, y, z)", &XYZ).unwrap();
        assert!(is_graded_map(&m, &Grading::integer(&[1, 1, -1])));
        assert!(is_graded_map(&m, &Grading::integer(&[0, 0, 0])));
        let n: QMap = parse_map("(x + y, y, z)", &XYZ).unwrap();
        assert!(!is_graded_map(&n, &Grading::integer(&[2, 1, -1])));
        let plane: QMap = parse_map("(u + v^4, v)", &["u", "v"]).unwrap();
        assert!(is_graded_map(
            &plane,
            &Grading::residue(&[2, 2], 3).unwrap()
        ));
    }

    #[test]
    fn normalization_examples() {
        let n = normalize(&Grading::integer(&[2, 4, -6])).unwrap();
        assert_eq!(n.weights(), [2, 1, -3]);
        assert_eq!(n.permutation(), [1, 0, 2]);
        assert_eq!(n.gcd_divisor(), 2);
        assert!(!n.sign_flipped());
        assert_eq!(n.original_weights(), [2, 4, -6]);

        let n = normalize(&Grading::integer(&[-1, -2, -3])).unwrap();
        assert!(n.sign_flipped());
        assert_eq!(n.weights(), [3, 2, 1]);
        assert_eq!(n.pattern(), WeightPattern::Positive);
        assert_eq!(n.original_weights(), [-1, -2, -3]);

        let n = normalize(&Grading::integer(&[0, 0, 0])).unwrap();
        assert_eq!(n.weights(), [0, 0, 0]);
        assert_eq!(n.pattern(), WeightPattern::Trivial);

        let n = normalize(&Grading::integer(&[-3, 7, 2])).unwrap();
        assert_eq!(n.weights(), [7, 2, -3]);
        assert_eq!(n.pattern(), WeightPattern::Mixed);

        // two negatives flip to one negative
        let n = normalize(&Grading::integer(&[-7, -2, 3])).unwrap();
        assert_eq!(n.weights(), [7, 2, -3]);
        assert!(n.sign_flipped());
    }

    #[test]
    fn zero_patterns() {
        let pat = |w: [i64; 3]| normalize(&Grading::integer(&w)).unwrap().pattern();
        assert_eq!(pat([0, 0, -1]), WeightPattern::Zero(ZeroSubcase::BAndCZero));
        assert_eq!(pat([0, 1, -1]), WeightPattern::Zero(ZeroSubcase::BZero));
        assert_eq!(pat([1, 1, 0]), WeightPattern::Zero(ZeroSubcase::CZeroEqual));
        assert_eq!(
            pat([0, 2, 3]),
            WeightPattern::Zero(ZeroSubcase::CZeroUnequal)
        );
        assert_eq!(
            pat([1, 2, 0]),
            WeightPattern::Zero(ZeroSubcase::CZeroUnequal)
        );
    }

    #[test]
    fn residues() {
        let r = |w: [i64; 3]| residue_grading(&normalize(&Grading::integer(&w)).unwrap());
        assert_eq!(r([7, 2, -3]).unwrap().weights(), &[1, 2]);
        assert_eq!(r([5, 2, -3]).unwrap().weights(), &[2, 2]);
        assert_eq!(r([5, 2, -1]).unwrap().modulus(), Some(1));
        assert_eq!(r([1, 1, 0]), Err(Error::ZeroModulus));
    }

    #[test]
    fn map_conjugation_respects_grading() {
        let g = Grading::integer(&[-3, 7, 2]);
        let n = normalize(&g).unwrap();
        let m: QMap = parse_map("(x, y + x*z^5, z)", &XYZ).unwrap();
        assert!(is_graded_map(&m, &g));
        let nm = n.to_normalized(&m);
        assert!(is_graded_map(&nm, &n.grading()));
        assert_eq!(n.to_original(&nm), m);
    }
}
