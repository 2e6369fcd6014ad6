//! Sparse multivariate polynomials over an exact field.
//!
//! A [`Polynomial`] stores its terms in a `BTreeMap` keyed by [`Monomial`],
//! ordered graded-lexicographically (total degree first, then the exponent
//! tuple). Zero coefficients are never stored, so structural equality is
//! mathematical equality.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num, Signed};

use crate::automorphism::PolyMap;
use crate::error::{Error, Result};

/// Largest number of variables a polynomial may carry.
pub const MAX_ARITY: usize = 8;

/// Coefficient field.
///
/// The algorithms assume exact arithmetic; `Rational` is the intended
/// instantiation. Any type with exact field operations works.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Num
    + Signed
    + Neg<Output = Self>
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + fmt::Display
        + Num
        + Signed
        + Neg<Output = T>
        + FromPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Lifts a machine integer into the scalar field.
pub fn scalar<S: Scalar>(n: i64) -> S {
    S::from_i64(n).expect("scalar field contains the integers")
}

/// Exponent tuple of a monomial. Slots past the owning polynomial's arity are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u32; MAX_ARITY]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_ARITY])
    }

    pub fn new(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_ARITY, "too many exponents");
        let mut m = [0; MAX_ARITY];
        m[..exps.len()].copy_from_slice(exps);
        Monomial(m)
    }

    /// The monomial `x_index`.
    pub fn var(index: usize) -> Self {
        let mut m = [0; MAX_ARITY];
        m[index] = 1;
        Monomial(m)
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn exponents(&self, arity: usize) -> &[u32] {
        &self.0[..arity]
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn product(&self, other: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(m)
    }

    pub fn with_exponent(&self, index: usize, exp: u32) -> Monomial {
        let mut m = self.0;
        m[index] = exp;
        Monomial(m)
    }

    /// Number of variables with a nonzero exponent.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&e| e > 0).count()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e > 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

/// Sparse polynomial in `arity` variables with coefficients in `S`.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    arity: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar + Eq> Eq for Polynomial<S> {}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(arity: usize) -> Self {
        assert!(arity <= MAX_ARITY, "arity {arity} exceeds {MAX_ARITY}");
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, S::one())
    }

    pub fn constant(arity: usize, c: S) -> Self {
        Self::term(arity, Monomial::one(), c)
    }

    pub fn term(arity: usize, m: Monomial, c: S) -> Self {
        let mut p = Self::zero(arity);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The coordinate function `x_index`.
    pub fn var(arity: usize, index: usize) -> Self {
        assert!(
            index < arity,
            "variable {index} out of range for arity {arity}"
        );
        Self::term(arity, Monomial::var(index), S::one())
    }

    pub fn monomial(arity: usize, exps: &[u32], c: S) -> Self {
        assert_eq!(exps.len(), arity, "exponent count must match arity");
        Self::term(arity, Monomial::new(exps), c)
    }

    /// Builds a polynomial from possibly repeated terms, summing duplicates.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &S)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&Monomial::one())
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().next_back().map(Monomial::total_degree)
    }

    pub fn min_total_degree(&self) -> Option<u64> {
        self.terms.keys().next().map(Monomial::total_degree)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Largest exponent of `x_index` among the terms.
    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(index))
            .max()
            .unwrap_or(0)
    }

    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(index) > 0)
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn add_scaled_shifted(&mut self, other: &Self, c: &S, shift: &Monomial) {
        for (m, d) in &other.terms {
            self.add_term(m.product(shift), d.clone() * c.clone());
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity == other.arity {
            Ok(())
        } else {
            Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::zero(self.arity);
        for (m, c) in &small.terms {
            out.add_scaled_shifted(big, c, m);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (*m, d.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiplies by a single monomial.
    pub fn shift(&self, by: &Monomial) -> Self {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.product(by), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.arity);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces every variable by its image and expands.
    ///
    /// The images share an arity, which becomes the arity of the result.
    pub fn substitute(&self, images: &[Polynomial<S>]) -> Result<Self> {
        if images.len() != self.arity {
            return Err(Error::ImageCountMismatch {
                expected: self.arity,
                found: images.len(),
            });
        }
        let target = match images.first() {
            Some(img) => img.arity,
            None => return Ok(self.clone()),
        };
        for img in images {
            if img.arity != target {
                return Err(Error::ArityMismatch {
                    left: target,
                    right: img.arity,
                });
            }
        }
        let mut powers: Vec<Vec<Polynomial<S>>> = vec![vec![Polynomial::one(target)]; self.arity];
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut acc: Option<Polynomial<S>> = None;
            for (i, img) in images.iter().enumerate() {
                let e = m.exponent(i) as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * img;
                    powers[i].push(next);
                }
                acc = Some(match acc {
                    None => powers[i][e].clone(),
                    Some(a) => &a * &powers[i][e],
                });
            }
            match acc {
                None => out.add_term(Monomial::one(), c.clone()),
                Some(a) => out.add_scaled_shifted(&a, c, &Monomial::one()),
            }
        }
        Ok(out)
    }

    pub fn partial_derivative(&self, index: usize) -> Result<Self> {
        if index >= self.arity {
            return Err(Error::IndexOutOfRange {
                index,
                arity: self.arity,
            });
        }
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e > 0 {
                let factor = S::from_u32(e).expect("exponent fits the scalar field");
                out.add_term(m.with_exponent(index, e - 1), c.clone() * factor);
            }
        }
        Ok(out)
    }

    /// Renders with the given variable names, highest term first.
    pub fn fmt_with(&self, names: &[&str]) -> String {
        assert!(names.len() >= self.arity, "not enough variable names");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            for (i, name) in names.iter().enumerate().take(self.arity) {
                match m.exponent(i) {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

/// Default variable names for an arity.
pub fn default_names(arity: usize) -> Vec<String> {
    match arity {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.arity);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.fmt_with(&names))
    }
}

impl<S: Scalar> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl<S: Scalar> Add for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: Self) -> Polynomial<S> {
        self.checked_add(rhs).expect("polynomial arity mismatch")
    }
}

impl<S: Scalar> Sub for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: Self) -> Polynomial<S> {
        self.checked_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl<S: Scalar> Mul for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: Self) -> Polynomial<S> {
        self.checked_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: Self) -> Polynomial<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: Self) -> Polynomial<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: Self) -> Polynomial<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        -&self
    }
}

/// Matrix of partial derivatives; row `i` holds the gradient of coordinate `i`.
pub fn jacobian_matrix<S: Scalar>(m: &PolyMap<S>) -> Vec<Vec<Polynomial<S>>> {
    let n = m.arity();
    m.coords()
        .iter()
        .map(|f| {
            (0..n)
                .map(|j| f.partial_derivative(j).expect("index below arity"))
                .collect()
        })
        .collect()
}

pub fn jacobian_determinant<S: Scalar>(m: &PolyMap<S>) -> Polynomial<S> {
    determinant(&jacobian_matrix(m), m.arity())
}

/// Cofactor expansion; only ever called on tiny matrices.
pub(crate) fn determinant<S: Scalar>(rows: &[Vec<Polynomial<S>>], arity: usize) -> Polynomial<S> {
    let n = rows.len();
    match n {
        0 => Polynomial::one(arity),
        1 => rows[0][0].clone(),
        2 => &(&rows[0][0] * &rows[1][1]) - &(&rows[0][1] * &rows[1][0]),
        _ => {
            let mut acc = Polynomial::zero(arity);
            for col in 0..n {
                if rows[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial<S>>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &rows[0][col] * &determinant(&minor, arity);
                acc = if col % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
    }
}
