//! Polynomial maps as coordinate tuples.
//!
//! Composition follows one fixed convention throughout the crate:
//! `compose(left, right)` substitutes the coordinates of `right` into every
//! coordinate of `left`, so `compose(left, right)[i] = left[i](right[0], ..)`.
//! A [`FactorChain`] `[f1, f2, .., fk]` therefore stands for
//! `compose(f1, compose(f2, .. fk))`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{default_names, jacobian_determinant, scalar, Monomial, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::jung::{decompose_plane, Factor, FactorChain, Provenance};

/// An endomorphism of the polynomial algebra, one image per variable.
#[derive(Clone, PartialEq)]
pub struct PolyMap<S> {
    coords: Vec<Polynomial<S>>,
}

impl<S: Scalar> PolyMap<S> {
    pub fn new(coords: Vec<Polynomial<S>>) -> Result<Self> {
        let n = coords.len();
        if n == 0 || n > crate::arith::MAX_ARITY {
            return Err(Error::UnsupportedArity(n));
        }
        for c in &coords {
            if c.arity() != n {
                return Err(Error::ArityMismatch {
                    left: n,
                    right: c.arity(),
                });
            }
        }
        Ok(PolyMap { coords })
    }

    pub fn identity(arity: usize) -> Self {
        PolyMap {
            coords: (0..arity).map(|i| Polynomial::var(arity, i)).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Polynomial<S>] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Polynomial<S> {
        &self.coords[i]
    }

    pub fn into_coords(self) -> Vec<Polynomial<S>> {
        self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords
            .iter()
            .enumerate()
            .all(|(i, c)| *c == Polynomial::var(self.arity(), i))
    }

    pub fn preserves_origin(&self) -> bool {
        self.coords.iter().all(|c| c.constant_term().is_zero())
    }

    pub fn total_degree(&self) -> u64 {
        self.coords
            .iter()
            .filter_map(Polynomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Renames variables: new variable `j` is old variable `perm[j]`.
    ///
    /// The result describes the same map in the permuted coordinate system.
    pub fn permute_variables(&self, perm: &[usize]) -> Self {
        let n = self.arity();
        assert_eq!(perm.len(), n, "permutation length must equal arity");
        let mut inverse = vec![0; n];
        for (j, &i) in perm.iter().enumerate() {
            inverse[i] = j;
        }
        let images: Vec<Polynomial<S>> = (0..n).map(|i| Polynomial::var(n, inverse[i])).collect();
        PolyMap {
            coords: perm
                .iter()
                .map(|&i| self.coords[i].substitute(&images).expect("arity checked"))
                .collect(),
        }
    }

    pub fn fmt_with(&self, names: &[&str]) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| c.fmt_with(names)).collect();
        format!("({})", parts.join(", "))
    }
}

impl<S: Scalar> fmt::Display for PolyMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.arity());
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.fmt_with(&names))
    }
}

impl<S: Scalar> fmt::Debug for PolyMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap{self}")
    }
}

/// `compose(left, right)[i] = left[i](right)`.
pub fn compose<S: Scalar>(left: &PolyMap<S>, right: &PolyMap<S>) -> Result<PolyMap<S>> {
    if left.arity() != right.arity() {
        return Err(Error::ArityMismatch {
            left: left.arity(),
            right: right.arity(),
        });
    }
    let coords = left
        .coords
        .iter()
        .map(|c| c.substitute(&right.coords))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyMap { coords })
}

/// Builds `x_i -> sum_j matrix[i][j] x_j + translation[i]`.
pub fn affine_map<S: Scalar>(matrix: &[Vec<S>], translation: &[S]) -> PolyMap<S> {
    let n = matrix.len();
    let coords = (0..n)
        .map(|i| {
            let mut terms: Vec<(Monomial, S)> = (0..n)
                .map(|j| (Monomial::var(j), matrix[i][j].clone()))
                .collect();
            terms.push((Monomial::one(), translation[i].clone()));
            Polynomial::from_terms(n, terms)
        })
        .collect();
    PolyMap { coords }
}

pub fn linear_map<S: Scalar>(matrix: &[Vec<S>]) -> PolyMap<S> {
    let zeros = vec![S::zero(); matrix.len()];
    affine_map(matrix, &zeros)
}

/// `x_index -> x_index + addend`, every other variable fixed.
pub fn elementary_map<S: Scalar>(arity: usize, index: usize, addend: Polynomial<S>) -> PolyMap<S> {
    let mut coords: Vec<Polynomial<S>> = (0..arity).map(|i| Polynomial::var(arity, i)).collect();
    coords[index] = &coords[index] + &addend;
    PolyMap { coords }
}

/// Coarse tag of a [`MapClass`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapTag {
    Identity,
    Linear,
    Affine,
    Elementary,
    Triangular,
    General,
}

/// Most specific shape of a polynomial map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapClass<S: Scalar> {
    Identity,
    Linear {
        matrix: Vec<Vec<S>>,
    },
    Affine {
        matrix: Vec<Vec<S>>,
        translation: Vec<S>,
    },
    /// `x_index -> scale * x_index + addend`, `addend` free of `x_index`.
    Elementary {
        index: usize,
        scale: S,
        addend: Polynomial<S>,
    },
    /// `x_index -> scales[index] * x_index + addend`, every other
    /// `x_j -> scales[j] * x_j`.
    Triangular {
        index: usize,
        scales: Vec<S>,
        addend: Polynomial<S>,
    },
    General,
}

impl<S: Scalar> MapClass<S> {
    pub fn tag(&self) -> MapTag {
        match self {
            MapClass::Identity => MapTag::Identity,
            MapClass::Linear { .. } => MapTag::Linear,
            MapClass::Affine { .. } => MapTag::Affine,
            MapClass::Elementary { .. } => MapTag::Elementary,
            MapClass::Triangular { .. } => MapTag::Triangular,
            MapClass::General => MapTag::General,
        }
    }
}

fn affine_parts<S: Scalar>(m: &PolyMap<S>) -> Option<(Vec<Vec<S>>, Vec<S>)> {
    let n = m.arity();
    let mut matrix = vec![vec![S::zero(); n]; n];
    let mut translation = vec![S::zero(); n];
    for (i, c) in m.coords.iter().enumerate() {
        for (mono, coef) in c.terms() {
            match mono.total_degree() {
                0 => translation[i] = coef.clone(),
                1 => {
                    let j = (0..n).find(|&j| mono.exponent(j) == 1)?;
                    matrix[i][j] = coef.clone();
                }
                _ => return None,
            }
        }
    }
    Some((matrix, translation))
}

/// Splits `coord` as `scale * x_index + rest` with `rest` free of `x_index`.
fn split_scaled<S: Scalar>(coord: &Polynomial<S>, index: usize) -> Option<(S, Polynomial<S>)> {
    let var = Monomial::var(index);
    let scale = coord.coeff(&var);
    if scale.is_zero() {
        return None;
    }
    let rest = coord.filter_terms(|m| *m != var);
    if rest.involves(index) {
        return None;
    }
    Some((scale, rest))
}

/// Scale `s` when `coord == s * x_index`.
fn pure_scale<S: Scalar>(coord: &Polynomial<S>, index: usize) -> Option<S> {
    let var = Monomial::var(index);
    if coord.len() == 1 {
        let s = coord.coeff(&var);
        (!s.is_zero()).then_some(s)
    } else {
        None
    }
}

pub fn classify<S: Scalar>(m: &PolyMap<S>) -> MapClass<S> {
    let n = m.arity();
    if m.is_identity() {
        return MapClass::Identity;
    }
    if let Some((matrix, translation)) = affine_parts(m) {
        if matrix_inverse(&matrix).is_none() {
            return MapClass::General;
        }
        return if translation.iter().all(|t| t.is_zero()) {
            MapClass::Linear { matrix }
        } else {
            MapClass::Affine {
                matrix,
                translation,
            }
        };
    }
    let changed: Vec<usize> = (0..n)
        .filter(|&i| m.coords[i] != Polynomial::var(n, i))
        .collect();
    if changed.len() == 1 {
        let index = changed[0];
        if let Some((scale, addend)) = split_scaled(&m.coords[index], index) {
            return MapClass::Elementary {
                index,
                scale,
                addend,
            };
        }
    }
    for index in 0..n {
        let Some((scale, addend)) = split_scaled(&m.coords[index], index) else {
            continue;
        };
        let others: Option<Vec<S>> = (0..n)
            .map(|j| {
                if j == index {
                    Some(scale.clone())
                } else {
                    pure_scale(&m.coords[j], j)
                }
            })
            .collect();
        if let Some(scales) = others {
            return MapClass::Triangular {
                index,
                scales,
                addend,
            };
        }
    }
    MapClass::General
}

/// Inverse of a map whose class is one of the structured shapes.
pub fn invert_structured<S: Scalar>(m: &PolyMap<S>) -> Option<PolyMap<S>> {
    let n = m.arity();
    match classify(m) {
        MapClass::Identity => Some(m.clone()),
        MapClass::Linear { matrix } => Some(linear_map(&matrix_inverse(&matrix)?)),
        MapClass::Affine {
            matrix,
            translation,
        } => {
            let inv = matrix_inverse(&matrix)?;
            let shift: Vec<S> = (0..n)
                .map(|i| {
                    -(0..n).fold(S::zero(), |acc, j| {
                        acc + inv[i][j].clone() * translation[j].clone()
                    })
                })
                .collect();
            Some(affine_map(&inv, &shift))
        }
        MapClass::Elementary {
            index,
            scale,
            addend,
        } => {
            let mut coords: Vec<Polynomial<S>> = (0..n).map(|i| Polynomial::var(n, i)).collect();
            coords[index] = (&coords[index] - &addend).scale(&(S::one() / scale));
            Some(PolyMap { coords })
        }
        MapClass::Triangular {
            index,
            scales,
            addend,
        } => {
            let undo: Vec<Polynomial<S>> = (0..n)
                .map(|j| Polynomial::var(n, j).scale(&(S::one() / scales[j].clone())))
                .collect();
            let mut coords = undo.clone();
            let shifted = addend.substitute(&undo).ok()?;
            coords[index] =
                (&Polynomial::var(n, index) - &shifted).scale(&(S::one() / scales[index].clone()));
            Some(PolyMap { coords })
        }
        MapClass::General => None,
    }
}

/// Gauss-Jordan inverse over the scalar field; `None` when singular.
pub fn matrix_inverse<S: Scalar>(matrix: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<S>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = S::one() / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = x.clone() - factor.clone() * p.clone();
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn matrix_determinant<S: Scalar>(matrix: &[Vec<S>]) -> S {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return S::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det = det * a[col][col].clone();
        for r in col + 1..n {
            let factor = a[r][col].clone() / a[col][col].clone();
            let pivot_row = a[col].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x = x.clone() - factor.clone() * p.clone();
            }
        }
    }
    det
}

/// Decides whether a plane map is an automorphism by running the Jung decomposition.
pub fn verify_automorphism_plane<S: Scalar>(m: &PolyMap<S>) -> bool {
    m.arity() == 2 && decompose_plane(m).is_ok()
}

pub fn verify_inverse_pair<S: Scalar>(m: &PolyMap<S>, inv: &PolyMap<S>) -> Result<bool> {
    let there = compose(m, inv)?;
    if !there.is_identity() {
        return Ok(false);
    }
    Ok(compose(inv, m)?.is_identity())
}

/// Exact inverse of a plane automorphism, assembled from its Jung chain.
pub fn invert_plane<S: Scalar>(m: &PolyMap<S>) -> Result<PolyMap<S>> {
    if m.arity() != 2 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    let chain = decompose_plane(m)?;
    chain.inverse_map()
}

/// Random composition of elementary and invertible linear factors.
///
/// Elementary addends have total degree at most `degree_bound` and integer
/// coefficients in `[-coeff_height, coeff_height]`; linear factors have
/// entries in the same range. Returns the composed map together with the
/// generating chain, so `chain.compose_all()` reproduces the map.
pub fn random_tame<S: Scalar>(
    arity: usize,
    factor_count: usize,
    degree_bound: u32,
    coeff_height: i64,
    seed: u64,
) -> (PolyMap<S>, FactorChain<S>) {
    assert!((1..=crate::arith::MAX_ARITY).contains(&arity));
    let degree_bound = degree_bound.max(1);
    let h = coeff_height.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = FactorChain::new(arity);
    for _ in 0..factor_count {
        let map = if arity > 1 && rng.gen_bool(0.5) {
            random_elementary(&mut rng, arity, degree_bound, h)
        } else {
            random_linear(&mut rng, arity, h)
        };
        chain.push(Factor::new(map, Provenance::Generated));
    }
    (chain.compose_all(), chain)
}

fn nonzero_coeff<S: Scalar>(rng: &mut ChaCha8Rng, h: i64) -> S {
    loop {
        let c = rng.gen_range(-h..=h);
        if c != 0 {
            return scalar(c);
        }
    }
}

fn random_elementary<S: Scalar>(
    rng: &mut ChaCha8Rng,
    arity: usize,
    degree_bound: u32,
    h: i64,
) -> PolyMap<S> {
    let index = rng.gen_range(0..arity);
    let others: Vec<usize> = (0..arity).filter(|&j| j != index).collect();
    let degree = rng.gen_range(1..=degree_bound);
    let mut terms = Vec::new();
    for exps in exponent_tuples(others.len(), degree) {
        let total: u32 = exps.iter().sum();
        if total == degree || rng.gen_bool(0.5) {
            let mut full = [0u32; crate::arith::MAX_ARITY];
            for (slot, &e) in others.iter().zip(&exps) {
                full[*slot] = e;
            }
            terms.push((Monomial::new(&full[..arity]), nonzero_coeff::<S>(rng, h)));
        }
        // keep one top-degree monomial, drop the rest of the top layer at random
        if total == degree && terms.len() > 1 && rng.gen_bool(0.5) {
            let last = terms.pop().expect("just pushed");
            if terms
                .iter()
                .any(|(m, _)| m.total_degree() == u64::from(degree))
            {
                continue;
            }
            terms.push(last);
        }
    }
    elementary_map(arity, index, Polynomial::from_terms(arity, terms))
}

fn random_linear<S: Scalar>(rng: &mut ChaCha8Rng, arity: usize, h: i64) -> PolyMap<S> {
    loop {
        let matrix: Vec<Vec<S>> = (0..arity)
            .map(|_| (0..arity).map(|_| scalar(rng.gen_range(-h..=h))).collect())
            .collect();
        if !matrix_determinant(&matrix).is_zero() {
            return linear_map(&matrix);
        }
    }
}

/// All exponent tuples of length `vars` with total degree at most `degree`.
pub(crate) fn exponent_tuples(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    if vars == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in 0..=degree {
        for mut rest in exponent_tuples(vars - 1, degree - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// Exact check that the Jacobian determinant is a nonzero constant.
pub fn has_unit_jacobian<S: Scalar>(m: &PolyMap<S>) -> bool {
    let j = jacobian_determinant(m);
    !j.is_zero() && j.is_constant()
}
