//! Jung decomposition of plane automorphisms into elementary and affine
//! factors, plus the [`FactorChain`] container shared by every decomposer.

use std::fmt;

use crate::arith::{Monomial, Polynomial, Scalar};
use crate::automorphism::{
    affine_map, classify, compose, elementary_map, has_unit_jacobian, invert_structured, MapTag,
    PolyMap,
};
use crate::error::{Error, Result};
use crate::grading::{is_graded_map, Grading};
use crate::newton::{
    analyze_top_edge, mirrored_reduction_step, newton_polygon, reduction_step, EdgeAnalysis,
    NewtonPolygon,
};

/// Where a factor came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Inverse of the `p = 1` reduction at the given step.
    Reduction(usize),
    /// Inverse of the `q = 1` (swapped) reduction at the given step.
    MirroredReduction(usize),
    /// Affine part of the base case.
    BaseAffine,
    /// Elementary part of the base case.
    BaseElementary,
    /// Produced by a random generator.
    Generated,
    /// Linear mixing inside one weight level.
    LevelLinear(i64),
    /// Elementary addition into one weight level.
    LevelElementary(i64),
    /// One Euclidean row operation.
    EuclidStep(usize),
    /// Normalization of the invariant variable.
    Normalization,
    /// Scaling of the negative-weight variable.
    Torus,
    /// A plane factor lifted to three variables.
    Lifted(Box<Provenance>),
    /// Produced while rewriting a chain into liftable form.
    Rewritten,
    /// Built from an embedded lower-dimensional decomposition.
    Embedded(Box<Provenance>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Reduction(s) => write!(f, "reduction step {s}"),
            Provenance::MirroredReduction(s) => write!(f, "mirrored reduction step {s}"),
            Provenance::BaseAffine => f.write_str("base case, affine part"),
            Provenance::BaseElementary => f.write_str("base case, elementary part"),
            Provenance::Generated => f.write_str("generated"),
            Provenance::LevelLinear(w) => write!(f, "linear mixing at weight {w}"),
            Provenance::LevelElementary(w) => write!(f, "elementary addition at weight {w}"),
            Provenance::EuclidStep(s) => write!(f, "euclid step {s}"),
            Provenance::Normalization => f.write_str("normalization"),
            Provenance::Torus => f.write_str("torus factor"),
            Provenance::Lifted(p) => write!(f, "lift of {p}"),
            Provenance::Rewritten => f.write_str("rewritten"),
            Provenance::Embedded(p) => write!(f, "embedded {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor<S: Scalar> {
    pub map: PolyMap<S>,
    pub provenance: Provenance,
}

impl<S: Scalar> Factor<S> {
    pub fn new(map: PolyMap<S>, provenance: Provenance) -> Self {
        Factor { map, provenance }
    }

    pub fn tag(&self) -> MapTag {
        classify(&self.map).tag()
    }

    pub fn inverse(&self) -> Option<PolyMap<S>> {
        invert_structured(&self.map)
    }
}

/// Ordered factors; `[f1, .., fk]` stands for `compose(f1, compose(f2, .. fk))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorChain<S: Scalar> {
    arity: usize,
    factors: Vec<Factor<S>>,
}

impl<S: Scalar> FactorChain<S> {
    pub fn new(arity: usize) -> Self {
        FactorChain {
            arity,
            factors: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Factor<S>] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<Factor<S>> {
        self.factors
    }

    pub fn maps(&self) -> Vec<&PolyMap<S>> {
        self.factors.iter().map(|f| &f.map).collect()
    }

    /// Appends a factor; identity maps are dropped.
    pub fn push(&mut self, factor: Factor<S>) {
        assert_eq!(factor.map.arity(), self.arity, "factor arity");
        if !factor.map.is_identity() {
            self.factors.push(factor);
        }
    }

    pub fn push_map(&mut self, map: PolyMap<S>, provenance: Provenance) {
        self.push(Factor::new(map, provenance));
    }

    pub fn extend(&mut self, other: FactorChain<S>) {
        for f in other.factors {
            self.push(f);
        }
    }

    /// Applies `f` to every factor map, keeping provenance.
    pub fn map_factors(&self, mut f: impl FnMut(&PolyMap<S>) -> PolyMap<S>) -> FactorChain<S> {
        let mut out = FactorChain::new(self.arity);
        for factor in &self.factors {
            let map = f(&factor.map);
            out.arity = map.arity();
            out.push(Factor::new(map, factor.provenance.clone()));
        }
        out
    }

    /// The composed map; the identity for an empty chain.
    pub fn compose_all(&self) -> PolyMap<S> {
        let mut iter = self.factors.iter().rev();
        let Some(last) = iter.next() else {
            return PolyMap::identity(self.arity);
        };
        iter.fold(last.map.clone(), |acc, f| {
            compose(&f.map, &acc).expect("factor arities agree")
        })
    }

    /// Inverse of the composed map, from the factor inverses in reverse order.
    pub fn inverse_map(&self) -> Result<PolyMap<S>> {
        let mut acc: Option<PolyMap<S>> = None;
        for factor in &self.factors {
            let inv = factor.inverse().ok_or_else(|| {
                Error::Invariant("chain factor without a structured inverse".into())
            })?;
            acc = Some(match acc {
                None => inv,
                Some(rest) => compose(&inv, &rest)?,
            });
        }
        Ok(acc.unwrap_or_else(|| PolyMap::identity(self.arity)))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Factor<S>> {
        self.factors.iter()
    }
}

impl<'a, S: Scalar> IntoIterator for &'a FactorChain<S> {
    type Item = &'a Factor<S>;
    type IntoIter = std::slice::Iter<'a, Factor<S>>;

    fn into_iter(self) -> Self::IntoIter {
        self.factors.iter()
    }
}

/// A chain together with the Newton polygons of the working first coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct JungTrace<S: Scalar> {
    pub chain: FactorChain<S>,
    pub polygons: Vec<NewtonPolygon>,
}

pub fn decompose_plane<S: Scalar>(m: &PolyMap<S>) -> Result<FactorChain<S>> {
    decompose_plane_traced(m).map(|t| t.chain)
}

fn not_auto(msg: impl Into<String>) -> Error {
    Error::NotAnAutomorphism(msg.into())
}

/// Jung decomposition recording every Newton polygon along the way.
pub fn decompose_plane_traced<S: Scalar>(m: &PolyMap<S>) -> Result<JungTrace<S>> {
    if m.arity() != 2 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    if !has_unit_jacobian(m) {
        return Err(not_auto("Jacobian determinant is not a nonzero constant"));
    }
    let mut work = m.clone();
    let mut polygons = Vec::new();
    let mut undo: Vec<Factor<S>> = Vec::new();
    let mut step = 0;
    loop {
        let f = work.coord(0);
        if f.is_constant() {
            return Err(not_auto("first coordinate is constant"));
        }
        let polygon = newton_polygon(f)?;
        let area = polygon.doubled_area();
        polygons.push(polygon);
        if area == 0 || is_affine(&work) {
            break;
        }
        let analysis = analyze_top_edge(f)?;
        let (psi, reduced, provenance) = match &analysis {
            EdgeAnalysis::PerfectPower { p: 1, .. } => {
                let (psi, reduced) = reduction_step(&work, &analysis)?;
                (psi, reduced, Provenance::Reduction(step))
            }
            EdgeAnalysis::PerfectPower { q: 1, .. } => {
                let (psi, reduced) = mirrored_reduction_step(&work, &analysis)?;
                (psi, reduced, Provenance::MirroredReduction(step))
            }
            EdgeAnalysis::Obstructed(reason) => return Err(not_auto(reason.to_string())),
            _ => return Err(Error::Invariant("axis edge with positive area".into())),
        };
        let inverse = invert_structured(&psi).expect("elementary reduction is invertible");
        undo.push(Factor::new(inverse, provenance));
        let next_area = newton_polygon(reduced.coord(0))?.doubled_area();
        if next_area >= area {
            return Err(Error::Invariant(
                "Newton polygon area did not shrink".into(),
            ));
        }
        work = reduced;
        step += 1;
    }
    let mut chain = base_case(&work)?;
    for factor in undo.into_iter().rev() {
        chain.push(factor);
    }
    Ok(JungTrace { chain, polygons })
}

/// Splits `g` as `mu * x_keep + w(x_other)`.
fn split_second<S: Scalar>(g: &Polynomial<S>, keep: usize) -> Option<(S, Polynomial<S>)> {
    let var = Monomial::var(keep);
    let mu = g.coeff(&var);
    let rest = g.filter_terms(|m| *m != var);
    (!mu.is_zero() && !rest.involves(keep)).then_some((mu, rest))
}

/// Base case: the first coordinate is `c x + d` or `c y + d`.
fn is_affine<S: Scalar>(m: &PolyMap<S>) -> bool {
    m.coords()
        .iter()
        .all(|c| c.total_degree().is_none_or(|d| d <= 1))
}

fn base_case<S: Scalar>(m: &PolyMap<S>) -> Result<FactorChain<S>> {
    if is_affine(m) {
        // the Jacobian check already guarantees invertibility
        let mut chain = FactorChain::new(2);
        chain.push_map(m.clone(), Provenance::BaseAffine);
        return Ok(chain);
    }
    let f = m.coord(0);
    let g = m.coord(1);
    // `var` is the variable in f, `other` the one that must appear linearly in g.
    let (var, other) = match analyze_top_edge(f)? {
        EdgeAnalysis::MonomialX(1) => (0, 1),
        EdgeAnalysis::MonomialY(1) => (1, 0),
        _ => return Err(not_auto("first coordinate has zero area but is not linear")),
    };
    let c = f.coeff(&Monomial::var(var));
    let d = f.constant_term();
    let (mu, w) = split_second(g, other)
        .ok_or_else(|| not_auto("Jacobian of the base case is not a nonzero constant"))?;
    let w0 = w.constant_term();
    let zero = S::zero();
    let mut matrix = vec![vec![zero.clone(); 2]; 2];
    matrix[0][var] = c;
    matrix[1][other] = mu.clone();
    let affine = affine_map(&matrix, &[d, w0.clone()]);
    let shift = (&w - &Polynomial::constant(2, w0)).scale(&(S::one() / mu));
    let elementary = elementary_map(2, other, shift);
    let mut chain = FactorChain::new(2);
    chain.push_map(affine, Provenance::BaseAffine);
    chain.push_map(elementary, Provenance::BaseElementary);
    Ok(chain)
}

/// Jung decomposition of an origin-fixing automorphism; every factor fixes the origin.
pub fn decompose_plane_origin<S: Scalar>(m: &PolyMap<S>) -> Result<FactorChain<S>> {
    if m.arity() != 2 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    if !m.preserves_origin() {
        return Err(Error::OriginNotPreserved);
    }
    let chain = decompose_plane(m)?;
    if chain.iter().any(|f| !f.map.preserves_origin()) {
        return Err(Error::Invariant(
            "origin-fixing input produced a translation".into(),
        ));
    }
    Ok(chain)
}

/// Jung decomposition of a graded automorphism; every factor is graded.
pub fn decompose_plane_graded<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<FactorChain<S>> {
    if m.arity() != 2 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let chain = decompose_plane(m)?;
    if let Some(i) = chain.iter().position(|f| !is_graded_map(&f.map, g)) {
        return Err(Error::Invariant(format!(
            "factor {i} of a graded input is not graded"
        )));
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::random_tame;
    use crate::parse::parse_map;
    use crate::{QMap, Rational};

    fn m2(s: &str) -> QMap {
        parse_map(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn simple_reduction() {
        let m = m2("(y^2 - x, y)");
        let chain = decompose_plane(&m).unwrap();
        assert_eq!(chain.compose_all(), m);
        let shown: Vec<String> = chain.maps().iter().map(|f| f.to_string()).collect();
        assert_eq!(shown, ["(-x, y)", "(-y^2 + x, y)"]);
        assert!(chain
            .iter()
            .all(|f| matches!(f.tag(), MapTag::Linear | MapTag::Elementary)));
    }

    #[test]
    fn identity_and_rejections() {
        assert!(decompose_plane(&QMap::identity(2)).unwrap().is_empty());
        assert!(matches!(
            decompose_plane(&m2("(x + y^2, y + x^2)")),
            Err(Error::NotAnAutomorphism(_))
        ));
        assert!(matches!(
            decompose_plane(&m2("(x^2, y)")),
            Err(Error::NotAnAutomorphism(_))
        ));
        assert!(matches!(
            decompose_plane(&m2("(x, x + y)")).map(|c| c.len()),
            Ok(1)
        ));
        assert_eq!(
            decompose_plane(&QMap::identity(3)),
            Err(Error::UnsupportedArity(3))
        );
    }

    #[test]
    fn base_cases() {
        for s in [
            "(2*x + 3, 5*y - x^3 + 1)",
            "(3*y - 1, -x + y^4)",
            "(y, x)",
            "(x + 1, y)",
            "(x, y + x^2)",
        ] {
            let m = m2(s);
            let chain = decompose_plane(&m).unwrap();
            assert_eq!(chain.compose_all(), m, "{s}");
            assert!(chain.len() <= 2);
        }
    }

    #[test]
    fn mirrored_steps() {
        let m = m2("(y + x^3 + 2, x)");
        let t = decompose_plane_traced(&m).unwrap();
        assert_eq!(t.chain.compose_all(), m);
        assert!(t
            .chain
            .iter()
            .any(|f| matches!(f.provenance, Provenance::MirroredReduction(_))));
        assert_eq!(t.polygons.len(), 2);
    }

    #[test]
    fn areas_shrink_along_trace() {
        let m = m2("(x + y^2 + (y + (x + y^2)^2)^3, y + (x + y^2)^2)");
        let t = decompose_plane_traced(&m).unwrap();
        assert_eq!(t.chain.compose_all(), m);
        let areas: Vec<u64> = t.polygons.iter().map(|p| p.doubled_area()).collect();
        assert!(areas.windows(2).all(|w| w[1] < w[0]), "{areas:?}");
        assert_eq!(*areas.last().unwrap(), 0);
    }

    #[test]
    fn random_tame_maps_decompose() {
        for seed in 0..20 {
            let (m, _) = random_tame::<Rational>(2, 4, 3, 2, seed);
            let chain = decompose_plane(&m).unwrap();
            assert_eq!(chain.compose_all(), m, "seed {seed}");
            let inv = chain.inverse_map().unwrap();
            assert!(compose(&m, &inv).unwrap().is_identity());
        }
    }

    #[test]
    fn origin_variant() {
        let chain = decompose_plane_origin(&m2("(y^2 - x, y)")).unwrap();
        assert!(chain.iter().all(|f| f.map.preserves_origin()));
        assert_eq!(
            decompose_plane_origin(&m2("(x + 1, y)")),
            Err(Error::OriginNotPreserved)
        );
        let lin = decompose_plane_origin(&m2("(2*x + y, x + y)")).unwrap();
        assert_eq!(lin.len(), 1);
        assert_eq!(lin.factors()[0].tag(), MapTag::Linear);
    }

    #[test]
    fn graded_variant() {
        let z3 = Grading::residue(&[2, 2], 3).unwrap();
        let m: QMap = parse_map("(u + v^4, v)", &["u", "v"]).unwrap();
        let chain = decompose_plane_graded(&m, &z3).unwrap();
        assert_eq!(chain.len(), 1);
        assert!(is_graded_map(&chain.factors()[0].map, &z3));
        assert_eq!(
            decompose_plane_graded(&m2("(x + y^2, y)"), &z3),
            Err(Error::NotGraded)
        );
    }
}
