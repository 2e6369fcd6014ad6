//! Graded automorphisms of the polynomial algebra in three variables:
//! classification of gradings, restriction to the plane `z = 1` and lifting
//! back, graded-tame decompositions, the wildness certificate and explicit
//! wild witnesses.
//!
//! Unless stated otherwise, gradings are integer weights in the caller's
//! variable order; normalization to `(a, b, -c)` happens internally and
//! every returned map is expressed in the caller's coordinates again.

use std::fmt;

use num_integer::Integer;

use crate::arith::{Monomial, Polynomial, Scalar};
use crate::automorphism::{
    affine_map, classify as classify_map, compose, elementary_map, linear_map, matrix_inverse,
    MapClass, PolyMap,
};
use crate::error::{Error, Result};
use crate::examples::{nagata, nagata_inverse};
use crate::grading::{
    is_graded_map, normalize, residue_grading, Grading, NormalizedGrading, WeightPattern,
    ZeroSubcase,
};
use crate::jung::{decompose_plane, decompose_plane_graded, Factor, FactorChain, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    WildAdmitting,
    TameOnly,
}

/// The route by which a grading was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    TrivialGrading,
    /// `a = q b + p c` with `q = q_hat >= 2`, `p >= 1`.
    QHatAtLeastTwo {
        q_hat: i64,
        p: i64,
        q: i64,
    },
    AllPositive,
    AllNegative,
    ZeroWeightCase(ZeroSubcase),
    /// `gcd(a, c)` does not divide `b`.
    GcdObstruction,
    /// `gcd(b, c)` does not divide `a`.
    SymmetricGcdObstruction,
    QHatZeroOrNegative(i64),
    QHatOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub reason: Reason,
    pub normalized: NormalizedGrading,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::WildAdmitting => "WildAdmitting",
            Verdict::TameOnly => "TameOnly",
        };
        let [a, b, w] = self.normalized.weights();
        let c = -w;
        match self.reason {
            Reason::TrivialGrading => write!(f, "{verdict}: trivial grading (0, 0, 0)"),
            Reason::QHatAtLeastTwo { q_hat, p, q } => {
                write!(f, "{verdict}: {a} = {q}·{b} + {p}·{c}, q̂ = {q_hat}")
            }
            Reason::AllPositive => write!(f, "{verdict}: all weights positive"),
            Reason::AllNegative => write!(f, "{verdict}: all weights negative"),
            Reason::ZeroWeightCase(sub) => write!(f, "{verdict}: zero weight case {sub:?}"),
            Reason::GcdObstruction => {
                write!(
                    f,
                    "{verdict}: gcd({a}, {c}) = {} does not divide {b}",
                    a.gcd(&c)
                )
            }
            Reason::SymmetricGcdObstruction => {
                write!(
                    f,
                    "{verdict}: gcd({b}, {c}) = {} does not divide {a}",
                    b.gcd(&c)
                )
            }
            Reason::QHatZeroOrNegative(q) => write!(f, "{verdict}: q̂ = {q} <= 0"),
            Reason::QHatOne => write!(f, "{verdict}: q̂ = 1"),
        }
    }
}

/// Classifies a three-variable integer grading.
pub fn classify(g: &Grading) -> Result<Classification> {
    let normalized = normalize(g)?;
    let tame = |reason| Classification {
        verdict: Verdict::TameOnly,
        reason,
        normalized: normalized.clone(),
    };
    let out = match normalized.pattern() {
        WeightPattern::Trivial => Classification {
            verdict: Verdict::WildAdmitting,
            reason: Reason::TrivialGrading,
            normalized: normalized.clone(),
        },
        WeightPattern::Positive if normalized.sign_flipped() => tame(Reason::AllNegative),
        WeightPattern::Positive => tame(Reason::AllPositive),
        WeightPattern::Zero(sub) => tame(Reason::ZeroWeightCase(sub)),
        WeightPattern::Mixed => {
            let (a, b, c) = (normalized.a(), normalized.b(), normalized.c());
            if b % a.gcd(&c) != 0 {
                tame(Reason::GcdObstruction)
            } else if a % b.gcd(&c) != 0 {
                tame(Reason::SymmetricGcdObstruction)
            } else {
                let q = q_hat(a, b, c)?;
                match q {
                    q if q >= 2 => Classification {
                        verdict: Verdict::WildAdmitting,
                        reason: Reason::QHatAtLeastTwo {
                            q_hat: q,
                            p: (a - q * b) / c,
                            q,
                        },
                        normalized: normalized.clone(),
                    },
                    1 => tame(Reason::QHatOne),
                    q => tame(Reason::QHatZeroOrNegative(q)),
                }
            }
        }
    };
    Ok(out)
}

/// Inverse of `x` modulo `m` (`0` when `m == 1`).
fn mod_inverse(x: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = x.mod_floor(&m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.mod_floor(&m))
}

fn check_positive(a: i64, b: i64, c: i64) -> Result<()> {
    if a > 0 && b > 0 && c > 0 {
        Ok(())
    } else {
        Err(Error::GcdPrecondition(format!(
            "expected positive a, b, c, got ({a}, {b}, {c})"
        )))
    }
}

/// `max { q : b q = a (mod c), b q < a }`.
pub fn q_hat(a: i64, b: i64, c: i64) -> Result<i64> {
    check_positive(a, b, c)?;
    let inv =
        mod_inverse(b, c).ok_or_else(|| Error::GcdPrecondition(format!("gcd({b}, {c}) != 1")))?;
    let q0 = (a * inv).mod_floor(&c);
    let top = Integer::div_floor(&(a - 1), &b);
    Ok(top - (top - q0).mod_floor(&c))
}

/// Minimal `l >= 1` with `a l = b (mod c)`.
pub fn l_hat(a: i64, b: i64, c: i64) -> Result<i64> {
    check_positive(a, b, c)?;
    let inv =
        mod_inverse(a, c).ok_or_else(|| Error::GcdPrecondition(format!("gcd({a}, {c}) != 1")))?;
    let l0 = (b * inv).mod_floor(&c);
    Ok(if l0 == 0 { c } else { l0 })
}

/// Normalized grading with `a, b, c > 0` and `gcd(a,c) = gcd(b,c) = 1`.
fn mixed_coprime(g: &Grading) -> Result<NormalizedGrading> {
    let n = normalize(g)?;
    check_mixed(&n)?;
    Ok(n)
}

fn check_mixed(n: &NormalizedGrading) -> Result<()> {
    if n.pattern() != WeightPattern::Mixed {
        return Err(Error::GcdPrecondition(format!(
            "weights {:?} are not of the form (a, b, -c) with a, b, c > 0",
            n.weights()
        )));
    }
    let (a, b, c) = (n.a(), n.b(), n.c());
    if a.gcd(&c) != 1 || b.gcd(&c) != 1 {
        return Err(Error::GcdPrecondition(format!(
            "need gcd(a, c) = gcd(b, c) = 1 for (a, b, c) = ({a}, {b}, {c})"
        )));
    }
    Ok(())
}

/// Splits `m = compose(tau, e)` with `tau = (x, y, lambda z)` and `e` fixing `z`.
///
/// The grading must give the third variable a negative weight.
pub fn split_et<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<(PolyMap<S>, PolyMap<S>)> {
    if m.arity() != 3 || g.arity() != 3 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    if !g.is_integer() || g.weights()[2] >= 0 {
        return Err(Error::WrongGradingKind("the third weight must be negative"));
    }
    let third = m.coord(2);
    let lambda = third.coeff(&Monomial::var(2));
    if lambda.is_zero() || third.len() != 1 {
        return Err(Error::ThirdCoordinateNotScalar);
    }
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let tau = diagonal(&[S::one(), S::one(), lambda]);
    let e = PolyMap::new(vec![
        m.coord(0).clone(),
        m.coord(1).clone(),
        Polynomial::var(3, 2),
    ])?;
    Ok((tau, e))
}

fn diagonal<S: Scalar>(entries: &[S]) -> PolyMap<S> {
    let n = entries.len();
    let matrix: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        entries[i].clone()
                    } else {
                        S::zero()
                    }
                })
                .collect()
        })
        .collect();
    linear_map(&matrix)
}

/// Restriction to the plane `z = 1`: `(f, g, z) -> (f(u, v, 1), g(u, v, 1))`.
pub fn restrict_alpha<S: Scalar>(e: &PolyMap<S>) -> Result<PolyMap<S>> {
    if e.arity() != 3 {
        return Err(Error::UnsupportedArity(e.arity()));
    }
    if *e.coord(2) != Polynomial::var(3, 2) {
        return Err(Error::NotInE);
    }
    let images = [
        Polynomial::var(2, 0),
        Polynomial::var(2, 1),
        Polynomial::one(2),
    ];
    PolyMap::new(vec![
        e.coord(0).substitute(&images)?,
        e.coord(1).substitute(&images)?,
    ])
}

/// Why a graded plane map has no preimage under restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiftObstruction {
    /// The first coordinate contains `v^q` with `b q < a`.
    LowMonomial { q: u32 },
    /// The second coordinate has a nonzero constant term.
    FreeTerm,
}

impl fmt::Display for LiftObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftObstruction::LowMonomial { q } => {
                write!(f, "first coordinate contains v^{q} of too low degree")
            }
            LiftObstruction::FreeTerm => f.write_str("second coordinate has a free term"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport<S: Scalar> {
    pub liftable: bool,
    pub obstruction: Option<LiftObstruction>,
    pub lifted: Option<PolyMap<S>>,
}

/// Decides liftability of a plane map graded by the residue grading of `g`
/// and builds the lift when it exists.
pub fn lift_report<S: Scalar>(pm: &PolyMap<S>, g: &NormalizedGrading) -> Result<LiftReport<S>> {
    check_mixed(g)?;
    if pm.arity() != 2 {
        return Err(Error::UnsupportedArity(pm.arity()));
    }
    if !is_graded_map(pm, &residue_grading(g)?) {
        return Err(Error::NotGradedPlane);
    }
    let (a, b, c) = (g.a(), g.b(), g.c());
    let low = pm
        .coord(0)
        .terms()
        .filter(|(m, _)| m.exponent(0) == 0 && b * i64::from(m.exponent(1)) < a)
        .map(|(m, _)| m.exponent(1))
        .min();
    let obstruction = match low {
        Some(q) => Some(LiftObstruction::LowMonomial { q }),
        None if !pm.coord(1).constant_term().is_zero() => Some(LiftObstruction::FreeTerm),
        None => None,
    };
    if obstruction.is_some() {
        return Ok(LiftReport {
            liftable: false,
            obstruction,
            lifted: None,
        });
    }
    let lifted = PolyMap::new(vec![
        lift_coordinate(pm.coord(0), a, b, c, a)?,
        lift_coordinate(pm.coord(1), a, b, c, b)?,
        Polynomial::var(3, 2),
    ])?;
    Ok(LiftReport {
        liftable: true,
        obstruction: None,
        lifted: Some(lifted),
    })
}

/// `u^p v^q -> x^p y^q z^t` with `t = (a p + b q - degree) / c`.
fn lift_coordinate<S: Scalar>(
    p: &Polynomial<S>,
    a: i64,
    b: i64,
    c: i64,
    degree: i64,
) -> Result<Polynomial<S>> {
    let mut terms = Vec::with_capacity(p.len());
    for (m, coef) in p.terms() {
        let (i, j) = (m.exponent(0), m.exponent(1));
        let num = a * i64::from(i) + b * i64::from(j) - degree;
        if num < 0 || num % c != 0 {
            return Err(Error::Invariant(format!(
                "monomial u^{i} v^{j} has no lift of degree {degree}"
            )));
        }
        let t =
            u32::try_from(num / c).map_err(|_| Error::Invariant("z exponent overflow".into()))?;
        terms.push((Monomial::new(&[i, j, t]), coef.clone()));
    }
    Ok(Polynomial::from_terms(3, terms))
}

/// The preimage under restriction, or `NotLiftable` with the obstruction.
pub fn lift_alpha_inverse<S: Scalar>(pm: &PolyMap<S>, g: &NormalizedGrading) -> Result<PolyMap<S>> {
    let report = lift_report(pm, g)?;
    match (report.lifted, report.obstruction) {
        (Some(m), _) => Ok(m),
        (None, Some(o)) => Err(Error::NotLiftable(o)),
        (None, None) => Err(Error::Invariant("lift report without result".into())),
    }
}

/// The plane construction behind a wild witness:
/// `epsilon = tau^-1 . phi . tau` with `tau = (u + v^q_hat, v)` and
/// `phi = (u, v + u^l_hat)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWitness<S: Scalar> {
    pub tau: PolyMap<S>,
    pub tau_inverse: PolyMap<S>,
    pub phi: PolyMap<S>,
    pub phi_inverse: PolyMap<S>,
    pub epsilon: PolyMap<S>,
    pub epsilon_inverse: PolyMap<S>,
}

impl<S: Scalar> PlaneWitness<S> {
    /// Exact check that `epsilon` and `epsilon_inverse` are mutually inverse,
    /// composing one small factor at a time.
    pub fn verify_factored(&self) -> Result<bool> {
        let mut acc = self.epsilon.clone();
        for f in [&self.tau_inverse, &self.phi_inverse, &self.tau] {
            acc = compose(&acc, f)?;
        }
        if !acc.is_identity() {
            return Ok(false);
        }
        let mut acc = self.epsilon_inverse.clone();
        for f in [&self.tau_inverse, &self.phi, &self.tau] {
            acc = compose(&acc, f)?;
        }
        Ok(acc.is_identity())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WildWitness<S: Scalar> {
    /// Witness in the caller's coordinates.
    pub map: PolyMap<S>,
    pub inverse: PolyMap<S>,
    pub grading: Grading,
    pub q_hat: Option<i64>,
    pub l_hat: Option<i64>,
    /// Set for the trivial grading, where the witness is Nagata's map and
    /// its wildness rests on an external theorem.
    pub externally_certified: bool,
    /// Plane data in normalized coordinates; absent for the trivial grading.
    pub plane: Option<PlaneWitness<S>>,
}

impl<S: Scalar> WildWitness<S> {
    pub fn describe(&self) -> String {
        match (self.q_hat, self.l_hat) {
            (Some(q), Some(l)) => format!(
                "wild witness for weights {:?}: tau = (u + v^{q}, v), phi = (u, v + u^{l})",
                self.grading.weights()
            ),
            _ => "Nagata's automorphism (wild by the Shestakov-Umirbaev theorem)".into(),
        }
    }

    /// Exact inverse check. With plane data the check runs on the
    /// restriction, which is injective on maps fixing `z`; both lifts fix
    /// `z` and are graded, so this settles the three-variable identity.
    pub fn verify_inverse(&self) -> Result<bool> {
        match &self.plane {
            Some(plane) => {
                let lifted_ok = restrict_alpha(&self.normalized_map()?)? == plane.epsilon
                    && restrict_alpha(&self.normalized_inverse()?)? == plane.epsilon_inverse;
                Ok(lifted_ok && plane.verify_factored()?)
            }
            None => crate::automorphism::verify_inverse_pair(&self.map, &self.inverse),
        }
    }

    fn normalized_map(&self) -> Result<PolyMap<S>> {
        Ok(normalize(&self.grading)?.to_normalized(&self.map))
    }

    fn normalized_inverse(&self) -> Result<PolyMap<S>> {
        Ok(normalize(&self.grading)?.to_normalized(&self.inverse))
    }
}

/// Builds the explicit graded-wild automorphism for a wild-admitting grading.
pub fn wild_witness<S: Scalar>(g: &Grading) -> Result<WildWitness<S>> {
    let class = classify(g)?;
    match class.reason {
        Reason::TrivialGrading => {
            return Ok(WildWitness {
                map: nagata(),
                inverse: nagata_inverse(),
                grading: g.clone(),
                q_hat: None,
                l_hat: None,
                externally_certified: true,
                plane: None,
            })
        }
        Reason::QHatAtLeastTwo { .. } => {}
        _ => return Err(Error::NotWildAdmitting),
    }
    let n = &class.normalized;
    let (a, b, c) = (n.a(), n.b(), n.c());
    let qh = q_hat(a, b, c)?;
    let lh = l_hat(a, b, c)?;
    let (qe, le) = (qh as u32, lh as u32);
    let u = Polynomial::<S>::var(2, 0);
    let v = Polynomial::<S>::var(2, 1);
    let v_q = Polynomial::monomial(2, &[0, qe], S::one());
    let u_l = Polynomial::monomial(2, &[le, 0], S::one());
    let tau = PolyMap::new(vec![&u + &v_q, v.clone()])?;
    let tau_inverse = PolyMap::new(vec![&u - &v_q, v.clone()])?;
    let phi = PolyMap::new(vec![u.clone(), &v + &u_l])?;
    let phi_inverse = PolyMap::new(vec![u.clone(), &v - &u_l])?;
    let epsilon = compose(&tau_inverse, &compose(&phi, &tau)?)?;
    let epsilon_inverse = compose(&tau_inverse, &compose(&phi_inverse, &tau)?)?;
    check_epsilon_shape(&epsilon, qe, le)?;
    let lifted = lift_alpha_inverse(&epsilon, n)
        .map_err(|e| Error::LiftFailure(format!("witness does not lift: {e}")))?;
    let lifted_inverse = lift_alpha_inverse(&epsilon_inverse, n)
        .map_err(|e| Error::LiftFailure(format!("witness inverse does not lift: {e}")))?;
    Ok(WildWitness {
        map: n.to_original(&lifted),
        inverse: n.to_original(&lifted_inverse),
        grading: g.clone(),
        q_hat: Some(qh),
        l_hat: Some(lh),
        externally_certified: false,
        plane: Some(PlaneWitness {
            tau,
            tau_inverse,
            phi,
            phi_inverse,
            epsilon,
            epsilon_inverse,
        }),
    })
}

/// `epsilon(u) = u - q v^(q-1) u^l + F` with every term of `F` of total
/// degree at least `q + l` (at least `q` when `l = 1`, where further terms
/// of degree `q` occur).
fn check_epsilon_shape<S: Scalar>(epsilon: &PolyMap<S>, q: u32, l: u32) -> Result<()> {
    let u = Polynomial::<S>::var(2, 0);
    let lead_mono = Monomial::new(&[l, q - 1]);
    let lead = epsilon.coord(0).coeff(&lead_mono);
    let expected = -S::from_u32(q).expect("small integer");
    if lead != expected {
        return Err(Error::Invariant(format!(
            "coefficient of v^{}u^{l} is {lead}, expected {expected}",
            q - 1
        )));
    }
    let rest = (epsilon.coord(0) - &u).filter_terms(|m| *m != lead_mono);
    let floor = if l >= 2 { q + l } else { q };
    match rest.min_total_degree() {
        Some(d) if d < u64::from(floor) => Err(Error::Invariant(format!(
            "remainder has a term of degree {d} below {floor}"
        ))),
        _ => Ok(()),
    }
}

/// Outcome of the wildness test on the restricted first coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<S: Scalar> {
    /// A term of `G` has total degree below `bound = q_hat + c`.
    CertifiedWild {
        coefficient: S,
        exponents: (u32, u32),
        degree: u64,
        bound: i64,
    },
    Inconclusive {
        bound: i64,
    },
}

impl<S: Scalar> Certificate<S> {
    pub fn is_wild(&self) -> bool {
        matches!(self, Certificate::CertifiedWild { .. })
    }
}

impl<S: Scalar> fmt::Display for Certificate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::CertifiedWild {
                coefficient,
                exponents: (i, j),
                degree,
                bound,
            } => {
                let term = Polynomial::monomial(2, &[*i, *j], coefficient.clone());
                write!(
                    f,
                    "CertifiedWild: term {} of degree {degree} < {bound}",
                    term.fmt_with(&["u", "v"])
                )
            }
            Certificate::Inconclusive { bound } => {
                write!(f, "Inconclusive: every term has degree >= {bound}")
            }
        }
    }
}

/// Sound but incomplete test for graded-wildness of a graded automorphism.
pub fn wildness_certificate<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<Certificate<S>> {
    if m.arity() != 3 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    let n = mixed_coprime(g)?;
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let nm = n.to_normalized(m);
    let (_, e) = split_et(&nm, &n.grading())?;
    let plane = restrict_alpha(&e)?;
    certificate_for_plane(&plane, &n)
}

fn certificate_for_plane<S: Scalar>(
    plane: &PolyMap<S>,
    n: &NormalizedGrading,
) -> Result<Certificate<S>> {
    let bound = q_hat(n.a(), n.b(), n.c())? + n.c();
    let u_mono = Monomial::var(0);
    let g = plane.coord(0).filter_terms(|m| *m != u_mono);
    let lowest = g
        .terms()
        .min_by_key(|(m, _)| m.total_degree())
        .map(|(m, c)| (*m, c.clone()));
    Ok(match lowest {
        Some((mono, coefficient)) if (mono.total_degree() as i64) < bound => {
            Certificate::CertifiedWild {
                coefficient,
                exponents: (mono.exponent(0), mono.exponent(1)),
                degree: mono.total_degree(),
                bound,
            }
        }
        _ => Certificate::Inconclusive { bound },
    })
}

/// Result of [`decompose_graded`].
#[derive(Debug, Clone, PartialEq)]
pub enum GradedOutcome<S: Scalar> {
    Tame(FactorChain<S>),
    CertifiedWild(Certificate<S>),
}

/// Routes a graded automorphism to the decomposition for its grading.
pub fn decompose_graded<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<GradedOutcome<S>> {
    if m.arity() != 3 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let class = classify(g)?;
    let n = &class.normalized;
    let chain = match class.reason {
        Reason::TrivialGrading => {
            return Err(Error::WildAdmittingUndecided(
                "no decomposition procedure for the trivial grading".into(),
            ))
        }
        Reason::AllPositive | Reason::AllNegative => decompose_positive(m, g)?,
        Reason::ZeroWeightCase(_) => decompose_zero_cases(m, g)?,
        Reason::GcdObstruction => {
            let nm = n.to_normalized(m);
            to_original_chain(&decompose_triangular(&nm, 0)?, n)
        }
        Reason::SymmetricGcdObstruction => {
            let nm = n.to_normalized(m);
            to_original_chain(&decompose_triangular(&nm, 1)?, n)
        }
        Reason::QHatZeroOrNegative(_) | Reason::QHatOne => decompose_qhat_low(m, g)?,
        Reason::QHatAtLeastTwo { .. } => {
            let cert = wildness_certificate(m, g)?;
            if cert.is_wild() {
                return Ok(GradedOutcome::CertifiedWild(cert));
            }
            match qhat_pipeline(m, g, false) {
                Ok(chain) => chain,
                Err(Error::LiftFailure(msg)) => return Err(Error::WildAdmittingUndecided(msg)),
                Err(other) => return Err(other),
            }
        }
    };
    check_chain(&chain, m, g)?;
    Ok(GradedOutcome::Tame(chain))
}

fn check_chain<S: Scalar>(chain: &FactorChain<S>, m: &PolyMap<S>, g: &Grading) -> Result<()> {
    if let Some(i) = chain.iter().position(|f| !is_graded_map(&f.map, g)) {
        return Err(Error::Invariant(format!("factor {i} is not graded")));
    }
    if chain.compose_all() != *m {
        return Err(Error::Invariant(
            "chain does not recompose to the input".into(),
        ));
    }
    Ok(())
}

fn to_original_chain<S: Scalar>(chain: &FactorChain<S>, n: &NormalizedGrading) -> FactorChain<S> {
    chain.map_factors(|m| n.to_original(m))
}

/// Level-by-level decomposition for gradings whose weights share one sign.
pub fn decompose_positive<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<FactorChain<S>> {
    let n = m.arity();
    if g.arity() != n || !g.is_integer() {
        return Err(Error::WrongGradingKind("integer weights, one per variable"));
    }
    let w = g.weights();
    let sign = if w.iter().all(|&x| x > 0) {
        1
    } else if w.iter().all(|&x| x < 0) {
        -1
    } else {
        return Err(Error::WrongGradingKind("all weights must share a sign"));
    };
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let weight: Vec<i64> = w.iter().map(|x| sign * x).collect();
    let mut levels: Vec<i64> = weight.clone();
    levels.sort_unstable();
    levels.dedup();
    let mut linears = FactorChain::new(n);
    let mut elementaries = FactorChain::new(n);
    for &level in &levels {
        let vars: Vec<usize> = (0..n).filter(|&i| weight[i] == level).collect();
        let block: Vec<Vec<S>> = vars
            .iter()
            .map(|&i| {
                vars.iter()
                    .map(|&j| m.coord(i).coeff(&Monomial::var(j)))
                    .collect()
            })
            .collect();
        let inverse = matrix_inverse(&block).ok_or_else(|| {
            Error::NotAnAutomorphism(format!("singular linear block at weight {level}"))
        })?;
        let lower: Vec<Polynomial<S>> = vars
            .iter()
            .map(|&i| {
                m.coord(i)
                    .filter_terms(|mono| !vars.iter().any(|&j| *mono == Monomial::var(j)))
            })
            .collect();
        for p in &lower {
            if (0..n).any(|j| weight[j] >= level && p.involves(j)) {
                return Err(Error::NotAnAutomorphism(format!(
                    "weight {level} coordinate involves variables of weight >= {level}"
                )));
            }
        }
        let mut full: Vec<Vec<S>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        for (r, &i) in vars.iter().enumerate() {
            for (s, &j) in vars.iter().enumerate() {
                full[i][j] = block[r][s].clone();
            }
        }
        linears.push_map(linear_map(&full), Provenance::LevelLinear(sign * level));
        for (r, &i) in vars.iter().enumerate() {
            let addend = vars
                .iter()
                .enumerate()
                .fold(Polynomial::zero(n), |acc, (s, _)| {
                    &acc + &lower[s].scale(&inverse[r][s])
                });
            if !addend.is_zero() {
                elementaries.push_map(
                    elementary_map(n, i, addend),
                    Provenance::LevelElementary(sign * level),
                );
            }
        }
    }
    linears.extend(elementaries);
    check_chain(&linears, m, g)?;
    Ok(linears)
}

/// Coordinate `index` is `mu x_index + F(others)`, every other coordinate
/// is `s_j x_j + t_j`; emits an affine and an elementary factor.
fn decompose_triangular<S: Scalar>(m: &PolyMap<S>, index: usize) -> Result<FactorChain<S>> {
    let n = m.arity();
    let mut matrix = vec![vec![S::zero(); n]; n];
    let mut shift = vec![S::zero(); n];
    for j in (0..n).filter(|&j| j != index) {
        let c = m.coord(j);
        let s = c.coeff(&Monomial::var(j));
        let t = c.constant_term();
        let ok = !s.is_zero()
            && c.terms()
                .all(|(mono, _)| *mono == Monomial::var(j) || mono.is_one());
        if !ok {
            return Err(Error::NotAnAutomorphism(format!(
                "coordinate {j} is not an affine scaling of its variable"
            )));
        }
        matrix[j][j] = s;
        shift[j] = t;
    }
    let f = m.coord(index);
    let mu = f.coeff(&Monomial::var(index));
    let rest = f.filter_terms(|mono| *mono != Monomial::var(index));
    if mu.is_zero() || rest.involves(index) {
        return Err(Error::NotAnAutomorphism(format!(
            "coordinate {index} is not triangular in its variable"
        )));
    }
    matrix[index][index] = mu.clone();
    shift[index] = rest.constant_term();
    let addend = (&rest - &Polynomial::constant(n, rest.constant_term())).scale(&(S::one() / mu));
    let mut chain = FactorChain::new(n);
    chain.push_map(affine_map(&matrix, &shift), Provenance::BaseAffine);
    chain.push_map(elementary_map(n, index, addend), Provenance::BaseElementary);
    Ok(chain)
}

/// Decomposition for gradings with a zero weight (but not all zero).
pub fn decompose_zero_cases<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<FactorChain<S>> {
    if m.arity() != 3 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    let n = normalize(g)?;
    let WeightPattern::Zero(sub) = n.pattern() else {
        return Err(Error::WrongGradingKind(
            "grading has no zero-weight pattern",
        ));
    };
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let nm = n.to_normalized(m);
    let chain = match sub {
        ZeroSubcase::CZeroUnequal => decompose_triangular(&nm, 0)?,
        ZeroSubcase::BZero => decompose_triangular(&nm, 1)?,
        ZeroSubcase::BAndCZero => decompose_invariant_plane(&nm)?,
        ZeroSubcase::CZeroEqual => decompose_euclid(&nm)?,
    };
    let chain = to_original_chain(&chain, &n);
    check_chain(&chain, m, g)?;
    Ok(chain)
}

/// `(lambda x, g(y, z), h(y, z))`: a scaling times an embedded plane map.
fn decompose_invariant_plane<S: Scalar>(m: &PolyMap<S>) -> Result<FactorChain<S>> {
    let lambda = m.coord(0).coeff(&Monomial::var(0));
    if lambda.is_zero() || m.coord(0).len() != 1 {
        return Err(Error::NotAnAutomorphism(
            "x is not mapped to a multiple of x".into(),
        ));
    }
    if m.coord(1).involves(0) || m.coord(2).involves(0) {
        return Err(Error::NotAnAutomorphism("y or z image depends on x".into()));
    }
    let down = [
        Polynomial::zero(2),
        Polynomial::var(2, 0),
        Polynomial::var(2, 1),
    ];
    let plane = PolyMap::new(vec![
        m.coord(1).substitute(&down)?,
        m.coord(2).substitute(&down)?,
    ])?;
    let up = [Polynomial::var(3, 1), Polynomial::var(3, 2)];
    let mut chain = FactorChain::new(3);
    chain.push_map(
        diagonal(&[lambda, S::one(), S::one()]),
        Provenance::BaseAffine,
    );
    for factor in decompose_plane(&plane)?.into_factors() {
        let lifted = PolyMap::new(vec![
            Polynomial::var(3, 0),
            factor.map.coord(0).substitute(&up)?,
            factor.map.coord(1).substitute(&up)?,
        ])?;
        chain.push_map(lifted, Provenance::Embedded(Box::new(factor.provenance)));
    }
    Ok(chain)
}

/// Dense coefficients (index = power of `z`) of the `x_var`-coefficient of `p`.
fn z_coefficients<S: Scalar>(p: &Polynomial<S>, var: usize) -> Result<Vec<S>> {
    let mut out: Vec<S> = Vec::new();
    for (m, c) in p.terms() {
        if m.exponent(var) == 1 && m.exponent(1 - var) == 0 {
            let k = m.exponent(2) as usize;
            if out.len() <= k {
                out.resize(k + 1, S::zero());
            }
            out[k] = c.clone();
        } else if m.exponent(0) + m.exponent(1) != 1 {
            return Err(Error::NotAnAutomorphism(
                "coordinate is not linear in x and y".into(),
            ));
        }
    }
    trim(&mut out);
    Ok(out)
}

fn trim<S: Scalar>(p: &mut Vec<S>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn uni_to_poly<S: Scalar>(p: &[S], times: Option<usize>) -> Polynomial<S> {
    let terms = p.iter().enumerate().map(|(k, c)| {
        let mut e = [0u32; 3];
        e[2] = k as u32;
        if let Some(v) = times {
            e[v] = 1;
        }
        (Monomial::new(&e), c.clone())
    });
    Polynomial::from_terms(3, terms)
}

/// Quotient of univariate polynomial division.
fn uni_div<S: Scalar>(num: &[S], den: &[S]) -> Vec<S> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1].clone();
    if rem.len() < dl {
        return Vec::new();
    }
    let mut quot = vec![S::zero(); rem.len() - dl + 1];
    for k in (0..quot.len()).rev() {
        let coef = rem[k + dl - 1].clone() / lead.clone();
        if coef.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] = rem[k + i].clone() - coef.clone() * d.clone();
        }
        quot[k] = coef;
    }
    trim(&mut quot);
    quot
}

/// `(A x + B y, C x + D y, kappa z + mu)` with `A, B, C, D` in `K[z]`.
fn decompose_euclid<S: Scalar>(m: &PolyMap<S>) -> Result<FactorChain<S>> {
    let third = m.coord(2);
    let kappa = third.coeff(&Monomial::var(2));
    let mu = third.constant_term();
    let affine_z = third
        .terms()
        .all(|(mono, _)| *mono == Monomial::var(2) || mono.is_one());
    if kappa.is_zero() || !affine_z {
        return Err(Error::NotAnAutomorphism(
            "z is not mapped to an affine function of z".into(),
        ));
    }
    // rho = (x, y, (z - mu) / kappa); m = compose(compose(m, rho), rho^-1)
    let rho = affine_map(
        &[
            vec![S::one(), S::zero(), S::zero()],
            vec![S::zero(), S::one(), S::zero()],
            vec![S::zero(), S::zero(), S::one() / kappa.clone()],
        ],
        &[S::zero(), S::zero(), -mu.clone() / kappa.clone()],
    );
    let rho_inverse = affine_map(
        &[
            vec![S::one(), S::zero(), S::zero()],
            vec![S::zero(), S::one(), S::zero()],
            vec![S::zero(), S::zero(), kappa],
        ],
        &[S::zero(), S::zero(), mu],
    );
    let w = compose(m, &rho)?;
    let mut a = z_coefficients(w.coord(0), 0)?;
    let mut b = z_coefficients(w.coord(0), 1)?;
    let mut c = z_coefficients(w.coord(1), 0)?;
    let mut d = z_coefficients(w.coord(1), 1)?;
    let det = sub_uni(&mul_uni(&a, &d), &mul_uni(&b, &c));
    if det.len() != 1 {
        return Err(Error::NotAnAutomorphism(
            "determinant of the linear part is not a nonzero constant".into(),
        ));
    }
    let mut chain = FactorChain::new(3);
    let mut step = 0;
    while !c.is_empty() {
        // row0 -= q row1 is undone by (x + y q, y, z); row1 -= q row0 by (x, y + x q, z)
        let reduce_top = !a.is_empty() && a.len() > c.len();
        if reduce_top || a.is_empty() {
            let q = if a.is_empty() {
                vec![-S::one()]
            } else {
                uni_div(&a, &c)
            };
            a = sub_uni(&a, &mul_uni(&q, &c));
            b = sub_uni(&b, &mul_uni(&q, &d));
            let undo = elementary_map(3, 0, uni_to_poly(&q, Some(1)));
            chain.push_map(undo, Provenance::EuclidStep(step));
        } else {
            let q = uni_div(&c, &a);
            c = sub_uni(&c, &mul_uni(&q, &a));
            d = sub_uni(&d, &mul_uni(&q, &b));
            let undo = elementary_map(3, 1, uni_to_poly(&q, Some(0)));
            chain.push_map(undo, Provenance::EuclidStep(step));
        }
        step += 1;
    }
    // now (a0 x + B y, d0 y, z) with constants a0, d0
    if a.len() != 1 || d.len() != 1 {
        return Err(Error::Invariant(
            "Euclid did not reach a triangular form".into(),
        ));
    }
    let a0 = a[0].clone();
    let finish = diagonal(&[a0.clone(), d[0].clone(), S::one()]);
    let inv_a0 = S::one() / a0;
    let scaled: Vec<S> = b.iter().map(|x| x.clone() * inv_a0.clone()).collect();
    let top = elementary_map(3, 0, uni_to_poly(&scaled, Some(1)));
    chain.push_map(finish, Provenance::BaseAffine);
    chain.push_map(top, Provenance::BaseElementary);
    chain.push_map(rho_inverse, Provenance::Normalization);
    Ok(chain)
}

fn mul_uni<S: Scalar>(p: &[S], q: &[S]) -> Vec<S> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![S::zero(); p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

fn sub_uni<S: Scalar>(p: &[S], q: &[S]) -> Vec<S> {
    let n = p.len().max(q.len());
    let mut out: Vec<S> = (0..n)
        .map(|i| {
            let x = p.get(i).cloned().unwrap_or_else(S::zero);
            let y = q.get(i).cloned().unwrap_or_else(S::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// One factor of a plane chain in the rewriting procedure.
#[derive(Clone, Debug)]
enum Piece<S: Scalar> {
    Linear([[S; 2]; 2]),
    /// `(u + f(v), v)`, `f` stored as a plane polynomial in `v`.
    ElemU(Polynomial<S>),
    /// `(u, v + f(u))`.
    ElemV(Polynomial<S>),
}

fn mat_mul<S: Scalar>(p: &[[S; 2]; 2], q: &[[S; 2]; 2]) -> [[S; 2]; 2] {
    let e =
        |i: usize, j: usize| p[i][0].clone() * q[0][j].clone() + p[i][1].clone() * q[1][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn mat<S: Scalar>(a: S, b: S, c: S, d: S) -> [[S; 2]; 2] {
    [[a, b], [c, d]]
}

fn identity2<S: Scalar>() -> [[S; 2]; 2] {
    mat(S::one(), S::zero(), S::zero(), S::one())
}

fn swap_uv<S: Scalar>(f: &Polynomial<S>) -> Polynomial<S> {
    f.substitute(&[Polynomial::var(2, 1), Polynomial::var(2, 0)])
        .expect("plane polynomial")
}

impl<S: Scalar> Piece<S> {
    fn from_map(m: &PolyMap<S>, index: usize) -> Result<Vec<Piece<S>>> {
        if !m.preserves_origin() {
            return Err(Error::NotGradedChain(index));
        }
        Ok(match classify_map(m) {
            MapClass::Identity => vec![],
            MapClass::Linear { matrix } => vec![Piece::Linear(mat(
                matrix[0][0].clone(),
                matrix[0][1].clone(),
                matrix[1][0].clone(),
                matrix[1][1].clone(),
            ))],
            MapClass::Elementary {
                index: var,
                scale,
                addend,
            } => {
                let scaled = addend.scale(&(S::one() / scale.clone()));
                let (diag, elem) = if var == 0 {
                    (
                        mat(scale, S::zero(), S::zero(), S::one()),
                        Piece::ElemU(scaled),
                    )
                } else {
                    (
                        mat(S::one(), S::zero(), S::zero(), scale),
                        Piece::ElemV(scaled),
                    )
                };
                vec![Piece::Linear(diag), elem]
            }
            _ => return Err(Error::NotGradedChain(index)),
        })
    }

    fn to_map(&self) -> PolyMap<S> {
        match self {
            Piece::Linear(m) => linear_map(&[m[0].to_vec(), m[1].to_vec()]),
            Piece::ElemU(f) => elementary_map(2, 0, f.clone()),
            Piece::ElemV(f) => elementary_map(2, 1, f.clone()),
        }
    }
}

/// Rewrites a chain of graded plane factors so that every factor lifts,
/// for gradings with `q_hat = 1`.
pub fn rewrite_liftable_chain<S: Scalar>(
    chain: &FactorChain<S>,
    g: &NormalizedGrading,
) -> Result<FactorChain<S>> {
    check_mixed(g)?;
    let qh = q_hat(g.a(), g.b(), g.c())?;
    if qh != 1 {
        return Err(Error::QHatNotOne(qh));
    }
    if chain.arity() != 2 {
        return Err(Error::UnsupportedArity(chain.arity()));
    }
    let residue = residue_grading(g)?;
    let mut raw = Vec::new();
    for (i, f) in chain.iter().enumerate() {
        if !is_graded_map(&f.map, &residue) {
            return Err(Error::NotGradedChain(i));
        }
        raw.extend(Piece::from_map(&f.map, i)?);
    }
    let mut pieces = alternate(raw);
    let mut i = 0;
    while i < pieces.len() {
        match pieces[i].clone() {
            Piece::Linear(l) if !l[0][1].is_zero() && i + 2 < pieces.len() => {
                let (z2, z1, z0) = move_linear_past_elementary(&l, &pieces[i + 1]);
                let Piece::Linear(next) = &pieces[i + 2] else {
                    unreachable!("pieces alternate");
                };
                let merged = mat_mul(&z0, next);
                pieces[i] = Piece::Linear(z2);
                pieces[i + 1] = z1;
                pieces[i + 2] = Piece::Linear(merged);
            }
            Piece::ElemU(f) => {
                let beta = f.coeff(&Monomial::var(1));
                if !beta.is_zero() {
                    let stripped = f.filter_terms(|m| *m != Monomial::var(1));
                    let shear = mat(S::one(), beta, S::zero(), S::one());
                    let Piece::Linear(next) = &pieces[i + 1] else {
                        unreachable!("pieces alternate");
                    };
                    let merged = mat_mul(&shear, next);
                    pieces[i] = Piece::ElemU(stripped);
                    pieces[i + 1] = Piece::Linear(merged);
                }
            }
            _ => {}
        }
        i += 1;
    }
    let mut out = FactorChain::new(2);
    for p in &pieces {
        let map = p.to_map();
        if !is_graded_map(&map, &residue) {
            return Err(Error::Invariant("rewritten factor is not graded".into()));
        }
        out.push_map(map, Provenance::Rewritten);
    }
    if out.compose_all() != chain.compose_all() {
        return Err(Error::Invariant("rewriting changed the composition".into()));
    }
    Ok(out)
}

/// Merges neighbours and pads with identities so that pieces alternate
/// linear, elementary, linear, ..., linear.
fn alternate<S: Scalar>(raw: Vec<Piece<S>>) -> Vec<Piece<S>> {
    let mut out: Vec<Piece<S>> = vec![Piece::Linear(identity2())];
    for p in raw {
        let last = out.pop().expect("never empty");
        match (last, p) {
            (Piece::Linear(a), Piece::Linear(b)) => out.push(Piece::Linear(mat_mul(&a, &b))),
            (Piece::ElemU(f), Piece::ElemU(g)) => out.push(Piece::ElemU(&f + &g)),
            (Piece::ElemV(f), Piece::ElemV(g)) => out.push(Piece::ElemV(&f + &g)),
            (last @ Piece::Linear(_), p) => {
                out.push(last);
                out.push(p);
            }
            (last, p @ Piece::Linear(_)) => {
                out.push(last);
                out.push(p);
            }
            (last, p) => {
                out.push(last);
                out.push(Piece::Linear(identity2()));
                out.push(p);
            }
        }
    }
    if !matches!(out.last(), Some(Piece::Linear(_))) {
        out.push(Piece::Linear(identity2()));
    }
    out
}

/// Rewrites `L . E` (linear after elementary as point maps, `L` with a
/// nonzero `v` entry in its first row) as `Z2 . Z1 . Z0` with `Z2(u)` a
/// multiple of `u`.
fn move_linear_past_elementary<S: Scalar>(
    l: &[[S; 2]; 2],
    e: &Piece<S>,
) -> ([[S; 2]; 2], Piece<S>, [[S; 2]; 2]) {
    let [[a, b], [c, d]] = l.clone();
    if a.is_zero() {
        let swap = mat(S::zero(), S::one(), S::one(), S::zero());
        let theta2 = mat(b, S::zero(), d, c);
        let conjugated = match e {
            Piece::ElemU(f) => Piece::ElemV(swap_uv(f)),
            Piece::ElemV(f) => Piece::ElemU(swap_uv(f)),
            Piece::Linear(_) => unreachable!("pieces alternate"),
        };
        return (theta2, conjugated, swap);
    }
    let ratio = b.clone() / a.clone();
    let theta2 = mat(
        a.clone(),
        S::zero(),
        c.clone(),
        d - b.clone() * c / a.clone(),
    );
    match e {
        Piece::ElemU(f) => {
            let absorbed = f + &Polynomial::monomial(2, &[0, 1], ratio);
            (theta2, Piece::ElemU(absorbed), identity2())
        }
        Piece::ElemV(f) => {
            let inv_ratio = a / b;
            let eta2 = mat(S::one(), S::zero(), inv_ratio.clone(), -inv_ratio);
            let eta1 = Piece::ElemU(swap_uv(f).scale(&ratio));
            let eta0 = mat(S::one(), ratio, S::one(), S::zero());
            (mat_mul(&theta2, &eta2), eta1, eta0)
        }
        Piece::Linear(_) => unreachable!("pieces alternate"),
    }
}

/// Graded-tame decomposition for mixed gradings with `q_hat <= 1`.
pub fn decompose_qhat_low<S: Scalar>(m: &PolyMap<S>, g: &Grading) -> Result<FactorChain<S>> {
    let n = mixed_coprime(g)?;
    let qh = q_hat(n.a(), n.b(), n.c())?;
    if qh > 1 {
        return Err(Error::GcdPrecondition(format!("q_hat = {qh} exceeds 1")));
    }
    let chain = qhat_pipeline(m, g, qh == 1)?;
    check_chain(&chain, m, g)?;
    Ok(chain)
}

fn qhat_pipeline<S: Scalar>(m: &PolyMap<S>, g: &Grading, rewrite: bool) -> Result<FactorChain<S>> {
    if m.arity() != 3 {
        return Err(Error::UnsupportedArity(m.arity()));
    }
    let n = mixed_coprime(g)?;
    if !is_graded_map(m, g) {
        return Err(Error::NotGraded);
    }
    let nm = n.to_normalized(m);
    let (tau, e) = split_et(&nm, &n.grading())?;
    let plane = restrict_alpha(&e)?;
    let residue = residue_grading(&n)?;
    let mut plane_chain = decompose_plane_graded(&plane, &residue)?;
    if rewrite {
        plane_chain = rewrite_liftable_chain(&plane_chain, &n)?;
    }
    let mut chain = FactorChain::new(3);
    chain.push_map(tau, Provenance::Torus);
    for (i, f) in plane_chain.iter().enumerate() {
        let lifted = lift_alpha_inverse(&f.map, &n)
            .map_err(|err| Error::LiftFailure(format!("plane factor {i}: {err}")))?;
        chain.push(Factor::new(
            lifted,
            Provenance::Lifted(Box::new(f.provenance.clone())),
        ));
    }
    Ok(to_original_chain(&chain, &n))
}

/// Whether `a = q b + p c` for some `p >= 1`, `q >= 2`, by exhaustive search.
pub fn weight_split_search(a: i64, b: i64, c: i64) -> Option<(i64, i64)> {
    (2..=a / b.max(1)).find_map(|q| {
        let rest = a - q * b;
        (rest >= c && rest % c == 0).then_some((q, rest / c))
    })
}
