//! Newton polygons of plane polynomials and the top-edge analysis that
//! drives the Jung reduction.

use std::fmt::Write as _;

use num_integer::Integer;

use crate::arith::{Monomial, Polynomial, Scalar};
use crate::automorphism::{compose, elementary_map, PolyMap};
use crate::error::{Error, Result};
use crate::grading::{top_component, Grading};

/// Support, convex hull with the origin, and doubled area of a plane polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    support: Vec<(i64, i64)>,
    hull: Vec<(i64, i64)>,
    doubled_area: u64,
}

impl NewtonPolygon {
    /// Exponent pairs `(deg_x, deg_y)` of the nonzero terms.
    pub fn support(&self) -> &[(i64, i64)] {
        &self.support
    }

    /// Counterclockwise hull vertices starting at the origin.
    pub fn hull(&self) -> &[(i64, i64)] {
        &self.hull
    }

    /// Twice the area, so that it stays an integer.
    pub fn doubled_area(&self) -> u64 {
        self.doubled_area
    }

    pub fn area(&self) -> f64 {
        self.doubled_area as f64 / 2.0
    }

    /// Area as text, e.g. `2` or `5/2`.
    pub fn area_label(&self) -> String {
        if self.doubled_area.is_multiple_of(2) {
            (self.doubled_area / 2).to_string()
        } else {
            format!("{}/2", self.doubled_area)
        }
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; collinear points are dropped.
pub(crate) fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn shoelace_doubled(hull: &[(i64, i64)]) -> u64 {
    let n = hull.len();
    let sum: i64 = (0..n)
        .map(|i| {
            let (x0, y0) = hull[i];
            let (x1, y1) = hull[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum();
    sum.unsigned_abs()
}

pub fn newton_polygon<S: Scalar>(f: &Polynomial<S>) -> Result<NewtonPolygon> {
    if f.arity() != 2 {
        return Err(Error::UnsupportedArity(f.arity()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let support: Vec<(i64, i64)> = f
        .terms()
        .map(|(m, _)| (i64::from(m.exponent(0)), i64::from(m.exponent(1))))
        .collect();
    let mut points = support.clone();
    points.push((0, 0));
    let hull = convex_hull(&points);
    let doubled_area = shoelace_doubled(&hull);
    Ok(NewtonPolygon {
        support,
        hull,
        doubled_area,
    })
}

/// Why a top edge cannot belong to an automorphism coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// A hull vertex lies off both coordinate axes.
    VertexOffAxes(i64, i64),
    /// The reduced edge exponents are both above one.
    ExponentsAboveOne { p: u32, q: u32 },
    /// The top component is not `C (y^q - lambda x^p)^k`.
    NotPerfectPower,
}

impl std::fmt::Display for Obstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Obstruction::VertexOffAxes(i, j) => {
                write!(f, "hull vertex ({i}, {j}) lies off the axes")
            }
            Obstruction::ExponentsAboveOne { p, q } => {
                write!(f, "top edge exponents p = {p}, q = {q} are both above 1")
            }
            Obstruction::NotPerfectPower => {
                f.write_str("top component is not a power of a binomial y^q - lambda*x^p")
            }
        }
    }
}

/// Shape of the top edge of a Newton polygon.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeAnalysis<S: Scalar> {
    /// Support on the x-axis; `degree` is the largest exponent.
    MonomialX(u32),
    /// Support on the y-axis.
    MonomialY(u32),
    /// Top component equals `leading * (y^q - lambda * x^p)^k`.
    PerfectPower {
        p: u32,
        q: u32,
        lambda: S,
        k: u32,
        leading: S,
    },
    Obstructed(Obstruction),
}

pub fn analyze_top_edge<S: Scalar>(f: &Polynomial<S>) -> Result<EdgeAnalysis<S>> {
    let polygon = newton_polygon(f)?;
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    for &(i, j) in polygon.hull() {
        if i != 0 && j != 0 {
            return Ok(EdgeAnalysis::Obstructed(Obstruction::VertexOffAxes(i, j)));
        }
    }
    let big_p = polygon.hull().iter().map(|v| v.0).max().unwrap_or(0);
    let big_q = polygon.hull().iter().map(|v| v.1).max().unwrap_or(0);
    if big_q == 0 {
        return Ok(EdgeAnalysis::MonomialX(big_p as u32));
    }
    if big_p == 0 {
        return Ok(EdgeAnalysis::MonomialY(big_q as u32));
    }
    let g = big_p.gcd(&big_q);
    let (p, q, k) = ((big_p / g) as u32, (big_q / g) as u32, g as u32);
    if p > 1 && q > 1 {
        return Ok(EdgeAnalysis::Obstructed(Obstruction::ExponentsAboveOne {
            p,
            q,
        }));
    }
    let top = top_component(f, &Grading::integer(&[i64::from(q), i64::from(p)]))?;
    let leading = top.coeff(&Monomial::new(&[0, q * k]));
    let next = top.coeff(&Monomial::new(&[p, q * (k - 1)]));
    if leading.is_zero() || next.is_zero() {
        return Ok(EdgeAnalysis::Obstructed(Obstruction::NotPerfectPower));
    }
    let lambda = -next / (leading.clone() * S::from_u32(k).expect("small integer"));
    let expected = binomial_power(&lambda, p, q, k).scale(&leading);
    if expected != top {
        return Ok(EdgeAnalysis::Obstructed(Obstruction::NotPerfectPower));
    }
    Ok(EdgeAnalysis::PerfectPower {
        p,
        q,
        lambda,
        k,
        leading,
    })
}

/// `(y^q - lambda x^p)^k` in the plane.
pub fn binomial_power<S: Scalar>(lambda: &S, p: u32, q: u32, k: u32) -> Polynomial<S> {
    let base = Polynomial::from_terms(
        2,
        [
            (Monomial::new(&[0, q]), S::one()),
            (Monomial::new(&[p, 0]), -lambda.clone()),
        ],
    );
    base.pow(k)
}

/// One Jung reduction with `p = 1`: returns `psi = (x + y^q / lambda, y)`
/// and `compose(m, psi)`.
pub fn reduction_step<S: Scalar>(
    m: &PolyMap<S>,
    analysis: &EdgeAnalysis<S>,
) -> Result<(PolyMap<S>, PolyMap<S>)> {
    match analysis {
        EdgeAnalysis::PerfectPower {
            p: 1, q, lambda, ..
        } if m.arity() == 2 => {
            let addend = Polynomial::monomial(2, &[0, *q], S::one() / lambda.clone());
            let psi = elementary_map(2, 0, addend);
            let reduced = compose(m, &psi)?;
            Ok((psi, reduced))
        }
        _ => Err(Error::WrongShape),
    }
}

/// The `q = 1` reduction: returns `psi = (x, y + lambda x^p)` and
/// `compose(m, psi)`; this is the `p = 1` step conjugated by the swap of
/// `x` and `y`.
pub fn mirrored_reduction_step<S: Scalar>(
    m: &PolyMap<S>,
    analysis: &EdgeAnalysis<S>,
) -> Result<(PolyMap<S>, PolyMap<S>)> {
    match analysis {
        EdgeAnalysis::PerfectPower {
            p, q: 1, lambda, ..
        } if m.arity() == 2 => {
            let addend = Polynomial::monomial(2, &[*p, 0], lambda.clone());
            let psi = elementary_map(2, 1, addend);
            let reduced = compose(m, &psi)?;
            Ok((psi, reduced))
        }
        _ => Err(Error::WrongShape),
    }
}

const PANEL: f64 = 240.0;
const MARGIN: f64 = 30.0;

/// Renders one panel per polygon: lattice, axes, hull, support and area.
pub fn render_trace_svg(steps: &[NewtonPolygon]) -> Result<String> {
    if steps.is_empty() {
        return Err(Error::EmptySequence);
    }
    let extent = steps
        .iter()
        .flat_map(|s| s.support.iter().chain(&s.hull))
        .map(|&(i, j)| i.max(j))
        .max()
        .unwrap_or(0)
        .max(1);
    let unit = PANEL / extent as f64;
    let panel_w = PANEL + 2.0 * MARGIN;
    let panel_h = PANEL + 3.0 * MARGIN;
    let width = panel_w * steps.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{panel_h}" viewBox="0 0 {width} {panel_h}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{panel_h}" fill="white"/>"#
    );
    for (n, step) in steps.iter().enumerate() {
        let ox = n as f64 * panel_w + MARGIN;
        let oy = MARGIN + PANEL;
        let px = |i: i64| ox + i as f64 * unit;
        let py = |j: i64| oy - j as f64 * unit;
        let _ = writeln!(svg, r#"<g id="step-{n}">"#);
        if extent <= 40 {
            for i in 0..=extent {
                for j in 0..=extent {
                    let _ = writeln!(
                        svg,
                        r##"<circle cx="{:.2}" cy="{:.2}" r="1" fill="#bbbbbb"/>"##,
                        px(i),
                        py(j)
                    );
                }
            }
        }
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            px(0),
            py(0),
            px(extent),
            py(0)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            px(0),
            py(0),
            px(0),
            py(extent)
        );
        let points: Vec<String> = step
            .hull
            .iter()
            .map(|&(i, j)| format!("{:.2},{:.2}", px(i), py(j)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polygon points="{}" fill="#9ecae1" fill-opacity="0.5" stroke="#08519c" stroke-width="2"/>"##,
            points.join(" ")
        );
        for &(i, j) in &step.support {
            let _ = writeln!(
                svg,
                r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#d62728"/>"##,
                px(i),
                py(j)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">step {}: area = {}</text>"#,
            ox,
            oy + 2.0 * MARGIN * 0.75,
            n,
            step.area_label()
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_map, parse_polynomial};
    use crate::{QMap, QPoly, Rational};

    fn p(s: &str) -> QPoly {
        parse_polynomial(s, &["x", "y"]).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn polygons() {
        let n = newton_polygon(&p("y^2 - x")).unwrap();
        assert_eq!(n.hull(), &[(0, 0), (1, 0), (0, 2)]);
        assert_eq!(n.doubled_area(), 2);
        let n = newton_polygon(&p("x + y^3 + x*y")).unwrap();
        assert_eq!(n.hull(), &[(0, 0), (1, 0), (1, 1), (0, 3)]);
        assert_eq!(n.doubled_area(), 4);
        let n = newton_polygon(&p("5")).unwrap();
        assert_eq!(n.hull(), &[(0, 0)]);
        assert_eq!(n.doubled_area(), 0);
        assert_eq!(newton_polygon(&QPoly::zero(2)), Err(Error::ZeroPolynomial));
        assert_eq!(newton_polygon(&p("x*y + x^3")).unwrap().area_label(), "3/2");
    }

    #[test]
    fn shoelace_ignores_start_vertex() {
        let hull = vec![(0, 0), (4, 0), (3, 2), (0, 5)];
        let a = shoelace_doubled(&hull);
        for s in 1..hull.len() {
            let mut rotated = hull.clone();
            rotated.rotate_left(s);
            assert_eq!(shoelace_doubled(&rotated), a);
        }
    }

    #[test]
    fn edge_shapes() {
        assert_eq!(
            analyze_top_edge(&p("y^2 - x")).unwrap(),
            EdgeAnalysis::PerfectPower {
                p: 1,
                q: 2,
                lambda: r(1),
                k: 1,
                leading: r(1)
            }
        );
        assert_eq!(
            analyze_top_edge(&p("x^2 + y^2")).unwrap(),
            EdgeAnalysis::Obstructed(Obstruction::NotPerfectPower)
        );
        assert_eq!(
            analyze_top_edge(&p("x^3")).unwrap(),
            EdgeAnalysis::MonomialX(3)
        );
        assert_eq!(
            analyze_top_edge(&p("y + 1")).unwrap(),
            EdgeAnalysis::MonomialY(1)
        );
        assert_eq!(
            analyze_top_edge(&p("x^2 + y^3")).unwrap(),
            EdgeAnalysis::Obstructed(Obstruction::ExponentsAboveOne { p: 2, q: 3 })
        );
        assert_eq!(
            analyze_top_edge(&p("x*y + x")).unwrap(),
            EdgeAnalysis::Obstructed(Obstruction::VertexOffAxes(1, 1))
        );
        assert_eq!(analyze_top_edge(&p("7")), Err(Error::ConstantPolynomial));
        assert_eq!(
            analyze_top_edge(&QPoly::zero(2)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn perfect_power_round_trips() {
        let f = p("3*(y^2 + 2*x)^3 + x*y - 4");
        match analyze_top_edge(&f).unwrap() {
            EdgeAnalysis::PerfectPower {
                p: pp,
                q,
                lambda,
                k,
                leading,
            } => {
                assert_eq!((pp, q, k), (1, 2, 3));
                assert_eq!(lambda, r(-2));
                assert_eq!(leading, r(3));
                let top = top_component(&f, &Grading::integer(&[2, 1])).unwrap();
                assert_eq!(binomial_power(&lambda, pp, q, k).scale(&leading), top);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reductions() {
        let m: QMap = parse_map("(y^2 - x, y)", &["x", "y"]).unwrap();
        let a = analyze_top_edge(&m.coords()[0]).unwrap();
        let (psi, reduced) = reduction_step(&m, &a).unwrap();
        assert_eq!(psi.to_string(), "(y^2 + x, y)");
        assert_eq!(reduced.to_string(), "(-x, y)");
        assert_eq!(
            reduction_step(&m, &EdgeAnalysis::MonomialX(3)),
            Err(Error::WrongShape)
        );

        let m: QMap = parse_map("((y^2 - x)^2 + y, y)", &["x", "y"]).unwrap();
        let before = newton_polygon(&m.coords()[0]).unwrap().doubled_area();
        let a = analyze_top_edge(&m.coords()[0]).unwrap();
        let (_, reduced) = reduction_step(&m, &a).unwrap();
        let after = newton_polygon(&reduced.coords()[0]).unwrap().doubled_area();
        assert_eq!(before, 8);
        assert!(after < before);

        let m: QMap = parse_map("(x - 2*y^3 + y, x)", &["x", "y"]).unwrap();
        let flipped: QMap = parse_map("(y + x^3, x)", &["x", "y"]).unwrap();
        let a = analyze_top_edge(&flipped.coords()[0]).unwrap();
        let (psi, reduced) = mirrored_reduction_step(&flipped, &a).unwrap();
        assert_eq!(psi.to_string(), "(x, -x^3 + y)");
        assert_eq!(reduced.to_string(), "(y, x)");
        assert!(mirrored_reduction_step(&m, &EdgeAnalysis::MonomialY(1)).is_err());
    }

    #[test]
    fn svg_panels() {
        let poly = newton_polygon(&p("y^2 - x")).unwrap();
        let svg = render_trace_svg(std::slice::from_ref(&poly)).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("area = 1"));
        assert_eq!(svg.matches("<polygon").count(), 1);
        let two = render_trace_svg(&[poly.clone(), newton_polygon(&p("x")).unwrap()]).unwrap();
        assert_eq!(two.matches("<polygon").count(), 2);
        assert!(two.contains("area = 0"));
        assert_eq!(render_trace_svg(&[]), Err(Error::EmptySequence));
    }
}
