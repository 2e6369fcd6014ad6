//! Named built-in automorphisms with verified inverses.

use crate::arith::{Polynomial, Scalar};
use crate::automorphism::{verify_inverse_pair, PolyMap};
use crate::error::{Error, Result};
use crate::graded3::wild_witness;
use crate::grading::Grading;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedExample<S: Scalar> {
    pub name: String,
    pub map: PolyMap<S>,
    pub inverse: PolyMap<S>,
    pub notes: String,
}

/// `w = x^2 - y z`, the invariant of the Nagata map.
fn nagata_invariant<S: Scalar>() -> [Polynomial<S>; 4] {
    let x = Polynomial::var(3, 0);
    let y = Polynomial::var(3, 1);
    let z = Polynomial::var(3, 2);
    let w = &(&x * &x) - &(&y * &z);
    [x, y, z, w]
}

/// Nagata's map `(x + w z, y + 2 w x + w^2 z, z)` with `w = x^2 - y z`.
pub fn nagata<S: Scalar>() -> PolyMap<S> {
    let [x, y, z, w] = nagata_invariant::<S>();
    let two = Polynomial::constant(3, S::one() + S::one());
    PolyMap::new(vec![
        &x + &(&w * &z),
        &(&y + &(&(&two * &w) * &x)) + &(&(&w * &w) * &z),
        z,
    ])
    .expect("three coordinates in three variables")
}

/// `(x - w z, y - 2 w x + w^2 z, z)`.
pub fn nagata_inverse<S: Scalar>() -> PolyMap<S> {
    let [x, y, z, w] = nagata_invariant::<S>();
    let two = Polynomial::constant(3, S::one() + S::one());
    PolyMap::new(vec![
        &x - &(&w * &z),
        &(&y - &(&(&two * &w) * &x)) + &(&(&w * &w) * &z),
        z,
    ])
    .expect("three coordinates in three variables")
}

/// Names accepted by [`get`] besides the parametric `witness(a,b,c)`.
pub const NAMES: [&str; 4] = ["nagata", "nagata-inverse", "identity2", "identity3"];

/// Looks up a built-in example.
///
/// `witness(a,b,c)` builds the wild witness for the grading `(a, b, -c)`;
/// a negative third entry is read as the weight itself.
pub fn get<S: Scalar>(name: &str) -> Result<NamedExample<S>> {
    let key = name.trim();
    let example = match key {
        "nagata" => NamedExample {
            name: key.into(),
            map: nagata(),
            inverse: nagata_inverse(),
            notes: "Nagata's automorphism, wild by the Shestakov-Umirbaev theorem".into(),
        },
        "nagata-inverse" => NamedExample {
            name: key.into(),
            map: nagata_inverse(),
            inverse: nagata(),
            notes: "inverse of Nagata's automorphism".into(),
        },
        "identity2" | "identity3" => {
            let n = if key == "identity2" { 2 } else { 3 };
            NamedExample {
                name: key.into(),
                map: PolyMap::identity(n),
                inverse: PolyMap::identity(n),
                notes: format!("identity in {n} variables"),
            }
        }
        _ => {
            let weights = parse_witness_name(key).ok_or_else(|| Error::UnknownName(key.into()))?;
            let w = wild_witness::<S>(&Grading::integer(&weights))?;
            if !w.verify_inverse()? {
                return Err(Error::Invariant(format!(
                    "witness `{key}` failed its inverse check"
                )));
            }
            return Ok(NamedExample {
                name: key.into(),
                notes: w.describe(),
                map: w.map,
                inverse: w.inverse,
            });
        }
    };
    if !verify_inverse_pair(&example.map, &example.inverse)? {
        return Err(Error::Invariant(format!(
            "built-in `{key}` failed its inverse check"
        )));
    }
    Ok(example)
}

fn parse_witness_name(key: &str) -> Option<[i64; 3]> {
    let inner = key.strip_prefix("witness(")?.strip_suffix(')')?;
    let parts: Vec<i64> = inner
        .split(',')
        .map(|s| s.trim().parse().ok())
        .collect::<Option<_>>()?;
    match parts[..] {
        [a, b, c] => Some([a, b, -c.abs()]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::jacobian_determinant;
    use crate::automorphism::compose;
    use crate::{QPoly, Rational};

    #[test]
    fn nagata_matches_display() {
        let s = nagata::<Rational>();
        assert_eq!(s.coords()[0].to_string(), "x^2*z - y*z^2 + x");
        assert_eq!(s.coords()[2].to_string(), "z");
        assert!(jacobian_determinant(&s) == QPoly::one(3));
    }

    #[test]
    fn nagata_fixes_invariant() {
        let s = nagata::<Rational>();
        let [_, _, _, w] = nagata_invariant::<Rational>();
        assert_eq!(w.substitute(s.coords()).unwrap(), w);
    }

    #[test]
    fn nagata_inverse_checks() {
        let s = nagata::<Rational>();
        assert!(compose(&s, &nagata_inverse()).unwrap().is_identity());
    }

    #[test]
    fn lookups() {
        for name in NAMES {
            assert!(get::<Rational>(name).is_ok(), "{name}");
        }
        assert!(get::<Rational>("identity3").unwrap().map.is_identity());
        assert_eq!(
            get::<Rational>("anick").unwrap_err(),
            Error::UnknownName("anick".into())
        );
        let w = get::<Rational>("witness(3,1,1)").unwrap();
        assert_eq!(w.map.arity(), 3);
        assert!(get::<Rational>("witness(3, 1, -1)").is_ok());
        assert!(get::<Rational>("witness(1,2)").is_err());
    }
}
