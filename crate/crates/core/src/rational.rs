//! Arbitrary-precision rationals with an integer fast path.
//!
//! `BigRational` renormalizes after every operation with a gcd, which
//! dominates the cost of polynomial arithmetic whose coefficients are large
//! integers. This wrapper skips normalization whenever both operands are
//! integers and defers to `BigRational` otherwise.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn from_integer(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `numer / denom` in lowest terms.
    ///
    /// # Panics
    /// When `denom` is zero.
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        Rational(BigRational::new(numer, denom))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

fn both_integers(a: &Rational, b: &Rational) -> bool {
    a.0.denom().is_one() && b.0.denom().is_one()
}

fn numerator(r: Rational) -> BigInt {
    r.0.into_raw().0
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        if both_integers(&self, &rhs) {
            Rational::from_integer(numerator(self) + numerator(rhs))
        } else {
            Rational(self.0 + rhs.0)
        }
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        if both_integers(&self, &rhs) {
            Rational::from_integer(numerator(self) - numerator(rhs))
        } else {
            Rational(self.0 - rhs.0)
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        if both_integers(&self, &rhs) {
            Rational::from_integer(numerator(self) * numerator(rhs))
        } else {
            Rational(self.0 * rhs.0)
        }
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        if rhs.0.is_one() {
            self
        } else {
            Rational(self.0 / rhs.0)
        }
    }
}

impl Rem for Rational {
    type Output = Rational;
    fn rem(self, rhs: Rational) -> Rational {
        Rational(self.0 % rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl Num for Rational {
    type FromStrRadixErr = num_rational::ParseRatioError;

    /// Accepts `n` as well as `n/d`.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if s.contains('/') {
            BigRational::from_str_radix(s, radix).map(Rational)
        } else {
            BigRational::from_str_radix(&format!("{s}/1"), radix).map(Rational)
        }
    }
}

impl FromStr for Rational {
    type Err = num_rational::ParseRatioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::from_str_radix(s.trim(), 10)
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    fn abs_sub(&self, other: &Self) -> Self {
        Rational(self.0.abs_sub(&other.0))
    }

    fn signum(&self) -> Self {
        Rational(self.0.signum())
    }

    fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl FromPrimitive for Rational {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Rational::from_integer(n.into()))
    }

    fn from_u64(n: u64) -> Option<Self> {
        Some(Rational::from_integer(n.into()))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn plain(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!("12".parse::<Rational>().unwrap(), q(12, 1));
        assert_eq!("-6/4".parse::<Rational>().unwrap(), q(-3, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert_eq!(q(-3, 2).to_string(), "-3/2");
        assert_eq!(q(4, 1).to_string(), "4");
    }

    proptest! {
        #[test]
        fn agrees_with_big_rational(a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20) {
            let (x, y) = (q(a, b), q(c, d));
            let (px, py) = (plain(a, b), plain(c, d));
            prop_assert_eq!((x.clone() + y.clone()).into_inner(), px.clone() + py.clone());
            prop_assert_eq!((x.clone() - y.clone()).into_inner(), px.clone() - py.clone());
            prop_assert_eq!((x.clone() * y.clone()).into_inner(), px.clone() * py.clone());
            if c != 0 {
                prop_assert_eq!((x / y).into_inner(), px / py);
            }
        }
    }
}
