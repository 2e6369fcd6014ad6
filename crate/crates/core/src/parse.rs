//! Text syntax for polynomials and maps.
//!
//! Grammar (whitespace-insensitive, explicit `*` required):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' INT)?
//! atom  := INT | NAME | '(' expr ')'
//! ```
//!
//! Division is only allowed by a nonzero constant, which is how rational
//! coefficients such as `1/2*x` are written.

use crate::arith::{Polynomial, Scalar};
use crate::automorphism::PolyMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Name(text[start..i].to_string())));
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            other => {
                return Err(Error::Parse {
                    position: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    names: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expr<S: Scalar>(&mut self) -> Result<Polynomial<S>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<Polynomial<S>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let d = self.unary::<S>()?;
                    if d.is_zero() || !d.is_constant() {
                        return Err(Error::Parse {
                            position: at,
                            message: "division by a non-constant or zero".into(),
                        });
                    }
                    acc = acc.scale(&(S::one() / d.constant_term()));
                }
                Some(Tok::Int(_) | Tok::Name(_) | Tok::LParen) => {
                    return self.error("expected an operator (multiplication needs `*`)")
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<S: Scalar>(&mut self) -> Result<Polynomial<S>> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary::<S>()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<S: Scalar>(&mut self) -> Result<Polynomial<S>> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(digits)) => {
                    let exp: u32 = match digits.parse() {
                        Ok(e) => e,
                        Err(_) => return self.error("exponent too large"),
                    };
                    self.pos += 1;
                    Ok(base.pow(exp))
                }
                _ => self.error("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom<S: Scalar>(&mut self) -> Result<Polynomial<S>> {
        let arity = self.names.len();
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(digits)) => {
                self.pos += 1;
                let c = S::from_str_radix(&digits, 10)
                    .or_else(|_| S::from_str_radix(&format!("{digits}/1"), 10))
                    .map_err(|_| Error::Parse {
                        position: at,
                        message: "bad integer literal".into(),
                    })?;
                Ok(Polynomial::constant(arity, c))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Polynomial::var(arity, i)),
                    None => Err(Error::UnknownVariable { name, position: at }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => self.error(format!("unexpected token {t:?}")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a polynomial in the variables `names` (their order fixes the arity).
pub fn parse_polynomial<S: Scalar>(text: &str, names: &[&str]) -> Result<Polynomial<S>> {
    let mut parser = Parser {
        toks: tokenize(text)?,
        pos: 0,
        end: text.len(),
        names,
    };
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.error("trailing input");
    }
    Ok(p)
}

/// Parses a coordinate list such as `(x + y^2, y)`; the parentheses are optional.
pub fn parse_map<S: Scalar>(text: &str, names: &[&str]) -> Result<PolyMap<S>> {
    let trimmed = text.trim();
    let inner = match (trimmed.strip_prefix('('), trimmed.strip_suffix(')')) {
        (Some(_), Some(_)) if wrapped_once(trimmed) => &trimmed[1..trimmed.len() - 1],
        _ => trimmed,
    };
    let offset = text.find(inner).unwrap_or(0);
    let mut coords = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                coords.push((start, &inner[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    coords.push((start, &inner[start..]));
    let polys = coords
        .into_iter()
        .map(|(s, piece)| {
            parse_polynomial(piece, names).map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse {
                    position: position + s + offset,
                    message,
                },
                Error::UnknownVariable { name, position } => Error::UnknownVariable {
                    name,
                    position: position + s + offset,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PolyMap::new(polys)
}

// True when the outer parentheses of `s` match each other.
fn wrapped_once(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i != s.len() - 1 {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QMap, QPoly, Rational};

    const XYZ: [&str; 3] = ["x", "y", "z"];

    #[test]
    fn nagata_coordinate() {
        let f: QPoly = parse_polynomial("x + (x^2 - y*z)*z", &XYZ).unwrap();
        assert_eq!(f, crate::examples::nagata::<Rational>().coords()[0]);
        assert_eq!(f.to_string(), "x^2*z - y*z^2 + x");
    }

    #[test]
    fn literals_and_zero() {
        let zero: QPoly = parse_polynomial("0", &XYZ[..2]).unwrap();
        assert!(zero.is_zero());
        let f: QPoly = parse_polynomial("y^2 - x", &XYZ[..2]).unwrap();
        assert_eq!(f.len(), 2);
        let half: QPoly = parse_polynomial("x/2 + 1/3", &XYZ[..2]).unwrap();
        assert_eq!(half.to_string(), "1/2*x + 1/3");
        let r: QPoly = parse_polynomial("-x^2", &XYZ[..1]).unwrap();
        assert_eq!(r.to_string(), "-x^2");
    }

    #[test]
    fn rejects_implicit_multiplication() {
        let e = parse_polynomial::<Rational>("2x", &XYZ).unwrap_err();
        assert!(matches!(e, Error::Parse { position: 1, .. }));
        let e = parse_polynomial::<Rational>("x (y)", &XYZ).unwrap_err();
        assert!(matches!(e, Error::Parse { position: 2, .. }));
    }

    #[test]
    fn reports_unknown_variables() {
        let e = parse_polynomial::<Rational>("x + w", &XYZ).unwrap_err();
        assert_eq!(
            e,
            Error::UnknownVariable {
                name: "w".into(),
                position: 4
            }
        );
    }

    #[test]
    fn reports_bad_syntax() {
        assert!(parse_polynomial::<Rational>("x +", &XYZ).is_err());
        assert!(parse_polynomial::<Rational>("(x + y", &XYZ).is_err());
        assert!(parse_polynomial::<Rational>("x^y", &XYZ).is_err());
        assert!(parse_polynomial::<Rational>("x / y", &XYZ).is_err());
        assert!(parse_polynomial::<Rational>("x / 0", &XYZ).is_err());
        assert!(parse_polynomial::<Rational>("x $ y", &XYZ).is_err());
    }

    #[test]
    fn maps() {
        let m: QMap = parse_map("(x + y^2, y)", &XYZ[..2]).unwrap();
        assert_eq!(m.to_string(), "(y^2 + x, y)");
        let m: QMap = parse_map("(x + y)*(x - y), (y)", &XYZ[..2]).unwrap();
        assert_eq!(m.coords()[1].to_string(), "y");
        let e = parse_map::<Rational>("(x, q)", &XYZ[..2]).unwrap_err();
        assert_eq!(
            e,
            Error::UnknownVariable {
                name: "q".into(),
                position: 4
            }
        );
    }
}
