//! Parser for section expressions — elements of `C₀`, written as
//! scalar factors times wedge monomials in the frame covectors:
//!
//! ```text
//! x1*e1^e2 + (1/2)*e1 - x2^2
//! ```
//!
//! The operators are the scalar grammar's `+ - * / ^`; `*` is the
//! wedge product (which restricts to scalar multiplication), `/`
//! requires a scalar divisor, and `^` means exponentiation when its
//! right operand is an integer literal and the wedge product
//! otherwise, so `x1^2*e1` and `e1^e2` both read naturally.

use super::{AlgebraElement, Idx};
use crate::scalar::parse::{lex, Token};
use crate::scalar::{CScalar, ParseError, RationalExpr};

struct SectionParser<'a> {
    tokens: &'a [(usize, Token)],
    idx: usize,
    end: usize,
    coords: &'a [String],
    frame: &'a [String],
}

impl<'a> SectionParser<'a> {
    fn nvars(&self) -> usize {
        self.coords.len()
    }

    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.idx)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<AlgebraElement, ParseError> {
        let mut acc = self.term()?;
        while let Some((_, tok)) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<AlgebraElement, ParseError> {
        let mut acc = self.factor()?;
        while let Some((_, tok)) = self.peek() {
            match tok {
                Token::Star => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Token::Slash => {
                    self.bump();
                    let pos = self.peek().map(|(p, _)| *p).unwrap_or(self.end);
                    let rhs = self.factor()?;
                    let scalar = as_scalar(&rhs).ok_or(ParseError::Syntax {
                        pos,
                        msg: "division by a non-scalar section".into(),
                    })?;
                    if scalar.is_zero() {
                        return Err(ParseError::DivisionByZero { pos });
                    }
                    let inv = CScalar::one(self.nvars())
                        .div(&CScalar::from_real(scalar))
                        .expect("nonzero scalar");
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AlgebraElement, ParseError> {
        if let Some((_, Token::Minus)) = self.peek() {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<AlgebraElement, ParseError> {
        let mut base = self.primary()?;
        while let Some((_, Token::Caret)) = self.peek() {
            self.bump();
            match self.peek().cloned() {
                Some((pos, Token::Int(k))) => {
                    self.bump();
                    let e = u32::try_from(k).map_err(|_| ParseError::BadExponent { pos })?;
                    base = base.pow_mul(e);
                }
                Some((_, Token::Symbol(_))) | Some((_, Token::LParen)) => {
                    // wedge: `e1^e2`, `e1^(x1*e2)`
                    let rhs = self.primary()?;
                    base = base.mul(&rhs);
                }
                other => {
                    return Err(ParseError::BadExponent {
                        pos: other.map(|(p, _)| p).unwrap_or(self.end),
                    })
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<AlgebraElement, ParseError> {
        match self.bump() {
            Some((_, Token::Int(k))) => Ok(AlgebraElement::from_cscalar(CScalar::from_real(
                RationalExpr::constant(num_rational::BigRational::from_integer(k), self.nvars()),
            ))),
            Some((pos, Token::Symbol(name))) => {
                if let Some(i) = self.coords.iter().position(|n| *n == name) {
                    return Ok(AlgebraElement::from_cscalar(CScalar::from_real(
                        RationalExpr::coord(i, self.nvars()),
                    )));
                }
                if let Some(a) = self.frame.iter().position(|n| *n == name) {
                    return Ok(AlgebraElement::frame_covector((a + 1) as Idx, self.nvars()));
                }
                Err(ParseError::UnknownSymbol { pos, name })
            }
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Token::RParen)) => Ok(inner),
                    other => Err(ParseError::Syntax {
                        pos: other.map(|(p, _)| p).unwrap_or(self.end),
                        msg: "expected `)`".into(),
                    }),
                }
            }
            Some((pos, tok)) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {tok:?}"),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

fn as_scalar(el: &AlgebraElement) -> Option<RationalExpr> {
    if el.is_zero() {
        return Some(RationalExpr::zero(el.nvars()));
    }
    if el.num_terms() != 1 {
        return None;
    }
    let (k, c) = el.terms().next().unwrap();
    if k.sym.is_empty() && k.gra.is_empty() && k.asym.is_empty() && k.hpow == 0 && c.is_real() {
        Some(c.re.clone())
    } else {
        None
    }
}

/// Parse a section expression into a `C₀` element.
pub fn parse_section(
    text: &str,
    coords: &[String],
    frame: &[String],
) -> Result<AlgebraElement, ParseError> {
    let lx = lex(text)?;
    let mut p = SectionParser {
        tokens: &lx.tokens,
        idx: 0,
        end: lx.end,
        coords,
        frame,
    };
    let v = p.expr()?;
    if let Some((pos, tok)) = p.peek() {
        return Err(ParseError::Syntax {
            pos: *pos,
            msg: format!("trailing input starting with {tok:?}"),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> (Vec<String>, Vec<String>) {
        (
            vec!["x1".into(), "x2".into()],
            vec!["e1".into(), "e2".into()],
        )
    }

    #[test]
    fn wedge_and_power_coexist() {
        let (c, f) = ctx();
        let a = parse_section("x1^2*e1^e2", &c, &f).unwrap();
        let b = parse_section("x1*x1*e1^e2", &c, &f).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }

    #[test]
    fn grassmann_square_vanishes() {
        let (c, f) = ctx();
        assert!(parse_section("e1^e1", &c, &f).unwrap().is_zero());
        assert!(parse_section("e1*e1", &c, &f).unwrap().is_zero());
    }

    #[test]
    fn rational_coefficients() {
        let (c, f) = ctx();
        let a = parse_section("(1/2)*e1 + x1*e1^e2", &c, &f).unwrap();
        assert_eq!(a.num_terms(), 2);
        assert!(a.is_c0());
    }

    #[test]
    fn anticommutativity_of_wedge() {
        let (c, f) = ctx();
        let ab = parse_section("e1^e2", &c, &f).unwrap();
        let ba = parse_section("e2^e1", &c, &f).unwrap();
        assert_eq!(ba, ab.neg());
    }

    #[test]
    fn division_by_section_rejected() {
        let (c, f) = ctx();
        assert!(parse_section("x1/e1", &c, &f).is_err());
        assert!(parse_section("x1/(x2-x2)", &c, &f).is_err());
    }
}
