//! Recursive-descent parser for the scalar expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | power
//! power   := primary ('^' INT)*
//! primary := INT | SYMBOL | '(' expr ')'
//! ```
//!
//! Integer literals are arbitrary precision; exponents must be
//! nonnegative integer literals (negative powers are written as
//! explicit divisions). Whitespace is insignificant. Symbols are
//! resolved against the declared coordinate names; parsers that accept
//! complex values additionally recognize `i`.

use super::complex::CScalar;
use super::ratexpr::RationalExpr;
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at byte {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("division by zero in subexpression ending at byte {pos}")]
    DivisionByZero { pos: usize },
    #[error("negative or non-literal exponent at byte {pos}: write an explicit division instead")]
    BadExponent { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    Int(BigInt),
    Symbol(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

pub(crate) struct Lexer {
    pub tokens: Vec<(usize, Token)>,
    pub end: usize,
}

pub(crate) fn lex(text: &str) -> Result<Lexer, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                pos += 1;
            }
            '+' => {
                tokens.push((pos, Token::Plus));
                pos += 1;
            }
            '-' => {
                tokens.push((pos, Token::Minus));
                pos += 1;
            }
            '*' => {
                tokens.push((pos, Token::Star));
                pos += 1;
            }
            '/' => {
                tokens.push((pos, Token::Slash));
                pos += 1;
            }
            '^' => {
                tokens.push((pos, Token::Caret));
                pos += 1;
            }
            '(' => {
                tokens.push((pos, Token::LParen));
                pos += 1;
            }
            ')' => {
                tokens.push((pos, Token::RParen));
                pos += 1;
            }
            '0'..='9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let lit: BigInt = text[start..pos]
                    .parse()
                    .expect("digit run parses as integer");
                tokens.push((start, Token::Int(lit)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = pos;
                while pos < bytes.len()
                    && ((bytes[pos] as char).is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                tokens.push((start, Token::Symbol(text[start..pos].to_string())));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(Lexer {
        tokens,
        end: bytes.len(),
    })
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    idx: usize,
    end: usize,
    names: &'a [String],
    allow_i: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.idx)
    }

    fn pos(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<CScalar, ParseError> {
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

    fn term(&mut self) -> Result<CScalar, ParseError> {
        let mut acc = self.factor()?;
        while let Some((_, tok)) = self.peek() {
            match tok {
                Token::Star => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Token::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    let pos = self.pos();
                    acc = acc
                        .div(&rhs)
                        .map_err(|_| ParseError::DivisionByZero { pos })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CScalar, ParseError> {
        if let Some((_, Token::Minus)) = self.peek() {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<CScalar, ParseError> {
        let mut base = self.primary()?;
        while let Some((_, Token::Caret)) = self.peek() {
            self.bump();
            let (pos, tok) = self
                .bump()
                .ok_or(ParseError::BadExponent { pos: self.end })?;
            let e = match tok {
                Token::Int(k) => u32::try_from(k).map_err(|_| ParseError::BadExponent { pos })?,
                _ => return Err(ParseError::BadExponent { pos }),
            };
            base = pow_cscalar(&base, e);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<CScalar, ParseError> {
        match self.bump() {
            Some((_, Token::Int(k))) => Ok(CScalar::from_real(RationalExpr::constant(
                BigRational::from_integer(k),
                self.nvars(),
            ))),
            Some((pos, Token::Symbol(name))) => {
                if self.allow_i && name == "i" {
                    return Ok(CScalar::i(self.nvars()));
                }
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(CScalar::from_real(RationalExpr::coord(i, self.nvars()))),
                    None => Err(ParseError::UnknownSymbol { pos, name }),
                }
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

fn pow_cscalar(base: &CScalar, e: u32) -> CScalar {
    let mut out = CScalar::one(base.nvars());
    for _ in 0..e {
        out = out.mul(base);
    }
    out
}

fn parse_cscalar_tokens(
    tokens: &[(usize, Token)],
    end: usize,
    names: &[String],
    allow_i: bool,
) -> Result<CScalar, ParseError> {
    let mut p = Parser {
        tokens,
        idx: 0,
        end,
        names,
        allow_i,
    };
    let value = p.expr()?;
    if let Some((pos, tok)) = p.peek() {
        return Err(ParseError::Syntax {
            pos: *pos,
            msg: format!("trailing input starting with {tok:?}"),
        });
    }
    Ok(value)
}

/// Parse a real scalar expression over the given coordinate names.
pub fn parse_expr(text: &str, names: &[String]) -> Result<RationalExpr, ParseError> {
    let lx = lex(text)?;
    let v = parse_cscalar_tokens(&lx.tokens, lx.end, names, false)?;
    debug_assert!(v.im.is_zero());
    Ok(v.re)
}

/// Parse a complex scalar expression; `i` is the imaginary unit.
pub fn parse_cexpr(text: &str, names: &[String]) -> Result<CScalar, ParseError> {
    let lx = lex(text)?;
    parse_cscalar_tokens(&lx.tokens, lx.end, names, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    #[test]
    fn zero_literal() {
        let e = parse_expr("0", &names()).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn canonical_fraction() {
        let e = parse_expr("x1^2*x2/(1+x1^2)", &names()).unwrap();
        let back = parse_expr(&e.render(&names()), &names()).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn forced_cancellation() {
        let e = parse_expr("x1/(x1)", &names()).unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn unknown_symbol_position() {
        let err = parse_expr("x1 + y2", &names()).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownSymbol {
                pos: 5,
                name: "y2".into()
            }
        );
    }

    #[test]
    fn syntactic_zero_denominator() {
        let err = parse_expr("x1/(x2-x2)", &names()).unwrap_err();
        assert!(matches!(err, ParseError::DivisionByZero { .. }));
    }

    #[test]
    fn negative_exponent_rejected() {
        let err = parse_expr("x1^-2", &names()).unwrap_err();
        assert!(matches!(err, ParseError::BadExponent { .. }));
    }

    #[test]
    fn unary_minus_binds_below_power() {
        let e = parse_expr("-x1^2", &names()).unwrap();
        let alt = parse_expr("0 - x1*x1", &names()).unwrap();
        assert_eq!(e, alt);
    }

    #[test]
    fn complex_literal() {
        let e = parse_cexpr("2 + i*(1 - x1)", &names()).unwrap();
        assert!(!e.is_real());
        let back = parse_cexpr(&e.render(&names()), &names()).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn print_parse_idempotent() {
        for src in [
            "0",
            "1",
            "-1",
            "x1*x2 - 3",
            "(x1+x2)^3/(1+x2^2)",
            "5/3*x1",
            "1/(1+x1^2)",
        ] {
            let e = parse_expr(src, &names()).unwrap();
            let printed = e.render(&names());
            let reparsed = parse_expr(&printed, &names()).unwrap();
            assert_eq!(e, reparsed, "round trip failed for `{src}` -> `{printed}`");
            assert_eq!(printed, reparsed.render(&names()));
        }
    }
}
