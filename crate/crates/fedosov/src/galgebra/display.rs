//! Deterministic textual form of algebra elements.
//!
//! Grammar (one line per element, terms joined by ` + `):
//!
//! ```text
//! element := "0" | term (" + " term)*
//! term    := ["(iħ/2)^" INT " * "] "[" coeff "] " sym " ⊗ " gra " ⊗ " asym
//! sym     := "1" | DX ("∨" DX)*
//! gra     := "1" | FRAME ("∧" FRAME)*
//! asym    := "1" | DX ("∧" DX)*
//! ```
//!
//! `DX` is `d` followed by a coordinate name, `FRAME` is a frame name,
//! and `coeff` is a complex scalar expression (`i` allowed). The
//! coefficient shown is relative to `(iħ/2)^t`, so real objects print
//! with real brackets; parsing reverses the factoring exactly. Terms
//! appear in the canonical key order, which makes the output
//! byte-deterministic.

use super::{AlgebraElement, Idx, TermKey};
use crate::scalar::{parse_cexpr, CScalar, ParseError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElementParseError {
    #[error("term {index}: {source}")]
    Coefficient {
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("term {index}: malformed term `{text}`: {msg}")]
    Malformed {
        index: usize,
        text: String,
        msg: String,
    },
    #[error("term {index}: unknown basis symbol `{name}`")]
    UnknownBasis { index: usize, name: String },
}

fn render_word(word: &[Idx], names: &[String], prefix: &str, sep: &str) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    word.iter()
        .map(|&i| format!("{prefix}{}", names[(i - 1) as usize]))
        .collect::<Vec<_>>()
        .join(sep)
}

/// Render an element with explicit coordinate and frame names.
pub fn render_element(el: &AlgebraElement, coords: &[String], frame: &[String]) -> String {
    if el.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::with_capacity(el.num_terms());
    for (k, c) in el.terms() {
        let shown = c.mul(&CScalar::minus_two_i_pow(k.hpow, el.nvars()));
        let mut s = String::new();
        if k.hpow > 0 {
            s.push_str(&format!("(iħ/2)^{} * ", k.hpow));
        }
        s.push_str(&format!("[{}] ", shown.render(coords)));
        s.push_str(&render_word(&k.sym, coords, "d", "∨"));
        s.push_str(" ⊗ ");
        s.push_str(&render_word(&k.gra, frame, "", "∧"));
        s.push_str(" ⊗ ");
        s.push_str(&render_word(&k.asym, coords, "d", "∧"));
        parts.push(s);
    }
    parts.join(" + ")
}

fn parse_word(
    text: &str,
    names: &[String],
    prefix: &str,
    sep: char,
    index: usize,
) -> Result<Vec<Idx>, ElementParseError> {
    let text = text.trim();
    if text == "1" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for piece in text.split(sep) {
        let piece = piece.trim();
        let bare = piece.strip_prefix(prefix).ok_or_else(|| {
            ElementParseError::UnknownBasis {
                index,
                name: piece.to_string(),
            }
        })?;
        let pos = names.iter().position(|n| n == bare).ok_or_else(|| {
            ElementParseError::UnknownBasis {
                index,
                name: piece.to_string(),
            }
        })?;
        out.push((pos + 1) as Idx);
    }
    Ok(out)
}

/// Parse the output of [`render_element`]. Also accepts non-canonical
/// index orders (the signs are re-normalized) and repeated terms
/// (coefficients merge), so hand-written input is fine too.
pub fn parse_element(
    text: &str,
    coords: &[String],
    frame: &[String],
) -> Result<AlgebraElement, ElementParseError> {
    let nvars = coords.len();
    let text = text.trim();
    if text == "0" {
        return Ok(AlgebraElement::zero(nvars));
    }
    let mut out = AlgebraElement::zero(nvars);
    // Terms are separated by " + " at bracket depth zero.
    let mut depth = 0i32;
    let mut pieces: Vec<String> = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && c == ' ' && i + 2 < chars.len() && chars[i + 1] == '+' && chars[i + 2] == ' ' {
            pieces.push(cur.clone());
            cur.clear();
            i += 3;
            continue;
        }
        cur.push(c);
        i += 1;
    }
    pieces.push(cur);

    for (index, piece) in pieces.iter().enumerate() {
        let mut rest = piece.trim();
        let mut hpow: u32 = 0;
        if let Some(stripped) = rest.strip_prefix("(iħ/2)^") {
            let (num, tail) = stripped.split_once(" * ").ok_or_else(|| {
                ElementParseError::Malformed {
                    index,
                    text: piece.clone(),
                    msg: "expected ` * ` after ħ-power".into(),
                }
            })?;
            hpow = num.trim().parse().map_err(|_| ElementParseError::Malformed {
                index,
                text: piece.clone(),
                msg: "bad ħ-power".into(),
            })?;
            rest = tail.trim_start();
        }
        let rest = rest.strip_prefix('[').ok_or_else(|| ElementParseError::Malformed {
            index,
            text: piece.clone(),
            msg: "expected `[coeff]`".into(),
        })?;
        let close = rest.rfind(']').ok_or_else(|| ElementParseError::Malformed {
            index,
            text: piece.clone(),
            msg: "unterminated coefficient bracket".into(),
        })?;
        let coeff_text = &rest[..close];
        let tail = rest[close + 1..].trim();
        let shown = parse_cexpr(coeff_text, coords)
            .map_err(|source| ElementParseError::Coefficient { index, source })?;
        let raw = shown.mul(&CScalar::i_half_pow(hpow, nvars));
        let factors: Vec<&str> = tail.split('⊗').collect();
        if factors.len() != 3 {
            return Err(ElementParseError::Malformed {
                index,
                text: piece.clone(),
                msg: format!("expected three ⊗-separated factors, got {}", factors.len()),
            });
        }
        let sym = parse_word(factors[0], coords, "d", '∨', index)?;
        let gra = parse_word(factors[1], frame, "", '∧', index)?;
        let asym = parse_word(factors[2], coords, "d", '∧', index)?;
        out.add_assign(&AlgebraElement::from_raw_term(raw, &sym, &gra, &asym, hpow));
    }
    Ok(out)
}

/// Render a single term key without coefficient — used in error
/// reports.
pub fn render_key(k: &TermKey, coords: &[String], frame: &[String]) -> String {
    format!(
        "ħ^{} {} ⊗ {} ⊗ {}",
        k.hpow,
        render_word(&k.sym, coords, "d", "∨"),
        render_word(&k.gra, frame, "", "∧"),
        render_word(&k.asym, coords, "d", "∧"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RationalExpr;

    fn names() -> (Vec<String>, Vec<String>) {
        (
            vec!["x1".into(), "x2".into()],
            vec!["e1".into(), "e2".into()],
        )
    }

    fn sample() -> AlgebraElement {
        let x1 = CScalar::from_real(RationalExpr::coord(0, 2));
        let half_i = CScalar::i_half_pow(1, 2);
        AlgebraElement::from_raw_term(x1, &[1, 2], &[1, 2], &[1], 0)
            .add(&AlgebraElement::from_raw_term(half_i, &[], &[2], &[], 1))
            .add(&AlgebraElement::one(2).scale_int(3))
    }

    #[test]
    fn render_is_canonical_and_parses_back() {
        let (coords, frame) = names();
        let el = sample();
        let text = render_element(&el, &coords, &frame);
        assert_eq!(
            text,
            "[3] 1 ⊗ 1 ⊗ 1 + [x1] dx1∨dx2 ⊗ e1∧e2 ⊗ dx1 + (iħ/2)^1 * [1] 1 ⊗ e2 ⊗ 1"
        );
        let back = parse_element(&text, &coords, &frame).unwrap();
        assert_eq!(back, el);
    }

    #[test]
    fn zero_round_trips() {
        let (coords, frame) = names();
        let z = AlgebraElement::zero(2);
        let text = render_element(&z, &coords, &frame);
        assert_eq!(text, "0");
        assert_eq!(parse_element(&text, &coords, &frame).unwrap(), z);
    }

    #[test]
    fn non_canonical_input_normalizes() {
        let (coords, frame) = names();
        let a = parse_element("[1] 1 ⊗ e2∧e1 ⊗ 1", &coords, &frame).unwrap();
        let b = parse_element("[-1] 1 ⊗ e1∧e2 ⊗ 1", &coords, &frame).unwrap();
        assert_eq!(a, b);
    }
}
