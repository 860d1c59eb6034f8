//! The geometry file format.
//!
//! Line-oriented text; `#` starts a comment, blank lines are ignored.
//!
//! ```text
//! m = 1                      # half-dimension: chart has 2m coordinates
//! n = 2                      # bundle rank
//! coords = x1 x2             # optional, default x1..x{2m}
//! frame = e1 e2              # optional, default e1..e{n}
//! omega[1,2] = 1 + x1^2      # ω_{ij}; give one index order, the other
//!                            # is filled in antisymmetrically
//! Gamma[1,1,1] = x1          # Γ^k_{ij} as Gamma[k,i,j]; symmetric in i,j
//! q[1,1] = 1                 # q_{AB}; symmetric
//! A[2,1,1] = x2              # A^B_{iC} as A[B,i,C]: coefficient of e_B
//!                            # in the bundle derivative of e_C along ∂_i
//! ```
//!
//! Omitted entries default to 0. Giving both orders of a symmetric or
//! antisymmetric entry is allowed only when consistent. Values are
//! scalar expressions over the declared coordinates.

use super::GeometryInput;
use crate::scalar::{parse_expr, ExprMatrix, RationalExpr};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: index out of range in `{key}`")]
    IndexRange { line: usize, key: String },
    #[error("line {line}: {source}")]
    Expr {
        line: usize,
        #[source]
        source: crate::scalar::ParseError,
    },
    #[error("line {line}: entry `{key}` conflicts with an earlier assignment")]
    Conflict { line: usize, key: String },
    #[error("missing required declaration `{0}`")]
    Missing(String),
}

struct RawEntry {
    line: usize,
    family: String,
    indices: Vec<usize>,
    value: String,
}

/// Parse the geometry file text into an unvalidated [`GeometryInput`].
pub fn parse_geometry(text: &str) -> Result<GeometryInput, FileError> {
    let mut m: Option<usize> = None;
    let mut n: Option<usize> = None;
    let mut coords: Option<Vec<String>> = None;
    let mut frame: Option<Vec<String>> = None;
    let mut entries: Vec<RawEntry> = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| FileError::Malformed {
            line,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "m" => {
                m = Some(value.parse().map_err(|_| FileError::Malformed {
                    line,
                    msg: format!("bad integer `{value}` for m"),
                })?)
            }
            "n" => {
                n = Some(value.parse().map_err(|_| FileError::Malformed {
                    line,
                    msg: format!("bad integer `{value}` for n"),
                })?)
            }
            "coords" => {
                coords = Some(
                    value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect(),
                )
            }
            "frame" => {
                frame = Some(
                    value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect(),
                )
            }
            _ => {
                let (family, idx_part) =
                    key.split_once('[').ok_or_else(|| FileError::Malformed {
                        line,
                        msg: format!("unknown declaration `{key}`"),
                    })?;
                let idx_part = idx_part.strip_suffix(']').ok_or_else(|| FileError::Malformed {
                    line,
                    msg: "missing closing `]`".into(),
                })?;
                let indices = idx_part
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| FileError::Malformed {
                        line,
                        msg: format!("bad index list `[{idx_part}]`"),
                    })?;
                let family = family.trim().to_string();
                if !matches!(family.as_str(), "omega" | "Gamma" | "q" | "A") {
                    return Err(FileError::Malformed {
                        line,
                        msg: format!("unknown component family `{family}`"),
                    });
                }
                entries.push(RawEntry {
                    line,
                    family,
                    indices,
                    value: value.to_string(),
                });
            }
        }
    }

    let m = m.ok_or_else(|| FileError::Missing("m".into()))?;
    let n = n.ok_or_else(|| FileError::Missing("n".into()))?;
    let dim = 2 * m;
    let coords = coords.unwrap_or_else(|| (1..=dim).map(|i| format!("x{i}")).collect());
    let frame = frame.unwrap_or_else(|| (1..=n).map(|a| format!("e{a}")).collect());
    if coords.len() != dim {
        return Err(FileError::Missing(format!(
            "coords must list exactly {dim} names, got {}",
            coords.len()
        )));
    }
    if frame.len() != n {
        return Err(FileError::Missing(format!(
            "frame must list exactly {n} names, got {}",
            frame.len()
        )));
    }

    let mut geo = GeometryInput::empty(m, n);
    geo.coords = coords.clone();
    geo.frame = frame;

    // Track explicit assignments to detect conflicts.
    let mut omega_set = vec![false; dim * dim];
    let mut gamma_set = vec![false; dim * dim * dim];
    let mut q_set = vec![false; n * n];
    let mut a_set = vec![false; n * dim * n];

    for e in &entries {
        let val = parse_expr(&e.value, &coords).map_err(|source| FileError::Expr {
            line: e.line,
            source,
        })?;
        let key = format!("{}[{:?}]", e.family, e.indices);
        let bad_range = || FileError::IndexRange {
            line: e.line,
            key: key.clone(),
        };
        let conflict = || FileError::Conflict {
            line: e.line,
            key: key.clone(),
        };
        match e.family.as_str() {
            "omega" => {
                let [i, j] = e.indices[..] else {
                    return Err(FileError::Malformed {
                        line: e.line,
                        msg: "omega takes two indices".into(),
                    });
                };
                if i == 0 || j == 0 || i > dim || j > dim {
                    return Err(bad_range());
                }
                let (i, j) = (i - 1, j - 1);
                set_pair(
                    &mut geo.omega,
                    &mut omega_set,
                    dim,
                    i,
                    j,
                    val.clone(),
                    val.neg(),
                )
                .map_err(|_| conflict())?;
            }
            "q" => {
                let [a, b] = e.indices[..] else {
                    return Err(FileError::Malformed {
                        line: e.line,
                        msg: "q takes two indices".into(),
                    });
                };
                if a == 0 || b == 0 || a > n || b > n {
                    return Err(bad_range());
                }
                let (a, b) = (a - 1, b - 1);
                set_pair(&mut geo.q, &mut q_set, n, a, b, val.clone(), val.clone())
                    .map_err(|_| conflict())?;
            }
            "Gamma" => {
                let [k, i, j] = e.indices[..] else {
                    return Err(FileError::Malformed {
                        line: e.line,
                        msg: "Gamma takes three indices (Gamma[k,i,j] = Γ^k_ij)".into(),
                    });
                };
                if k == 0 || i == 0 || j == 0 || k > dim || i > dim || j > dim {
                    return Err(bad_range());
                }
                let (k, i, j) = (k - 1, i - 1, j - 1);
                for (ii, jj) in [(i, j), (j, i)] {
                    let flat = (k * dim + ii) * dim + jj;
                    if gamma_set[flat] {
                        if *geo.gamma.get(k, ii, jj) != val {
                            return Err(conflict());
                        }
                    } else {
                        gamma_set[flat] = true;
                        geo.gamma.set(k, ii, jj, val.clone());
                    }
                }
            }
            "A" => {
                let [b, i, c] = e.indices[..] else {
                    return Err(FileError::Malformed {
                        line: e.line,
                        msg: "A takes three indices (A[B,i,C] = A^B_iC)".into(),
                    });
                };
                if b == 0 || i == 0 || c == 0 || b > n || i > dim || c > n {
                    return Err(bad_range());
                }
                let (b, i, c) = (b - 1, i - 1, c - 1);
                let flat = (b * dim + i) * n + c;
                if a_set[flat] {
                    return Err(conflict());
                }
                a_set[flat] = true;
                geo.conn_e.set(b, i, c, val);
            }
            _ => unreachable!(),
        }
    }

    Ok(geo)
}

/// Set entry `(i,j)` to `val` and `(j,i)` to `mirrored`, watching for
/// inconsistent duplicate assignments.
fn set_pair(
    mat: &mut ExprMatrix,
    seen: &mut [bool],
    dim: usize,
    i: usize,
    j: usize,
    val: RationalExpr,
    mirrored: RationalExpr,
) -> Result<(), ()> {
    for (ii, jj, v) in [(i, j, val), (j, i, mirrored)] {
        let flat = ii * dim + jj;
        if seen[flat] {
            if *mat.get(ii, jj) != v {
                return Err(());
            }
        } else {
            seen[flat] = true;
            mat.set(ii, jj, v);
        }
    }
    Ok(())
}

/// Render a [`GeometryInput`] back to the file format (nonzero entries
/// only, deterministic order).
pub fn render_geometry(geo: &GeometryInput) -> String {
    let dim = 2 * geo.m;
    let names = &geo.coords;
    let mut out = String::new();
    out.push_str(&format!("m = {}\n", geo.m));
    out.push_str(&format!("n = {}\n", geo.n));
    out.push_str(&format!("coords = {}\n", geo.coords.join(" ")));
    out.push_str(&format!("frame = {}\n", geo.frame.join(" ")));
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = geo.omega.get(i, j);
            if !v.is_zero() {
                out.push_str(&format!("omega[{},{}] = {}\n", i + 1, j + 1, v.render(names)));
            }
        }
    }
    for k in 0..dim {
        for i in 0..dim {
            for j in i..dim {
                let v = geo.gamma.get(k, i, j);
                if !v.is_zero() {
                    out.push_str(&format!(
                        "Gamma[{},{},{}] = {}\n",
                        k + 1,
                        i + 1,
                        j + 1,
                        v.render(names)
                    ));
                }
            }
        }
    }
    for a in 0..geo.n {
        for b in a..geo.n {
            let v = geo.q.get(a, b);
            if !v.is_zero() {
                out.push_str(&format!("q[{},{}] = {}\n", a + 1, b + 1, v.render(names)));
            }
        }
    }
    for b in 0..geo.n {
        for i in 0..dim {
            for c in 0..geo.n {
                let v = geo.conn_e.get(b, i, c);
                if !v.is_zero() {
                    out.push_str(&format!(
                        "A[{},{},{}] = {}\n",
                        b + 1,
                        i + 1,
                        c + 1,
                        v.render(names)
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = "\
# flat chart, rank-2 bundle
m = 1
n = 2
omega[1,2] = 1
q[1,1] = 1
q[2,2] = 1
";

    #[test]
    fn flat_file_parses_and_validates() {
        let geo = parse_geometry(FLAT).unwrap();
        assert_eq!(geo.m, 1);
        assert_eq!(geo.n, 2);
        assert!(geo.gamma.is_zero()); // omitted entries default to 0
        assert!(geo.validate().is_ok());
    }

    #[test]
    fn antisymmetric_completion() {
        let geo = parse_geometry(FLAT).unwrap();
        assert_eq!(*geo.omega.get(1, 0), RationalExpr::from_int(-1, 2));
    }

    #[test]
    fn symmetric_gamma_completion() {
        let text = format!("{FLAT}Gamma[1,1,2] = x1\n");
        let geo = parse_geometry(&text).unwrap();
        assert_eq!(geo.gamma.get(0, 0, 1), geo.gamma.get(0, 1, 0));
    }

    #[test]
    fn conflicting_entries_rejected() {
        let text = format!("{FLAT}omega[2,1] = 1\n");
        let err = parse_geometry(&text).unwrap_err();
        assert!(matches!(err, FileError::Conflict { .. }));
    }

    #[test]
    fn expression_errors_carry_line() {
        let text = format!("{FLAT}q[1,2] = x9\n");
        match parse_geometry(&text).unwrap_err() {
            FileError::Expr { line, .. } => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_through_renderer() {
        let text = format!("{FLAT}Gamma[2,1,2] = x1/(1+x1^2)\nA[2,1,1] = x2\nA[1,1,2] = -x2\n");
        let geo = parse_geometry(&text).unwrap();
        let printed = render_geometry(&geo);
        let geo2 = parse_geometry(&printed).unwrap();
        assert_eq!(geo.omega, geo2.omega);
        assert_eq!(geo.gamma, geo2.gamma);
        assert_eq!(geo.q, geo2.q);
        assert_eq!(geo.conn_e, geo2.conn_e);
    }
}
