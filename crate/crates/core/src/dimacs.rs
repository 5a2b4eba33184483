//! DIMACS CNF reading and writing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{Clause, Formula};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: clause data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    Token { line: usize, token: String },
    #[error("line {line}: final clause is not terminated by 0")]
    Unterminated { line: usize },
    #[error("input is not valid UTF-8")]
    Encoding,
}

/// A DIMACS file with its clauses in file order.
///
/// Tautological clauses are kept as `None` so that positions still line up
/// with clause ids used by external certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsCnf {
    pub num_vars: u32,
    pub declared_clauses: usize,
    pub clauses: Vec<Option<Clause>>,
}

impl DimacsCnf {
    /// Canonical formula: tautologies dropped, duplicates merged.
    pub fn to_formula(&self) -> Formula {
        Formula::new(self.clauses.iter().flatten().cloned(), self.num_vars)
    }
}

/// Parses DIMACS CNF text, keeping clause order.
pub fn parse_dimacs_clauses(text: &[u8]) -> Result<DimacsCnf, ParseError> {
    let text = std::str::from_utf8(text).map_err(|_| ParseError::Encoding)?;
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::Header { line, msg: "duplicate header".into() });
            }
            header = Some(parse_header(trimmed, line)?);
            continue;
        }
        if header.is_none() {
            return Err(ParseError::MissingHeader { line });
        }
        last_line = line;
        for token in trimmed.split_whitespace() {
            let value: i32 = match token.parse() {
                Ok(v) if token != "-0" && v != i32::MIN => v,
                _ => {
                    return Err(ParseError::Token { line, token: token.to_string() });
                }
            };
            if value == 0 {
                clauses.push(Clause::from_dimacs(&pending));
                pending.clear();
            } else {
                pending.push(value);
            }
        }
    }
    if !pending.is_empty() {
        return Err(ParseError::Unterminated { line: last_line });
    }
    let (declared_vars, declared_clauses) = header.ok_or(ParseError::MissingHeader { line: 0 })?;
    let max_seen = clauses.iter().flatten().map(Clause::max_var).max().unwrap_or(0);
    Ok(DimacsCnf {
        num_vars: declared_vars.max(max_seen),
        declared_clauses,
        clauses,
    })
}

fn parse_header(line_text: &str, line: usize) -> Result<(u32, usize), ParseError> {
    let parts: Vec<&str> = line_text.split_whitespace().collect();
    let bad = |msg: &str| ParseError::Header { line, msg: msg.to_string() };
    if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
        return Err(bad("expected `p cnf <vars> <clauses>`"));
    }
    let vars = parts[2].parse().map_err(|_| bad("variable count is not a number"))?;
    let count = parts[3].parse().map_err(|_| bad("clause count is not a number"))?;
    Ok((vars, count))
}

/// Parses DIMACS CNF text into a canonical formula.
pub fn parse_dimacs(text: &[u8]) -> Result<Formula, ParseError> {
    parse_dimacs_clauses(text).map(|cnf| cnf.to_formula())
}

/// Writes a formula in DIMACS with clauses in canonical order.
///
/// Each entry of `comments` becomes a `c` line ahead of the header.
pub fn write_dimacs(formula: &Formula, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p cnf {} {}", formula.num_vars(), formula.len());
    for clause in formula {
        if clause.is_empty() {
            out.push_str("0\n");
        } else {
            let _ = writeln!(out, "{clause} 0");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_running_example() {
        let f = parse_dimacs(b"p cnf 2 3\n1 -2 0\n-1 0\n2 0\n").unwrap();
        let expected = Formula::from_dimacs(&[&[1, -2], &[-1], &[2]]);
        assert_eq!(f, expected);
        assert_eq!(f.num_vars(), 2);
    }

    #[test]
    fn drops_tautologies_and_duplicates() {
        assert!(parse_dimacs(b"p cnf 1 1\n1 -1 0\n").unwrap().is_empty());
        let f = parse_dimacs(b"p cnf 2 2\n1 1 2 0\n1 2 0\n").unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.clauses()[0], Clause::from_dimacs(&[1, 2]).unwrap());
    }

    #[test]
    fn clauses_may_span_lines_and_comments() {
        let text = b"c hello\np cnf 3 2\n1 2\n3 0 -1\nc mid\n 0\n";
        let cnf = parse_dimacs_clauses(text).unwrap();
        assert_eq!(cnf.clauses.len(), 2);
        assert_eq!(cnf.clauses[1], Clause::from_dimacs(&[-1]));
    }

    #[test]
    fn num_vars_takes_max_of_header_and_content() {
        let f = parse_dimacs(b"p cnf 1 1\n5 0\n").unwrap();
        assert_eq!(f.num_vars(), 5);
    }

    #[test]
    fn empty_clause_line() {
        let f = parse_dimacs(b"p cnf 1 2\n0\n1 0\n").unwrap();
        assert!(f.contains_empty());
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(
            parse_dimacs(b"p cnf x 1\n1 0\n"),
            Err(ParseError::Header { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs(b"p cnf 2 1\n1 a 0\n"),
            Err(ParseError::Token { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs(b"p cnf 2 1\n1 -0 0\n"),
            Err(ParseError::Token { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs(b"p cnf 2 2\n1 0\n\n2\n"),
            Err(ParseError::Unterminated { line: 4 })
        ));
        assert!(matches!(parse_dimacs(b"1 0\n"), Err(ParseError::MissingHeader { line: 1 })));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let f = Formula::from_dimacs(&[&[2, -1], &[-2], &[1, 3], &[]]);
        let text = write_dimacs(&f, &["family=test".into()]);
        assert!(text.starts_with("c family=test\np cnf 3 4\n0\n"));
        assert_eq!(parse_dimacs(text.as_bytes()).unwrap(), f);
    }
}
