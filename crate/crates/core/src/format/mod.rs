//! Text formats for network descriptions.

mod bif;
mod sexpr;

use std::str::FromStr;

pub use bif::parse_bif_subset;
pub use sexpr::{emit_sexpr, parse_sexpr};

use crate::bn::BayesianNetwork;
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkFormat {
    Sexpr,
    Bif,
}

impl NetworkFormat {
    /// Guesses the format from a file extension; anything but `.bif` is
    /// treated as s-expression text.
    pub fn from_path(path: &std::path::Path) -> NetworkFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("bif") => NetworkFormat::Bif,
            _ => NetworkFormat::Sexpr,
        }
    }
}

impl FromStr for NetworkFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sexpr" | "s-expr" | "lisp" => Ok(NetworkFormat::Sexpr),
            "bif" => Ok(NetworkFormat::Bif),
            other => Err(Error::contract(format!("unknown network format `{other}`"))),
        }
    }
}

/// Source text together with the network parsed from it.
#[derive(Debug, Clone)]
pub struct NetworkDocument {
    pub source_text: String,
    pub parsed: BayesianNetwork,
}

impl NetworkDocument {
    pub fn parse(source_text: String, format: NetworkFormat) -> Result<Self> {
        let parsed = match format {
            NetworkFormat::Sexpr => parse_sexpr(&source_text)?,
            NetworkFormat::Bif => parse_bif_subset(&source_text)?,
        };
        Ok(NetworkDocument {
            source_text,
            parsed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub fn advance(&mut self, ch: char) {
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
    }

    pub fn err(self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, message)
    }
}

/// Parent names and CPT rows of one node.
pub(crate) type Cpt = (Vec<String>, Vec<Vec<f64>>);

/// Turns a structural error from network assembly into a parse error at the
/// declaration of the first offending node.
pub(crate) fn locate<'a>(err: Error, declared: impl Iterator<Item = (&'a str, Pos)>) -> Error {
    let Error::InvalidNetwork(violations) = &err else {
        return err;
    };
    let declared: Vec<(&str, Pos)> = declared.collect();
    let pos = violations
        .iter()
        .filter_map(|v| v.node.as_deref())
        .find_map(|n| declared.iter().find(|(name, _)| *name == n).map(|d| d.1))
        .unwrap_or(Pos { line: 1, column: 1 });
    Error::Parse(pos.err(err.to_string()))
}

/// Every parent-state combination, first parent most significant.
pub(crate) fn all_rows(parent_states: &[&[String]]) -> Vec<Vec<usize>> {
    let mut rows = vec![Vec::new()];
    for states in parent_states {
        rows = rows
            .into_iter()
            .flat_map(|prefix| {
                (0..states.len()).map(move |s| {
                    let mut r = prefix.clone();
                    r.push(s);
                    r
                })
            })
            .collect();
    }
    rows
}

pub(crate) fn check_row(
    row: &[f64],
    k: usize,
    pos: Pos,
    tolerance: f64,
) -> std::result::Result<(), ParseError> {
    if row.len() != k {
        return Err(pos.err(format!("row has {} entries, expected {k}", row.len())));
    }
    if let Some(bad) = row.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
        return Err(pos.err(format!("probability {bad} outside [0, 1]")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > tolerance {
        return Err(pos.err(format!("row sum ≠ 1 (sums to {sum})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_lexicographic() {
        let a = vec!["x".to_string(), "y".to_string()];
        let b = vec!["p".to_string(), "q".to_string(), "r".to_string()];
        let rows = all_rows(&[&a, &b]);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1], vec![0, 1]);
        assert_eq!(rows[3], vec![1, 0]);
        assert_eq!(all_rows(&[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn format_from_path() {
        assert_eq!(
            NetworkFormat::from_path("a/b.BIF".as_ref()),
            NetworkFormat::Bif
        );
        assert_eq!(
            NetworkFormat::from_path("a/b.net".as_ref()),
            NetworkFormat::Sexpr
        );
    }
}
