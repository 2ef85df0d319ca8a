//! Benchmark networks shipped with the crate.

use std::path::Path;

use crate::bn::{BayesianNetwork, Encoding};
use crate::error::{Error, Result};
use crate::format::{parse_bif_subset, NetworkDocument, NetworkFormat};
use crate::populations::make_cancer;

const ASIA_BIF: &str = include_str!("../networks/asia.bif");
const CANCER_BIF: &str = include_str!("../networks/cancer.bif");
const EARTHQUAKE_BIF: &str = include_str!("../networks/earthquake.bif");
const SACHS_BIF: &str = include_str!("../networks/sachs.bif");
const SURVEY_BIF: &str = include_str!("../networks/survey.bif");

/// Output nodes of the Sachs long-path preset, left end of the pathway.
pub const SACHS_PATH_LEFT: [&str; 5] = ["PKC", "Raf", "Mek", "Erk", "Akt"];

/// Names accepted by [`builtin_network`].
pub const BUILTIN_NAMES: [&str; 7] = [
    "cancer",
    "cancer-bif",
    "asia",
    "survey",
    "sachs",
    "sachs-path-left",
    "earthquake",
];

/// BIF source text of a builtin network, if it has one.
pub fn builtin_bif(name: &str) -> Option<&'static str> {
    match name {
        "asia" => Some(ASIA_BIF),
        "cancer" | "cancer-bif" => Some(CANCER_BIF),
        "earthquake" => Some(EARTHQUAKE_BIF),
        "sachs" | "sachs-path-left" => Some(SACHS_BIF),
        "survey" => Some(SURVEY_BIF),
        _ => None,
    }
}

/// A builtin network with its default outputs: every node, one-hot, except
/// for `sachs-path-left`.
pub fn builtin_network(name: &str) -> Result<BayesianNetwork> {
    match name {
        "cancer" => Ok(make_cancer()),
        "sachs-path-left" => {
            let bn = parse_bif_subset(SACHS_BIF)?;
            let outputs: Vec<String> = SACHS_PATH_LEFT.iter().map(|s| s.to_string()).collect();
            bn.with_outputs(&outputs, Encoding::OneHot)
        }
        other => match builtin_bif(other) {
            Some(text) => parse_bif_subset(text),
            None => Err(Error::contract(format!(
                "unknown builtin network `{other}` (known: {})",
                BUILTIN_NAMES.join(", ")
            ))),
        },
    }
}

/// Resolves a builtin name or reads a network file, guessing the format from
/// the extension unless one is given.
pub fn load_network(source: &str, format: Option<NetworkFormat>) -> Result<BayesianNetwork> {
    if BUILTIN_NAMES.contains(&source) && !Path::new(source).exists() {
        return builtin_network(source);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path)?;
    let format = format.unwrap_or_else(|| NetworkFormat::from_path(path));
    Ok(NetworkDocument::parse(text, format)?.parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_one_dimensions() {
        for (name, d) in [
            ("cancer", 10),
            ("asia", 16),
            ("survey", 14),
            ("sachs-path-left", 15),
        ] {
            assert_eq!(builtin_network(name).unwrap().dim(), d, "{name}");
        }
    }

    #[test]
    fn sizes() {
        let asia = builtin_network("asia").unwrap();
        assert_eq!((asia.node_count(), asia.param_count()), (8, 16));
        let sachs = builtin_network("sachs").unwrap();
        assert_eq!(sachs.node_count(), 11);
        assert!(builtin_network("nope").is_err());
    }
}
