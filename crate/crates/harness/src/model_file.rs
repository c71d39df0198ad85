//! The model file schema: a TOML document describing a hidden Markov model.
//!
//! ```toml
//! schema = 1
//! alphabet = ["a", "b"]
//! states = 2
//! transitions = [
//!   [0.9, 0.1],
//!   [0.1, 0.9],
//! ]
//! emissions = [
//!   [1.0, 0.0],
//!   [0.0, 1.0],
//! ]
//! # optional; defaults to the stationary distribution
//! pi0 = [0.5, 0.5]
//! ```
//!
//! Parsing validates everything: row sums, the alphabet, and that the chain
//! is irreducible and aperiodic. Errors name the offending field or row.

use std::path::Path;

use lzhm_core::markov::{Alphabet, HiddenMarkovModel, MarkovChain, ValidationReport};
use serde::Deserialize;

use crate::error::{read_to_string, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    schema: u32,
    alphabet: Vec<String>,
    states: usize,
    transitions: Vec<Vec<f64>>,
    emissions: Vec<Vec<f64>>,
    #[serde(default)]
    pi0: Option<Vec<f64>>,
}

fn field_error(field: &str) -> impl Fn(lzhm_core::Error) -> Error + '_ {
    move |e| Error::ModelField {
        field: field.to_string(),
        message: e.to_string(),
    }
}

/// Parse and fully validate a model file.
pub fn parse_model(text: &str) -> Result<HiddenMarkovModel> {
    let raw: RawModel = toml::from_str(text).map_err(|e| Error::ModelSyntax(e.to_string()))?;
    if raw.schema != SCHEMA_VERSION {
        return Err(Error::ModelSchema {
            found: raw.schema,
            expected: SCHEMA_VERSION,
        });
    }
    let alphabet = Alphabet::new(raw.alphabet).map_err(field_error("alphabet"))?;
    if raw.transitions.len() != raw.states {
        return Err(Error::ModelField {
            field: "states".to_string(),
            message: format!(
                "states = {} but transitions has {} rows",
                raw.states,
                raw.transitions.len()
            ),
        });
    }
    let chain = MarkovChain::new(raw.transitions).map_err(field_error("transitions"))?;
    let report = chain.validate(0.0).map_err(field_error("transitions"))?;
    if !report.aperiodic {
        return Err(Error::ChainNotErgodic {
            irreducible: report.irreducible,
            period: report.period,
        });
    }
    HiddenMarkovModel::new(chain, alphabet, raw.emissions, raw.pi0).map_err(|e| {
        let field = match &e {
            lzhm_core::Error::BadVectorLength { .. }
            | lzhm_core::Error::VectorNotStochastic { .. }
            | lzhm_core::Error::VectorEntryOutOfRange { .. } => "pi0",
            _ => "emissions",
        };
        Error::ModelField {
            field: field.to_string(),
            message: e.to_string(),
        }
    })
}

pub fn load_model(path: &Path) -> Result<HiddenMarkovModel> {
    parse_model(&read_to_string(path)?)
}

/// Re-run the structural checks for reporting.
pub fn validation_report(model: &HiddenMarkovModel) -> Result<ValidationReport> {
    Ok(model.chain().validate(0.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLIP: &str = r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[0.9, 0.1], [0.1, 0.9]]
emissions = [[1.0, 0.0], [0.0, 1.0]]
"#;

    #[test]
    fn flip_chain_parses_with_stationary_default() {
        let model = parse_model(FLIP).unwrap();
        assert_eq!(model.state_count(), 2);
        assert_eq!(model.alphabet().len(), 2);
        assert!((model.initial_distribution()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn row_sum_error_names_the_row() {
        let bad = FLIP.replace("[0.9, 0.1]", "[0.8, 0.1]");
        let err = parse_model(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("transitions"), "{msg}");
        assert!(msg.contains("row 0"), "{msg}");
    }

    #[test]
    fn iid_uniform_single_state() {
        let text = r#"
schema = 1
alphabet = ["a", "b"]
states = 1
transitions = [[1.0]]
emissions = [[0.5, 0.5]]
"#;
        let model = parse_model(text).unwrap();
        assert_eq!(model.state_count(), 1);
        assert_eq!(model.emission_row(0), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_duplicate_symbols_and_bad_schema() {
        let dup = FLIP.replace("[\"a\", \"b\"]", "[\"a\", \"a\"]");
        assert!(matches!(
            parse_model(&dup),
            Err(Error::ModelField { ref field, .. }) if field == "alphabet"
        ));
        let bad_schema = FLIP.replace("schema = 1", "schema = 9");
        assert!(matches!(
            parse_model(&bad_schema),
            Err(Error::ModelSchema { found: 9, .. })
        ));
    }

    #[test]
    fn rejects_non_ergodic_chains() {
        let periodic = FLIP.replace("[[0.9, 0.1], [0.1, 0.9]]", "[[0.0, 1.0], [1.0, 0.0]]");
        assert!(matches!(
            parse_model(&periodic),
            Err(Error::ChainNotErgodic {
                irreducible: true,
                period: Some(2)
            })
        ));
        let reducible = FLIP.replace("[[0.9, 0.1], [0.1, 0.9]]", "[[1.0, 0.0], [0.5, 0.5]]");
        assert!(matches!(
            parse_model(&reducible),
            Err(Error::ChainNotErgodic {
                irreducible: false,
                ..
            })
        ));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = parse_model("schema = ").unwrap_err();
        assert!(matches!(err, Error::ModelSyntax(_)));
        // toml reports line/column in its message
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn explicit_pi0_is_validated() {
        let with_pi = format!("{FLIP}pi0 = [0.25, 0.75]\n");
        let model = parse_model(&with_pi).unwrap();
        assert_eq!(model.initial_distribution(), &[0.25, 0.75]);
        let bad_pi = format!("{FLIP}pi0 = [0.25, 0.25]\n");
        assert!(matches!(
            parse_model(&bad_pi),
            Err(Error::ModelField { ref field, .. }) if field == "pi0"
        ));
    }
}
