#![allow(dead_code)] // each test target uses a different slice of these fixtures

//! Shared fixtures: the model set used across integration and acceptance
//! tests. Every model is routed through the TOML parser so the fixtures
//! exercise the same path as user-supplied files.

use lzhm_core::markov::HiddenMarkovModel;
use lzhm_harness::model_file::parse_model;

pub const UNIFORM_BINARY: &str = r#"
schema = 1
alphabet = ["a", "b"]
states = 1
transitions = [[1.0]]
emissions = [[0.5, 0.5]]
"#;

pub const FLIP01: &str = r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[0.9, 0.1], [0.1, 0.9]]
emissions = [[1.0, 0.0], [0.0, 1.0]]
"#;

pub const FLIP03: &str = r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[0.7, 0.3], [0.3, 0.7]]
emissions = [[1.0, 0.0], [0.0, 1.0]]
"#;

pub const HIDDEN2: &str = r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[0.9, 0.1], [0.2, 0.8]]
emissions = [[0.8, 0.2], [0.3, 0.7]]
"#;

pub const QUATERNARY: &str = r#"
schema = 1
alphabet = ["a", "b", "c", "d"]
states = 2
transitions = [[0.85, 0.15], [0.25, 0.75]]
emissions = [[0.55, 0.25, 0.15, 0.05], [0.05, 0.15, 0.25, 0.55]]
"#;

pub fn model(toml: &str) -> HiddenMarkovModel {
    parse_model(toml).expect("fixture model parses")
}

/// (name, model, block length used for blockwise-codec tests)
pub fn all_models() -> Vec<(&'static str, HiddenMarkovModel, usize)> {
    vec![
        ("uniform_binary", model(UNIFORM_BINARY), 8),
        ("flip01", model(FLIP01), 8),
        ("flip03", model(FLIP03), 8),
        ("hidden2", model(HIDDEN2), 8),
        ("quaternary", model(QUATERNARY), 4),
    ]
}

pub fn binary_models() -> Vec<(&'static str, HiddenMarkovModel)> {
    vec![
        ("uniform_binary", model(UNIFORM_BINARY)),
        ("flip01", model(FLIP01)),
        ("flip03", model(FLIP03)),
        ("hidden2", model(HIDDEN2)),
    ]
}
