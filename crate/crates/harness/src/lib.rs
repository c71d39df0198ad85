//! Files, formats, and experiments around the core compressors: the TOML
//! model-file schema, symbol text, the compressed-file container, the
//! rate-convergence experiment, and epoch concentration statistics.

pub mod container;
pub mod epoch;
mod error;
pub mod experiments;
pub mod model_file;
pub mod textio;

pub use error::{Error, Result};
