use std::path::PathBuf;

use thiserror::Error;

/// Errors from the harness layers: files, containers, and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("model parse error: {0}")]
    ModelSyntax(String),
    #[error("model schema version {found} unsupported (expected {expected})")]
    ModelSchema { found: u32, expected: u32 },
    #[error("model field {field}: {message}")]
    ModelField { field: String, message: String },
    #[error("model chain is not irreducible and aperiodic (irreducible={irreducible}, period={period:?})")]
    ChainNotErgodic {
        irreducible: bool,
        period: Option<u64>,
    },

    #[error("line {line}: unknown symbol {token:?}")]
    UnknownSymbol { token: String, line: usize },

    #[error("container too short ({len} bytes)")]
    ContainerTooShort { len: usize },
    #[error("bad magic bytes {found:?}, expected \"LZHM\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported container version {found}")]
    BadVersion { found: u8 },
    #[error("unknown codec id {found}")]
    UnknownCodec { found: u8 },
    #[error("container alphabet size {container} does not match model alphabet size {model}")]
    AlphabetMismatch { container: usize, model: usize },
    #[error(
        "codebook fingerprint mismatch: container has {container:#010x}, model rebuilds {model:#010x}"
    )]
    FingerprintMismatch { container: u32, model: u32 },
    #[error("the ih codec requires a block length")]
    BlockLenRequired,
    #[error("decompressing requires a model file (--model)")]
    ModelRequired,

    #[error("experiment length {n} is not a multiple of the block length {block_len}")]
    LengthNotAligned { n: usize, block_len: usize },

    #[error(transparent)]
    Core(#[from] lzhm_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn read_bytes(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_bytes(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
