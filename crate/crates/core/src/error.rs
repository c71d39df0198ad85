use thiserror::Error;

/// Errors produced by the core source/codec machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("entry {value} at row {row}, column {col} is outside [0, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("probability vector has {found} entries, expected {expected}")]
    BadVectorLength { found: usize, expected: usize },
    #[error("probability vector sums to {sum}, expected 1")]
    VectorNotStochastic { sum: f64 },
    #[error("probability vector entry {index} is {value}, outside [0, 1]")]
    VectorEntryOutOfRange { index: usize, value: f64 },
    #[error("expected {expected} emission rows, found {found}")]
    EmissionRowCount { found: usize, expected: usize },
    #[error("chain is not irreducible and aperiodic")]
    NotErgodic,
    #[error("stationary solve left residual {residual} above 1e-12")]
    StationaryResidual { residual: f64 },

    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet has {size} symbols, more than 65535")]
    AlphabetTooLarge { size: usize },
    #[error("duplicate alphabet symbol {symbol:?}")]
    DuplicateSymbol { symbol: String },
    #[error("alphabet has {found} symbols, expected {expected}")]
    AlphabetSizeMismatch { found: usize, expected: usize },
    #[error("symbol index {index} outside alphabet of size {alphabet_size}")]
    SymbolOutOfRange { index: usize, alphabet_size: usize },

    #[error("block space {alphabet_size}^{block_len} exceeds cap {cap}")]
    BlockSpaceTooLarge {
        alphabet_size: usize,
        block_len: usize,
        cap: u64,
    },
    #[error("block length must be at least 1")]
    ZeroBlockLen,

    #[error("the positive-integer code cannot encode 0")]
    ZeroUintCode,
    #[error("bit stream truncated at offset {offset}")]
    Truncated { offset: usize },
    #[error("integer code at bit offset {offset} does not fit in 64 bits")]
    OversizedUintCode { offset: usize },
    #[error("invalid symbol code {index} at bit offset {offset}")]
    InvalidSymbolCode { index: u64, offset: usize },
    #[error("bit string literal contains {found:?}; expected '0' or '1'")]
    BadBitLiteral { found: char },

    #[error("phrase {phrase} references {back_ref}, which is not a prior phrase")]
    ForwardReference { phrase: usize, back_ref: usize },
    #[error("empty-extension phrase at bit offset {offset} before the declared length was reached")]
    PrematureLambda { offset: usize },
    #[error("decoded length {found} does not match declared length {expected}")]
    LengthMismatch { found: usize, expected: usize },

    #[error("input length {n} is not divisible by block length {block_len}")]
    NotBlockAligned { n: usize, block_len: usize },
    #[error("block #{index} has zero probability under the model and no codeword")]
    UnencodableBlock { index: usize },
    #[error("no codeword matches the bits at offset {offset}")]
    UnknownCodeword { offset: usize },
    #[error("codeword lengths violate the Kraft inequality")]
    KraftViolation,

    #[error("transducer transition missing for state {state}, symbol {symbol}")]
    MissingTransition { state: u32, symbol: u16 },

    #[error("input length {n} exceeds the exact-search cap {cap}")]
    ComplexityCapExceeded { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
