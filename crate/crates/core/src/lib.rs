//! Sources, codes, and machines for studying dictionary compression of
//! hidden Markov sources.
//!
//! The crate provides:
//!
//! * [`markov`] — finite-state Markov chains and hidden Markov models:
//!   validation (irreducibility, aperiodicity, period), stationary and
//!   L-step behavior, mixing deficits, and seed-reproducible path sampling.
//! * [`entropy`] — exact block distributions P_L, block entropies, the two
//!   entropy-rate estimates H_L/L and H_L - H_{L-1}, the closed-form rate of
//!   a visible chain, and the compressive-block-length test.
//! * [`bitcodec`] — exact-length bit strings, the prefix-free Elias-delta
//!   integer code, and the fixed-width symbol code.
//! * [`lz`] — the greedy dictionary parser and its encoder/decoder.
//! * [`block_code`] — canonical Shannon codes over length-L blocks and the
//!   blockwise encoder/decoder built from them.
//! * [`fst`] — finite-state transducers, compilation of a block code into a
//!   transducer, and the finite-state compressor length lower bound.
//! * [`complexity`] — the maximum-distinct-pieces string complexity, its
//!   exact small-n search, the square-root witness, and the encoded-length
//!   upper bound.
//! * [`rng`] — SplitMix64 and inverse-CDF categorical sampling, the fixed
//!   randomness contract behind every experiment.

pub mod bitcodec;
pub mod block_code;
pub mod complexity;
pub mod entropy;
mod error;
pub mod fst;
pub mod lz;
pub mod markov;
pub mod rng;

pub use error::{Error, Result};
