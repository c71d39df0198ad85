//! The compressed-file container.
//!
//! Layout (all integers big-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "LZHM"
//! 4       1     version (1)
//! 5       1     codec id: 0 = lz, 1 = ih
//! 6       2     alphabet size
//! 8       8     original symbol count n
//! [ih only]
//! 16      2     block length L
//! 18      4     codebook fingerprint (CRC-32)
//! ```
//!
//! The payload bits follow the header, zero-padded to a byte boundary.
//! For lz the payload is the phrase stream. For ih it is the trailing
//! `n mod L` symbols stored raw (fixed-width symbol codes), followed by the
//! codeword stream of the leading `n - n mod L` symbols.

use std::path::Path;

use lzhm_core::bitcodec::{BitCursor, BitString, SymbolCodec};
use lzhm_core::block_code::{build_shannon_code, ih_decode_from, ih_encode, BlockCode};
use lzhm_core::entropy::{block_distribution, DEFAULT_BLOCK_CAP};
use lzhm_core::lz::{lz_decode, lz_encode};
use lzhm_core::markov::HiddenMarkovModel;

use crate::error::{read_bytes, read_to_string, write_bytes, Error, Result};
use crate::textio::{format_symbol_text, parse_symbol_text};

pub const MAGIC: [u8; 4] = *b"LZHM";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Codec {
    Lz,
    Ih,
}

impl Codec {
    pub fn id(self) -> u8 {
        match self {
            Codec::Lz => 0,
            Codec::Ih => 1,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Codec::Lz),
            1 => Ok(Codec::Ih),
            found => Err(Error::UnknownCodec { found }),
        }
    }
}

fn build_code(model: &HiddenMarkovModel, block_len: usize) -> Result<BlockCode> {
    let dist = block_distribution(model, block_len, DEFAULT_BLOCK_CAP)?;
    Ok(build_shannon_code(&dist, model.alphabet())?)
}

/// Compress a symbol sequence into container bytes.
pub fn compress(
    symbols: &[u16],
    model: &HiddenMarkovModel,
    codec: Codec,
    block_len: Option<usize>,
) -> Result<Vec<u8>> {
    let alphabet_size = model.alphabet().len();
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&MAGIC);
    bytes.push(VERSION);
    bytes.push(codec.id());
    bytes.extend_from_slice(&(alphabet_size as u16).to_be_bytes());
    bytes.extend_from_slice(&(symbols.len() as u64).to_be_bytes());

    let payload = match codec {
        Codec::Lz => lz_encode(symbols, alphabet_size)?,
        Codec::Ih => {
            let block_len = block_len.ok_or(Error::BlockLenRequired)?;
            let code = build_code(model, block_len)?;
            bytes.extend_from_slice(&(block_len as u16).to_be_bytes());
            bytes.extend_from_slice(&code.fingerprint().to_be_bytes());
            let body = symbols.len() - symbols.len() % block_len;
            let mut payload = BitString::new();
            let sym_codec = SymbolCodec::new(alphabet_size);
            for &s in &symbols[body..] {
                sym_codec.encode(Some(s), &mut payload)?;
            }
            payload.extend(&ih_encode(&symbols[..body], &code)?);
            payload
        }
    };
    bytes.extend_from_slice(payload.as_bytes());
    Ok(bytes)
}

/// Decompress container bytes back into symbols, using `model` for the
/// alphabet and (for ih) the codebook.
pub fn decompress(bytes: &[u8], model: &HiddenMarkovModel) -> Result<Vec<u16>> {
    if bytes.len() < 16 {
        return Err(Error::ContainerTooShort { len: bytes.len() });
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::BadMagic {
            found: [bytes[0], bytes[1], bytes[2], bytes[3]],
        });
    }
    if bytes[4] != VERSION {
        return Err(Error::BadVersion { found: bytes[4] });
    }
    let codec = Codec::from_id(bytes[5])?;
    let alphabet_size = u16::from_be_bytes([bytes[6], bytes[7]]) as usize;
    if alphabet_size != model.alphabet().len() {
        return Err(Error::AlphabetMismatch {
            container: alphabet_size,
            model: model.alphabet().len(),
        });
    }
    let n = u64::from_be_bytes(bytes[8..16].try_into().unwrap()) as usize;

    match codec {
        Codec::Lz => {
            let payload =
                BitString::from_bytes(&bytes[16..], (bytes.len() - 16) * 8).expect("exact length");
            Ok(lz_decode(&payload, alphabet_size, n)?)
        }
        Codec::Ih => {
            if bytes.len() < 22 {
                return Err(Error::ContainerTooShort { len: bytes.len() });
            }
            let block_len = u16::from_be_bytes([bytes[16], bytes[17]]) as usize;
            let fingerprint = u32::from_be_bytes(bytes[18..22].try_into().unwrap());
            let code = build_code(model, block_len)?;
            if code.fingerprint() != fingerprint {
                return Err(Error::FingerprintMismatch {
                    container: fingerprint,
                    model: code.fingerprint(),
                });
            }
            let payload =
                BitString::from_bytes(&bytes[22..], (bytes.len() - 22) * 8).expect("exact length");
            let mut cursor = BitCursor::new(&payload);
            let sym_codec = SymbolCodec::new(alphabet_size);
            let remainder_len = n % block_len;
            let mut remainder = Vec::with_capacity(remainder_len);
            for _ in 0..remainder_len {
                let offset = cursor.pos();
                match sym_codec.decode(&mut cursor)? {
                    Some(s) => remainder.push(s),
                    None => {
                        return Err(Error::Core(lzhm_core::Error::InvalidSymbolCode {
                            index: sym_codec.marker_index(),
                            offset,
                        }))
                    }
                }
            }
            let mut out = ih_decode_from(&mut cursor, &code, (n - remainder_len) / block_len)?;
            out.extend(remainder);
            Ok(out)
        }
    }
}

/// Compress a symbol text file into a container file.
pub fn compress_file(
    input: &Path,
    output: &Path,
    model: &HiddenMarkovModel,
    codec: Codec,
    block_len: Option<usize>,
) -> Result<()> {
    let symbols = parse_symbol_text(&read_to_string(input)?, model.alphabet())?;
    let bytes = compress(&symbols, model, codec, block_len)?;
    write_bytes(output, &bytes)
}

/// Decompress a container file back into symbol text.
pub fn decompress_file(input: &Path, output: &Path, model: &HiddenMarkovModel) -> Result<()> {
    let symbols = decompress(&read_bytes(input)?, model)?;
    write_bytes(output, format_symbol_text(&symbols, model.alphabet()).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_file::parse_model;
    use lzhm_core::markov::InitialDist;

    fn flip_model() -> HiddenMarkovModel {
        parse_model(
            r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[0.9, 0.1], [0.1, 0.9]]
emissions = [[1.0, 0.0], [0.0, 1.0]]
"#,
        )
        .unwrap()
    }

    #[test]
    fn lz_container_roundtrip() {
        let model = flip_model();
        let path = model.sample_path(4321, 9, InitialDist::Stationary).unwrap();
        let bytes = compress(&path.symbols, &model, Codec::Lz, None).unwrap();
        assert_eq!(&bytes[0..4], b"LZHM");
        assert_eq!(bytes[5], 0);
        assert_eq!(decompress(&bytes, &model).unwrap(), path.symbols);
    }

    #[test]
    fn ih_container_roundtrip_with_remainder() {
        let model = flip_model();
        // 4321 is not a multiple of 16; the tail is stored raw
        let path = model.sample_path(4321, 10, InitialDist::Stationary).unwrap();
        let bytes = compress(&path.symbols, &model, Codec::Ih, Some(16)).unwrap();
        assert_eq!(bytes[5], 1);
        assert_eq!(u16::from_be_bytes([bytes[16], bytes[17]]), 16);
        assert_eq!(decompress(&bytes, &model).unwrap(), path.symbols);
    }

    #[test]
    fn empty_input_is_a_valid_container() {
        let model = flip_model();
        for (codec, block_len) in [(Codec::Lz, None), (Codec::Ih, Some(8))] {
            let bytes = compress(&[], &model, codec, block_len).unwrap();
            let n = u64::from_be_bytes(bytes[8..16].try_into().unwrap());
            assert_eq!(n, 0);
            assert_eq!(decompress(&bytes, &model).unwrap(), Vec::<u16>::new());
        }
    }

    #[test]
    fn header_errors_are_distinct() {
        let model = flip_model();
        let good = compress(&[0, 1, 0], &model, Codec::Lz, None).unwrap();

        assert!(matches!(
            decompress(&good[..10], &model),
            Err(Error::ContainerTooShort { len: 10 })
        ));

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decompress(&bad, &model), Err(Error::BadMagic { .. })));

        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(
            decompress(&bad, &model),
            Err(Error::BadVersion { found: 9 })
        ));

        let mut bad = good.clone();
        bad[5] = 7;
        assert!(matches!(
            decompress(&bad, &model),
            Err(Error::UnknownCodec { found: 7 })
        ));

        let mut bad = good.clone();
        bad[7] = 3; // alphabet size 3 vs model's 2
        assert!(matches!(
            decompress(&bad, &model),
            Err(Error::AlphabetMismatch { container: 3, model: 2 })
        ));
    }

    #[test]
    fn ih_fingerprint_mismatch_is_detected() {
        let model = flip_model();
        let other = parse_model(
            r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[0.7, 0.3], [0.3, 0.7]]
emissions = [[1.0, 0.0], [0.0, 1.0]]
"#,
        )
        .unwrap();
        let path = model.sample_path(256, 3, InitialDist::Stationary).unwrap();
        let bytes = compress(&path.symbols, &model, Codec::Ih, Some(8)).unwrap();
        assert!(matches!(
            decompress(&bytes, &other),
            Err(Error::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn truncated_payload_errors() {
        let model = flip_model();
        let path = model.sample_path(500, 4, InitialDist::Stationary).unwrap();
        let bytes = compress(&path.symbols, &model, Codec::Lz, None).unwrap();
        let cut = &bytes[..bytes.len() - 3];
        assert!(matches!(
            decompress(cut, &model),
            Err(Error::Core(lzhm_core::Error::Truncated { .. }))
                | Err(Error::Core(lzhm_core::Error::LengthMismatch { .. }))
        ));
    }

    #[test]
    fn ih_requires_block_len() {
        let model = flip_model();
        assert!(matches!(
            compress(&[0, 1], &model, Codec::Ih, None),
            Err(Error::BlockLenRequired)
        ));
    }

    #[test]
    fn adversarial_bytes_error_without_panicking() {
        use lzhm_core::rng::SplitMix64;
        let model = flip_model();
        let mut rng = SplitMix64::new(0xBAD);
        // pure noise
        for _ in 0..200 {
            let len = (rng.next_u64() % 64) as usize;
            let bytes: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
            assert!(decompress(&bytes, &model).is_err());
        }
        // valid headers with garbage payloads and hostile lengths
        for codec in [Codec::Lz, Codec::Ih] {
            let block_len = matches!(codec, Codec::Ih).then_some(8);
            let good = compress(&[0, 1, 0, 0, 1, 0, 1, 1], &model, codec, block_len).unwrap();
            for _ in 0..200 {
                let mut bytes = good.clone();
                bytes[8..16].copy_from_slice(&rng.next_u64().to_be_bytes());
                let tail = bytes.len();
                for b in &mut bytes[22.min(tail)..] {
                    *b = rng.next_u64() as u8;
                }
                let _ = decompress(&bytes, &model); // may error; must not panic
            }
        }
    }

    #[test]
    fn file_roundtrip_byte_exact() {
        let model = flip_model();
        let dir = std::env::temp_dir().join(format!("lzhm-container-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let input = dir.join("in.txt");
        let packed = dir.join("out.lzhm");
        let restored = dir.join("restored.txt");

        let path = model.sample_path(100_000, 5, InitialDist::Stationary).unwrap();
        let text = format_symbol_text(&path.symbols, model.alphabet());
        std::fs::write(&input, &text).unwrap();

        for (codec, block_len) in [(Codec::Lz, None), (Codec::Ih, Some(8))] {
            compress_file(&input, &packed, &model, codec, block_len).unwrap();
            decompress_file(&packed, &restored, &model).unwrap();
            assert_eq!(std::fs::read(&input).unwrap(), std::fs::read(&restored).unwrap());
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
