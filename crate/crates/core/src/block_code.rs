//! Per-block prefix-free codes built from an exact block distribution and
//! applied blockwise.
//!
//! Codeword lengths follow the Shannon rule ceil(log2(1/P)), which
//! guarantees both the Kraft inequality and the per-codeword bound
//! `|codeword| <= 1 + log2(1/P)`. Codewords are assigned canonically —
//! blocks sorted by (length, block index) receive lexicographically
//! increasing codewords — so a codebook is a pure function of its
//! distribution and reproducible across implementations.

use crate::bitcodec::{BitCursor, BitString};
use crate::entropy::{pack_block, unpack_block, BlockDistribution};
use crate::error::{Error, Result};
use crate::markov::Alphabet;

/// A prefix-free codeword table over length-L blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    block_len: usize,
    alphabet_size: usize,
    codewords: Vec<(u64, BitString)>, // sorted by packed block index
    fingerprint: u32,
}

impl BlockCode {
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// CRC-32 over the canonical serialization of (block length, alphabet,
    /// codeword lengths); see [`build_shannon_code`].
    pub fn fingerprint(&self) -> u32 {
        self.fingerprint
    }

    /// Number of blocks with a codeword.
    pub fn support_size(&self) -> usize {
        self.codewords.len()
    }

    pub fn codeword(&self, block: u64) -> Option<&BitString> {
        match self.codewords.binary_search_by_key(&block, |e| e.0) {
            Ok(i) => Some(&self.codewords[i].1),
            Err(_) => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BitString)> {
        self.codewords.iter().map(|(b, cw)| (*b, cw))
    }

    /// Mean codeword length in bits under `dist`.
    pub fn expected_length(&self, dist: &BlockDistribution) -> f64 {
        dist.iter()
            .map(|(block, p)| {
                p * self
                    .codeword(block)
                    .map(|cw| cw.len() as f64)
                    .unwrap_or(0.0)
            })
            .sum()
    }
}

/// Increment an MSB-first binary register in place; a carry past the top bit
/// means the Kraft inequality was violated.
fn increment(register: &mut [bool]) -> Result<()> {
    for slot in register.iter_mut().rev() {
        if *slot {
            *slot = false;
        } else {
            *slot = true;
            return Ok(());
        }
    }
    Err(Error::KraftViolation)
}

/// Build the canonical Shannon code for `dist`.
///
/// The fingerprint is CRC-32 (IEEE) over the byte string
/// `block_len:u16be | symbol_count:u16be | (symbol_len:u16be, symbol_utf8)*
/// | codeword_count:u64be | (block:u64be, codeword_len:u16be)*` with the
/// codeword pairs in canonical (length, block) order. This serialization is
/// normative for compressed containers.
pub fn build_shannon_code(dist: &BlockDistribution, alphabet: &Alphabet) -> Result<BlockCode> {
    if alphabet.len() != dist.alphabet_size() {
        return Err(Error::AlphabetSizeMismatch {
            found: alphabet.len(),
            expected: dist.alphabet_size(),
        });
    }
    let mut canonical: Vec<(u32, u64)> = dist
        .iter()
        .map(|(block, p)| {
            let raw = (1.0 / p).log2().ceil();
            let len = if raw <= 0.0 { 0 } else { raw as u32 };
            (len, block)
        })
        .collect();
    canonical.sort_unstable();

    let mut codewords: Vec<(u64, BitString)> = Vec::with_capacity(canonical.len());
    let mut register: Vec<bool> = Vec::new();
    for (i, &(len, block)) in canonical.iter().enumerate() {
        if i == 0 {
            register = vec![false; len as usize];
        } else {
            increment(&mut register)?;
            register.resize(len as usize, false);
        }
        let mut cw = BitString::with_capacity(len as usize);
        for &bit in &register {
            cw.push(bit);
        }
        codewords.push((block, cw));
    }
    codewords.sort_unstable_by_key(|e| e.0);

    let mut hasher = crc32fast::Hasher::new();
    hasher.update(&(dist.block_len() as u16).to_be_bytes());
    hasher.update(&(alphabet.len() as u16).to_be_bytes());
    for symbol in alphabet.symbols() {
        hasher.update(&(symbol.len() as u16).to_be_bytes());
        hasher.update(symbol.as_bytes());
    }
    hasher.update(&(canonical.len() as u64).to_be_bytes());
    for &(len, block) in &canonical {
        hasher.update(&block.to_be_bytes());
        hasher.update(&(len as u16).to_be_bytes());
    }

    Ok(BlockCode {
        block_len: dist.block_len(),
        alphabet_size: dist.alphabet_size(),
        codewords,
        fingerprint: hasher.finalize(),
    })
}

/// Concatenate the codewords of the n/L consecutive blocks of `input`, whose
/// length must be divisible by the block length.
pub fn ih_encode(input: &[u16], code: &BlockCode) -> Result<BitString> {
    if input.len() % code.block_len != 0 {
        return Err(Error::NotBlockAligned {
            n: input.len(),
            block_len: code.block_len,
        });
    }
    let mut out = BitString::new();
    for (index, chunk) in input.chunks(code.block_len).enumerate() {
        for &s in chunk {
            if s as usize >= code.alphabet_size {
                return Err(Error::SymbolOutOfRange {
                    index: s as usize,
                    alphabet_size: code.alphabet_size,
                });
            }
        }
        let block = pack_block(chunk, code.alphabet_size);
        match code.codeword(block) {
            Some(cw) => out.extend(cw),
            None => return Err(Error::UnencodableBlock { index }),
        }
    }
    Ok(out)
}

/// Binary trie over the codewords for prefix-free matching.
struct DecodeTrie {
    children: Vec<[i32; 2]>,
    leaf: Vec<i64>, // packed block + 1, or 0 for none
}

impl DecodeTrie {
    fn build(code: &BlockCode) -> Self {
        let mut trie = DecodeTrie {
            children: vec![[-1, -1]],
            leaf: vec![0],
        };
        for (block, cw) in code.iter() {
            let mut node = 0usize;
            for i in 0..cw.len() {
                let bit = cw.get(i).unwrap() as usize;
                if trie.children[node][bit] < 0 {
                    trie.children[node][bit] = trie.children.len() as i32;
                    trie.children.push([-1, -1]);
                    trie.leaf.push(0);
                }
                node = trie.children[node][bit] as usize;
            }
            trie.leaf[node] = block as i64 + 1;
        }
        trie
    }
}

/// Decode exactly `num_blocks` codewords from the cursor, leaving it just
/// past the final codeword.
pub fn ih_decode_from(
    cursor: &mut BitCursor,
    code: &BlockCode,
    num_blocks: usize,
) -> Result<Vec<u16>> {
    let trie = DecodeTrie::build(code);
    // num_blocks may come from an untrusted header: cap the preallocation
    let mut out = Vec::with_capacity(num_blocks.saturating_mul(code.block_len).min(1 << 20));
    for _ in 0..num_blocks {
        let mut node = 0usize;
        while trie.leaf[node] == 0 {
            let offset = cursor.pos();
            let bit = cursor.read_bit()? as usize;
            match trie.children[node][bit] {
                -1 => return Err(Error::UnknownCodeword { offset }),
                next => node = next as usize,
            }
        }
        let block = (trie.leaf[node] - 1) as u64;
        out.extend(unpack_block(block, code.block_len, code.alphabet_size));
    }
    Ok(out)
}

/// Inverse of [`ih_encode`] given the declared symbol count.
pub fn ih_decode(bits: &BitString, code: &BlockCode, n: usize) -> Result<Vec<u16>> {
    if n % code.block_len != 0 {
        return Err(Error::NotBlockAligned {
            n,
            block_len: code.block_len,
        });
    }
    let mut cursor = BitCursor::new(bits);
    ih_decode_from(&mut cursor, code, n / code.block_len)
}
