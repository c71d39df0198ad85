//! The greedy dictionary parser and its bit-level encoder/decoder.
//!
//! A parse decomposes the input into phrases, each equal to an earlier
//! phrase extended by one symbol (phrase 0 is the empty string). Every
//! phrase is new except possibly the last, which may instead repeat an
//! earlier phrase exactly and carries the empty-extension marker. Each
//! phrase (j, b) is emitted as `uint_code(j + 1)` followed by the
//! fixed-width symbol code of b.

use crate::bitcodec::{uint_code_into, uint_decode, BitCursor, BitString, SymbolCodec};
use crate::error::{Error, Result};

const NO_CHILD: u32 = u32::MAX;

/// One phrase: the referenced prior phrase and the extension symbol
/// (`None` marks the final repeat-only phrase).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LzPhrase {
    pub back_ref: usize,
    pub extension: Option<u16>,
}

/// A complete phrase decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzParse {
    pub phrases: Vec<LzPhrase>,
}

impl LzParse {
    pub fn phrase_count(&self) -> usize {
        self.phrases.len()
    }

    /// Materialize every phrase string (phrase i is phrase `back_ref`
    /// extended by one symbol). Total size equals the input length.
    pub fn phrase_strings(&self) -> Vec<Vec<u16>> {
        let mut strings: Vec<Vec<u16>> = Vec::with_capacity(self.phrases.len() + 1);
        strings.push(Vec::new());
        for phrase in &self.phrases {
            let mut s = strings[phrase.back_ref].clone();
            if let Some(b) = phrase.extension {
                s.push(b);
            }
            strings.push(s);
        }
        strings.remove(0);
        strings
    }

    /// Concatenate the phrases back into the original input.
    pub fn reconstruct(&self) -> Vec<u16> {
        let mut out = Vec::new();
        for s in self.phrase_strings() {
            out.extend_from_slice(&s);
        }
        out
    }
}

/// Greedy parse: each phrase is the shortest prefix of the remaining input
/// that is not already a phrase; a leftover suffix equal to a prior phrase
/// becomes a final phrase with the empty extension.
pub fn lz_parse(input: &[u16], alphabet_size: usize) -> Result<LzParse> {
    // trie over phrases with flat per-node child arrays; node id == phrase
    // index, with node 0 the empty phrase
    let mut children: Vec<u32> = vec![NO_CHILD; alphabet_size];
    let mut phrases: Vec<LzPhrase> = Vec::new();
    let mut pos = 0;
    while pos < input.len() {
        let mut node = 0usize;
        loop {
            if pos == input.len() {
                // the walked suffix equals phrase `node`
                phrases.push(LzPhrase {
                    back_ref: node,
                    extension: None,
                });
                break;
            }
            let sym = input[pos] as usize;
            if sym >= alphabet_size {
                return Err(Error::SymbolOutOfRange {
                    index: sym,
                    alphabet_size,
                });
            }
            let slot = node * alphabet_size + sym;
            if children[slot] == NO_CHILD {
                let id = phrases.len() + 1;
                children[slot] = id as u32;
                children.resize(children.len() + alphabet_size, NO_CHILD);
                phrases.push(LzPhrase {
                    back_ref: node,
                    extension: Some(sym as u16),
                });
                pos += 1;
                break;
            }
            node = children[slot] as usize;
            pos += 1;
        }
    }
    Ok(LzParse { phrases })
}

/// Emit the bit encoding of an existing parse.
pub fn lz_encode_parse(parse: &LzParse, alphabet_size: usize) -> Result<BitString> {
    let codec = SymbolCodec::new(alphabet_size);
    let mut out = BitString::new();
    for phrase in &parse.phrases {
        uint_code_into(phrase.back_ref as u64 + 1, &mut out)?;
        codec.encode(phrase.extension, &mut out)?;
    }
    Ok(out)
}

/// Parse and encode in one step.
pub fn lz_encode(input: &[u16], alphabet_size: usize) -> Result<BitString> {
    lz_encode_parse(&lz_parse(input, alphabet_size)?, alphabet_size)
}

/// Decode a stream produced by [`lz_encode`] with the same alphabet;
/// `n` is the original symbol count from the container header.
pub fn lz_decode(bits: &BitString, alphabet_size: usize, n: usize) -> Result<Vec<u16>> {
    let codec = SymbolCodec::new(alphabet_size);
    let mut cursor = BitCursor::new(bits);
    // per-phrase (parent, extension, total length); index 0 is the empty phrase
    let mut table: Vec<(usize, u16, usize)> = vec![(0, 0, 0)];
    // n comes from an untrusted header: cap the preallocation and let the
    // buffer grow with actual decoded content
    let mut out: Vec<u16> = Vec::with_capacity(n.min(1 << 20));
    while out.len() < n {
        let offset = cursor.pos();
        let back_ref = (uint_decode(&mut cursor)? - 1) as usize;
        if back_ref >= table.len() {
            return Err(Error::ForwardReference {
                phrase: table.len(),
                back_ref,
            });
        }
        let extension = codec.decode(&mut cursor)?;
        let base_len = table[back_ref].2;
        let phrase_len = base_len + usize::from(extension.is_some());
        if out.len() + phrase_len > n {
            return Err(Error::LengthMismatch {
                found: out.len() + phrase_len,
                expected: n,
            });
        }
        let start = out.len();
        out.resize(start + phrase_len, 0);
        match extension {
            Some(b) => {
                out[start + base_len] = b;
                table.push((back_ref, b, phrase_len));
            }
            None => {
                // repeat-only phrase: legal only as the very last one
                if start + phrase_len < n {
                    return Err(Error::PrematureLambda { offset });
                }
            }
        }
        // walk the parent chain to fill the referenced string
        let mut node = back_ref;
        let mut slot = base_len;
        while node != 0 {
            let (parent, sym, _) = table[node];
            slot -= 1;
            out[start + slot] = sym;
            node = parent;
        }
    }
    Ok(out)
}
