//! Bit-level primitives: exact-length bit strings with MSB-first framing,
//! the prefix-free Elias-delta code for positive integers, and the
//! fixed-width symbol code over an alphabet extended by the empty-extension
//! marker.
//!
//! The codeword definitions here are normative for compressed files:
//!
//! * `uint_code(i)`: with N the bit length of i and G the bit length of N,
//!   emit G-1 zeros, then N in G bits, then the low N-1 bits of i.
//!   `|uint_code(i)| <= log2(i) + 2*log2(log2(i) + 1) + 3` for every i >= 1.
//! * symbol code: the symbol's alphabet index (the marker maps to index
//!   `alphabet_size`) written in exactly `ceil(log2(alphabet_size + 1))`
//!   bits, most significant bit first.

use std::fmt;

use crate::error::{Error, Result};

/// An exact-length sequence of bits. Bits are stored MSB-first within each
/// byte; unused trailing bits of the final byte are always zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Length in bits.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 1 << (7 - self.len % 8);
        }
        self.len += 1;
    }

    /// Append the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &BitString) {
        if self.len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
            return;
        }
        let mut remaining = other.len;
        for &byte in &other.bytes {
            let take = remaining.min(8) as u32;
            self.push_bits((byte >> (8 - take)) as u64, take);
            remaining -= take as usize;
        }
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        if index >= self.len {
            return None;
        }
        Some((self.bytes[index / 8] >> (7 - index % 8)) & 1 == 1)
    }

    /// Backing bytes, zero-padded to a byte boundary.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Rebuild from padded bytes and an exact bit length. Pad bits beyond
    /// `len` are masked off so equality stays well defined.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::Truncated {
                offset: bytes.len() * 8,
            });
        }
        let mut bytes = bytes[..len.div_ceil(8)].to_vec();
        if len % 8 != 0 {
            let last = bytes.len() - 1;
            bytes[last] &= 0xFFu8 << (8 - len % 8);
        }
        Ok(Self { bytes, len })
    }

    /// Parse a literal like "00101"; handy for fixtures and docs.
    pub fn from_01(s: &str) -> Result<Self> {
        let mut out = Self::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => out.push(false),
                '1' => out.push(true),
                found => return Err(Error::BadBitLiteral { found }),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i).unwrap() { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self}, len={})", self.len)
    }
}

/// Read-only bit cursor over a `BitString`.
#[derive(Debug, Clone)]
pub struct BitCursor<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitCursor<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        match self.bits.get(self.pos) {
            Some(bit) => {
                self.pos += 1;
                Ok(bit)
            }
            None => Err(Error::Truncated { offset: self.pos }),
        }
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | self.read_bit()? as u64;
        }
        Ok(value)
    }
}

/// Codeword length of `uint_code(i)` in bits; `i` must be >= 1.
pub fn uint_code_len(i: u64) -> u32 {
    debug_assert!(i >= 1);
    let n = 64 - i.leading_zeros();
    let g = 32 - n.leading_zeros();
    n + 2 * g - 2
}

/// Append the prefix-free integer codeword for `i >= 1`.
pub fn uint_code_into(i: u64, out: &mut BitString) -> Result<()> {
    if i == 0 {
        return Err(Error::ZeroUintCode);
    }
    let n = 64 - i.leading_zeros();
    let g = 32 - n.leading_zeros();
    out.push_bits(0, g - 1);
    out.push_bits(n as u64, g);
    if n > 1 {
        out.push_bits(i & ((1u64 << (n - 1)) - 1), n - 1);
    }
    Ok(())
}

pub fn uint_code(i: u64) -> Result<BitString> {
    let mut out = BitString::with_capacity(if i > 0 { uint_code_len(i) as usize } else { 0 });
    uint_code_into(i, &mut out)?;
    Ok(out)
}

/// Inverse of [`uint_code`]; advances the cursor by exactly one codeword.
pub fn uint_decode(cursor: &mut BitCursor) -> Result<u64> {
    let start = cursor.pos();
    let mut zeros = 0u32;
    while !cursor.read_bit()? {
        zeros += 1;
        if zeros > 6 {
            // G-1 zeros with G > 7 would put N past 64 bits.
            return Err(Error::OversizedUintCode { offset: start });
        }
    }
    let g = zeros + 1;
    let n = ((1u64 << (g - 1)) | cursor.read_bits(g - 1)?) as u32;
    if n > 64 {
        return Err(Error::OversizedUintCode { offset: start });
    }
    if n == 1 {
        return Ok(1);
    }
    let low = cursor.read_bits(n - 1)?;
    Ok((1u64 << (n - 1)) | low)
}

/// Fixed-width code over `alphabet_size` symbols plus the empty-extension
/// marker. Width is `ceil(log2(alphabet_size + 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolCodec {
    alphabet_size: usize,
    width: u32,
}

impl SymbolCodec {
    pub fn new(alphabet_size: usize) -> Self {
        debug_assert!(alphabet_size >= 1);
        let width = usize::BITS - alphabet_size.leading_zeros();
        Self {
            alphabet_size,
            width,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Index reserved for the empty-extension marker.
    pub fn marker_index(&self) -> u64 {
        self.alphabet_size as u64
    }

    /// `None` encodes the marker.
    pub fn encode(&self, symbol: Option<u16>, out: &mut BitString) -> Result<()> {
        let index = match symbol {
            Some(s) if (s as usize) < self.alphabet_size => s as u64,
            Some(s) => {
                return Err(Error::SymbolOutOfRange {
                    index: s as usize,
                    alphabet_size: self.alphabet_size,
                })
            }
            None => self.marker_index(),
        };
        out.push_bits(index, self.width);
        Ok(())
    }

    pub fn decode(&self, cursor: &mut BitCursor) -> Result<Option<u16>> {
        let offset = cursor.pos();
        let index = cursor.read_bits(self.width)?;
        if index < self.alphabet_size as u64 {
            Ok(Some(index as u16))
        } else if index == self.marker_index() {
            Ok(None)
        } else {
            Err(Error::InvalidSymbolCode { index, offset })
        }
    }
}
