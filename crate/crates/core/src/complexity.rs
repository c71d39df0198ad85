//! The string-complexity measure: the largest number of pairwise-distinct
//! pieces a string can be cut into, an exact small-n search for it, and the
//! square-root witness construction that lower-bounds it.

use std::collections::HashSet;

use crate::bitcodec::SymbolCodec;
use crate::error::{Error, Result};

/// Default cap for the exact search; the search is exponential in the worst
/// case.
pub const DEFAULT_EXACT_CAP: usize = 24;

/// An ordered cut of a string into nonempty, pairwise-distinct pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub pieces: Vec<Vec<u16>>,
}

impl Decomposition {
    /// Structural validity: nonempty distinct pieces whose concatenation is
    /// exactly `subject`.
    pub fn is_valid_for(&self, subject: &[u16]) -> bool {
        if self.pieces.iter().any(|p| p.is_empty()) {
            return false;
        }
        let mut seen: HashSet<&[u16]> = HashSet::new();
        for piece in &self.pieces {
            if !seen.insert(piece) {
                return false;
            }
        }
        let concat: Vec<u16> = self.pieces.iter().flatten().copied().collect();
        concat == subject
    }
}

/// Upper bound on how many distinct nonempty strings over `alphabet_size`
/// symbols can fit in a total budget of `budget` symbols: greedily take all
/// short strings first.
fn max_pieces_in_budget(budget: usize, alphabet_size: usize) -> usize {
    let mut remaining = budget;
    let mut count = 0usize;
    let mut len = 1usize;
    let mut strings_of_len: u128 = alphabet_size as u128;
    while remaining >= len {
        let fit = (remaining / len) as u128;
        let take = fit.min(strings_of_len);
        count += take as usize;
        remaining -= take as usize * len;
        if take < fit {
            len += 1;
            strings_of_len = strings_of_len.saturating_mul(alphabet_size as u128);
        } else {
            break;
        }
    }
    count
}

/// Exact maximum number of distinct pieces, with a witness decomposition.
/// Depth-first search over cut positions with a used-piece set and a
/// budget-based branch-and-bound prune.
pub fn max_distinct_parse(input: &[u16], cap: usize) -> Result<(usize, Decomposition)> {
    let n = input.len();
    if n > cap {
        return Err(Error::ComplexityCapExceeded { n, cap });
    }
    if n == 0 {
        return Ok((0, Decomposition { pieces: vec![] }));
    }
    let alphabet_size = input.iter().map(|&s| s as usize + 1).max().unwrap_or(1);
    let budget_bound: Vec<usize> = (0..=n)
        .map(|r| max_pieces_in_budget(r, alphabet_size))
        .collect();

    struct Search<'a> {
        input: &'a [u16],
        bound: &'a [usize],
        used: HashSet<&'a [u16]>,
        cuts: Vec<usize>,
        best: usize,
        best_cuts: Vec<usize>,
    }

    impl<'a> Search<'a> {
        fn run(&mut self, pos: usize) {
            let n = self.input.len();
            if pos == n {
                if self.cuts.len() > self.best {
                    self.best = self.cuts.len();
                    self.best_cuts = self.cuts.clone();
                }
                return;
            }
            if self.cuts.len() + self.bound[n - pos] <= self.best {
                return;
            }
            for end in pos + 1..=n {
                let piece = &self.input[pos..end];
                if self.used.contains(piece) {
                    continue;
                }
                self.used.insert(piece);
                self.cuts.push(end);
                self.run(end);
                self.cuts.pop();
                self.used.remove(piece);
            }
        }
    }

    let mut search = Search {
        input,
        bound: &budget_bound,
        used: HashSet::new(),
        cuts: Vec::new(),
        best: 0,
        best_cuts: Vec::new(),
    };
    search.run(0);

    let mut pieces = Vec::with_capacity(search.best_cuts.len());
    let mut start = 0;
    for &end in &search.best_cuts {
        pieces.push(input[start..end].to_vec());
        start = end;
    }
    Ok((search.best, Decomposition { pieces }))
}

/// Witness decomposition with at least floor(sqrt(n)) pieces: pieces of
/// lengths 1, 2, ..., s-1 and a final piece of length n - s(s-1)/2 >= s,
/// where s = floor(sqrt(n)). Pieces are distinct because their lengths are.
pub fn sqrt_parse(input: &[u16]) -> Decomposition {
    let n = input.len();
    if n == 0 {
        return Decomposition { pieces: vec![] };
    }
    if n < 4 {
        return Decomposition {
            pieces: vec![input.to_vec()],
        };
    }
    let s = isqrt(n);
    let mut pieces = Vec::with_capacity(s);
    let mut start = 0;
    for len in 1..s {
        pieces.push(input[start..start + len].to_vec());
        start += len;
    }
    pieces.push(input[start..].to_vec());
    Decomposition { pieces }
}

fn isqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    while s * s > n {
        s -= 1;
    }
    s
}

/// Explicit upper bound, in bits, on the encoded size of an m-phrase parse:
/// `m * (ceil(log2(m+1)) + 2*ceil(log2(log2(m+1)+1)) + 3 + width)` where
/// `width` is the fixed symbol-code width for the alphabet.
pub fn lz_length_bound(m: usize, alphabet_size: usize) -> u64 {
    debug_assert!(m >= 1);
    let outer = (usize::BITS - m.leading_zeros()) as u64; // ceil(log2(m+1))
    let inner = ((m as f64 + 1.0).log2() + 1.0).log2().ceil() as u64;
    let width = SymbolCodec::new(alphabet_size).width() as u64;
    m as u64 * (outer + 2 * inner + 3 + width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcodec::uint_code_len;
    use crate::lz::{lz_encode, lz_parse};
    use crate::rng::SplitMix64;

    fn from_str(s: &str) -> Vec<u16> {
        s.bytes().map(|b| (b - b'a') as u16).collect()
    }

    /// Independent oracle: enumerate every cut pattern by bitmask and keep
    /// the largest all-distinct one. Exponential; for tiny n only.
    fn brute_force_complexity(input: &[u16]) -> usize {
        let n = input.len();
        if n == 0 {
            return 0;
        }
        let mut best = 0;
        for mask in 0..(1u32 << (n - 1)) {
            let mut pieces: Vec<&[u16]> = Vec::new();
            let mut start = 0;
            for i in 0..n {
                if i + 1 == n || mask >> i & 1 == 1 {
                    pieces.push(&input[start..i + 1]);
                    start = i + 1;
                }
            }
            let mut distinct = true;
            for i in 0..pieces.len() {
                for j in 0..i {
                    if pieces[i] == pieces[j] {
                        distinct = false;
                    }
                }
            }
            if distinct {
                best = best.max(pieces.len());
            }
        }
        best
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_complexity(&from_str("abc")), 3);
        assert_eq!(brute_force_complexity(&from_str("aaaa")), 2);
    }

    #[test]
    fn exact_search_matches_examples() {
        let (t, witness) = max_distinct_parse(&from_str("abc"), DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(t, 3);
        assert!(witness.is_valid_for(&from_str("abc")));
        assert_eq!(witness.pieces.len(), 3);

        let (t, witness) = max_distinct_parse(&from_str("aaaa"), DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(t, 2);
        assert!(witness.is_valid_for(&from_str("aaaa")));

        let (t, witness) = max_distinct_parse(&[], DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(t, 0);
        assert!(witness.pieces.is_empty());
    }

    #[test]
    fn exact_search_matches_brute_force() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..200 {
            let n = (rng.next_u64() % 13) as usize;
            let input: Vec<u16> = (0..n).map(|_| (rng.next_u64() % 2) as u16).collect();
            let (t, witness) = max_distinct_parse(&input, DEFAULT_EXACT_CAP).unwrap();
            assert_eq!(t, brute_force_complexity(&input), "input {input:?}");
            assert!(witness.is_valid_for(&input));
            assert_eq!(witness.pieces.len(), t);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let input = vec![0u16; 25];
        assert_eq!(
            max_distinct_parse(&input, DEFAULT_EXACT_CAP),
            Err(Error::ComplexityCapExceeded { n: 25, cap: 24 })
        );
    }

    #[test]
    fn sqrt_parse_shapes() {
        // n = 9: lengths (1, 2, 6)
        let d = sqrt_parse(&[0u16; 9]);
        let lens: Vec<usize> = d.pieces.iter().map(|p| p.len()).collect();
        assert_eq!(lens, vec![1, 2, 6]);
        // n = 1: single piece
        let d = sqrt_parse(&[3u16]);
        assert_eq!(d.pieces, vec![vec![3u16]]);
        // n = 100: lengths 1..=9 then 55
        let d = sqrt_parse(&[1u16; 100]);
        let lens: Vec<usize> = d.pieces.iter().map(|p| p.len()).collect();
        assert_eq!(lens, (1..=9).chain([55]).collect::<Vec<_>>());
    }

    #[test]
    fn sqrt_parse_witness_is_valid_with_enough_pieces() {
        let mut rng = SplitMix64::new(17);
        for n in [1usize, 2, 3, 4, 9, 10, 50, 144, 1000, 10_000] {
            let input: Vec<u16> = (0..n).map(|_| (rng.next_u64() % 3) as u16).collect();
            let d = sqrt_parse(&input);
            assert!(d.is_valid_for(&input), "n={n}");
            assert!(d.pieces.len() >= isqrt(n), "n={n}");
        }
    }

    #[test]
    fn complexity_dominates_other_parses() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..100 {
            let n = 1 + (rng.next_u64() % 24) as usize;
            let input: Vec<u16> = (0..n).map(|_| (rng.next_u64() % 2) as u16).collect();
            let (t, _) = max_distinct_parse(&input, DEFAULT_EXACT_CAP).unwrap();
            assert!(t >= sqrt_parse(&input).pieces.len());
            let parse = lz_parse(&input, 2).unwrap();
            if parse.phrases.last().is_some_and(|p| p.extension.is_some()) {
                assert!(parse.phrase_count() <= t, "input {input:?}");
            }
        }
    }

    #[test]
    fn length_bound_examples() {
        // m=1 over two symbols: 1 * (1 + 2 + 3 + 2) = 8
        assert_eq!(lz_length_bound(1, 2), 8);
        assert!(lz_encode(&[0], 2).unwrap().len() as u64 <= lz_length_bound(1, 2));
        // the worked example: m=4 phrases, 19 observed bits
        let input = [0u16, 0, 0, 1, 1, 0];
        let bits = lz_encode(&input, 2).unwrap();
        let m = lz_parse(&input, 2).unwrap().phrase_count();
        assert!(bits.len() as u64 <= lz_length_bound(m, 2));
        // monotone in m
        for m in 1..2000 {
            assert!(lz_length_bound(m, 2) <= lz_length_bound(m + 1, 2));
        }
    }

    #[test]
    fn per_phrase_codeword_fits_the_bound() {
        // every back-reference codeword in an m-phrase parse is uint_code(i)
        // with i <= m; check the per-phrase budget covers the worst case
        for m in 1..=100_000usize {
            let per_phrase = lz_length_bound(m, 2) / m as u64 - 2;
            assert!(
                uint_code_len(m as u64) as u64 <= per_phrase,
                "m={m}: {} > {per_phrase}",
                uint_code_len(m as u64)
            );
        }
    }

    #[test]
    fn encoded_length_respects_bound_on_random_inputs() {
        let mut rng = SplitMix64::new(31);
        for alphabet_size in 2..=4usize {
            for _ in 0..30 {
                let n = 1 + (rng.next_u64() % 5000) as usize;
                let input: Vec<u16> = (0..n)
                    .map(|_| (rng.next_u64() % alphabet_size as u64) as u16)
                    .collect();
                let parse = lz_parse(&input, alphabet_size).unwrap();
                let bits = lz_encode(&input, alphabet_size).unwrap();
                assert!(bits.len() as u64 <= lz_length_bound(parse.phrase_count(), alphabet_size));
            }
        }
    }
}
