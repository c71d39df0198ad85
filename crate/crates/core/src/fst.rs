//! Deterministic finite-state transducers with outputs on transitions,
//! compilation of a block code into a transducer, and the finite-state
//! compressor length lower bound.

use std::collections::BTreeMap;

use crate::bitcodec::BitString;
use crate::block_code::BlockCode;
use crate::error::{Error, Result};

pub type StateId = u32;

#[derive(Debug, Clone, PartialEq)]
struct Transition {
    next: StateId,
    output: BitString,
}

/// A transducer (Q, q0, Sigma, {0,1}, delta): total transition function
/// from (state, input symbol) to (next state, emitted bits).
#[derive(Debug, Clone, PartialEq)]
pub struct Transducer {
    alphabet_size: usize,
    initial: StateId,
    transitions: Vec<Transition>, // state * alphabet_size + symbol
    error_sink: Option<StateId>,
}

/// Result of running a transducer over an input.
#[derive(Debug, Clone, PartialEq)]
pub struct TransducerRun {
    pub output: BitString,
    pub final_state: StateId,
    /// True when the run passed through the designated error sink.
    pub entered_error_sink: bool,
}

/// Incremental construction; `finish` checks that delta is total.
pub struct TransducerBuilder {
    alphabet_size: usize,
    initial: StateId,
    transitions: Vec<Option<Transition>>,
    error_sink: Option<StateId>,
}

impl TransducerBuilder {
    pub fn new(num_states: usize, initial: StateId, alphabet_size: usize) -> Self {
        Self {
            alphabet_size,
            initial,
            transitions: vec![None; num_states * alphabet_size],
            error_sink: None,
        }
    }

    pub fn set(&mut self, state: StateId, symbol: u16, next: StateId, output: BitString) {
        self.transitions[state as usize * self.alphabet_size + symbol as usize] =
            Some(Transition { next, output });
    }

    pub fn mark_error_sink(&mut self, state: StateId) {
        self.error_sink = Some(state);
    }

    pub fn finish(self) -> Result<Transducer> {
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (i, t) in self.transitions.into_iter().enumerate() {
            match t {
                Some(t) => transitions.push(t),
                None => {
                    return Err(Error::MissingTransition {
                        state: (i / self.alphabet_size) as StateId,
                        symbol: (i % self.alphabet_size) as u16,
                    })
                }
            }
        }
        Ok(Transducer {
            alphabet_size: self.alphabet_size,
            initial: self.initial,
            transitions,
            error_sink: self.error_sink,
        })
    }
}

impl Transducer {
    /// A one-state machine emitting `outputs[symbol]` for each symbol.
    pub fn memoryless(outputs: Vec<BitString>) -> Self {
        let alphabet_size = outputs.len();
        let mut b = TransducerBuilder::new(1, 0, alphabet_size);
        for (sym, out) in outputs.into_iter().enumerate() {
            b.set(0, sym as u16, 0, out);
        }
        b.finish().expect("all transitions set")
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len() / self.alphabet_size
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn initial_state(&self) -> StateId {
        self.initial
    }

    pub fn error_sink(&self) -> Option<StateId> {
        self.error_sink
    }

    /// Run the machine over `input`, concatenating the emitted words.
    pub fn run(&self, input: &[u16]) -> Result<TransducerRun> {
        let mut state = self.initial;
        let mut output = BitString::new();
        let mut entered_error_sink = self.error_sink == Some(state);
        for &sym in input {
            if sym as usize >= self.alphabet_size {
                return Err(Error::SymbolOutOfRange {
                    index: sym as usize,
                    alphabet_size: self.alphabet_size,
                });
            }
            let t = &self.transitions[state as usize * self.alphabet_size + sym as usize];
            output.extend(&t.output);
            state = t.next;
            if self.error_sink == Some(state) {
                entered_error_sink = true;
            }
        }
        Ok(TransducerRun {
            output,
            final_state: state,
            entered_error_sink,
        })
    }
}

/// Compile a block code into an equivalent transducer.
///
/// States are the root plus every proper prefix of a positive-probability
/// block; reading the final symbol of a block emits its codeword and returns
/// to the root. Prefixes that cannot complete to a coded block route to an
/// absorbing error sink (materialized only when needed). Running the result
/// on any input whose length is a multiple of the block length reproduces
/// the blockwise encoding bit for bit.
pub fn compile_ih(code: &BlockCode) -> Transducer {
    let l = code.block_len();
    let a = code.alphabet_size() as u64;

    // proper prefixes of coded blocks, keyed by (depth, packed prefix)
    let mut prefix_ids: BTreeMap<(usize, u64), StateId> = BTreeMap::new();
    for (block, _) in code.iter() {
        let mut prefix = block;
        for depth in (0..l).rev() {
            prefix /= a;
            prefix_ids.entry((depth, prefix)).or_insert(0);
        }
    }
    for (i, id) in prefix_ids.values_mut().enumerate() {
        *id = i as StateId;
    }
    let num_prefixes = prefix_ids.len();

    // pass 1: find whether any transition must fail
    let mut needs_sink = false;
    for &(depth, prefix) in prefix_ids.keys() {
        for sym in 0..a {
            let child = prefix * a + sym;
            let ok = if depth + 1 == l {
                code.codeword(child).is_some()
            } else {
                prefix_ids.contains_key(&(depth + 1, child))
            };
            if !ok {
                needs_sink = true;
            }
        }
    }
    let sink: StateId = num_prefixes as StateId;
    let num_states = num_prefixes + usize::from(needs_sink);

    let mut builder = TransducerBuilder::new(num_states, 0, a as usize);
    for (&(depth, prefix), &id) in &prefix_ids {
        for sym in 0..a {
            let child = prefix * a + sym;
            if depth + 1 == l {
                match code.codeword(child) {
                    Some(cw) => builder.set(id, sym as u16, 0, cw.clone()),
                    None => builder.set(id, sym as u16, sink, BitString::new()),
                }
            } else {
                match prefix_ids.get(&(depth + 1, child)) {
                    Some(&next) => builder.set(id, sym as u16, next, BitString::new()),
                    None => builder.set(id, sym as u16, sink, BitString::new()),
                }
            }
        }
    }
    if needs_sink {
        for sym in 0..a {
            builder.set(sink, sym as u16, sink, BitString::new());
        }
        builder.mark_error_sink(sink);
    }
    builder.finish().expect("all transitions set")
}

/// Lower bound, in bits, on the output length of any lossless s-state
/// transducer on a string of complexity t:
/// `t*log2(t) - (3 + 2*log2(s))*t`. May be negative; callers compare
/// against `max(0, bound)`.
pub fn fsc_length_lower_bound(t: u64, s: u64) -> f64 {
    debug_assert!(t >= 1 && s >= 1);
    let t = t as f64;
    let s = s as f64;
    t * t.log2() - (3.0 + 2.0 * s.log2()) * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block_code::{build_shannon_code, ih_encode};
    use crate::entropy::{block_distribution, DEFAULT_BLOCK_CAP};
    use crate::markov::{Alphabet, HiddenMarkovModel, InitialDist, MarkovChain};

    fn uniform_binary() -> HiddenMarkovModel {
        HiddenMarkovModel::new(
            MarkovChain::new(vec![vec![1.0]]).unwrap(),
            Alphabet::from_chars("ab").unwrap(),
            vec![vec![0.5, 0.5]],
            None,
        )
        .unwrap()
    }

    fn flip_visible(p: f64) -> HiddenMarkovModel {
        HiddenMarkovModel::new(
            MarkovChain::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]]).unwrap(),
            Alphabet::from_chars("ab").unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            None,
        )
        .unwrap()
    }

    fn identity_bits() -> Transducer {
        Transducer::memoryless(vec![
            BitString::from_01("0").unwrap(),
            BitString::from_01("1").unwrap(),
        ])
    }

    #[test]
    fn identity_machine_echoes_input() {
        let t = identity_bits();
        let run = t.run(&[0, 1, 1, 0]).unwrap();
        assert_eq!(run.output.to_string(), "0110");
        assert_eq!(run.final_state, 0);
        assert!(!run.entered_error_sink);
    }

    #[test]
    fn eraser_machine_emits_nothing() {
        let t = Transducer::memoryless(vec![BitString::new(), BitString::new()]);
        let run = t.run(&[1, 0, 1, 1, 0, 0]).unwrap();
        assert!(run.output.is_empty());
    }

    #[test]
    fn run_rejects_foreign_symbols() {
        let t = identity_bits();
        assert!(matches!(
            t.run(&[0, 2]),
            Err(Error::SymbolOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn builder_requires_total_delta() {
        let mut b = TransducerBuilder::new(2, 0, 2);
        b.set(0, 0, 1, BitString::new());
        b.set(0, 1, 0, BitString::new());
        b.set(1, 0, 0, BitString::new());
        assert_eq!(
            b.finish().err(),
            Some(Error::MissingTransition { state: 1, symbol: 1 })
        );
    }

    #[test]
    fn compiled_depth_three_tree_has_seven_states() {
        let model = uniform_binary();
        let dist = block_distribution(&model, 3, DEFAULT_BLOCK_CAP).unwrap();
        let code = build_shannon_code(&dist, model.alphabet()).unwrap();
        let machine = compile_ih(&code);
        // geometric series (2^3 - 1) / (2 - 1)
        assert_eq!(machine.state_count(), 7);
        assert_eq!(machine.error_sink(), None);
    }

    #[test]
    fn single_symbol_blocks_compile_to_one_state() {
        let model = uniform_binary();
        let dist = block_distribution(&model, 1, DEFAULT_BLOCK_CAP).unwrap();
        let code = build_shannon_code(&dist, model.alphabet()).unwrap();
        let machine = compile_ih(&code);
        assert_eq!(machine.state_count(), 1);
        let run = machine.run(&[0, 1, 0]).unwrap();
        assert_eq!(run.output, ih_encode(&[0, 1, 0], &code).unwrap());
    }

    #[test]
    fn compiled_machine_matches_blockwise_encoding() {
        for model in [uniform_binary(), flip_visible(0.1)] {
            for l in [1usize, 2, 4] {
                let dist = block_distribution(&model, l, DEFAULT_BLOCK_CAP).unwrap();
                let code = build_shannon_code(&dist, model.alphabet()).unwrap();
                let machine = compile_ih(&code);
                for seed in 0..25u64 {
                    let n = l * (1 + (seed as usize * 7) % 40);
                    let path = model.sample_path(n, seed, InitialDist::Stationary).unwrap();
                    let run = machine.run(&path.symbols).unwrap();
                    assert_eq!(run.output, ih_encode(&path.symbols, &code).unwrap());
                    assert_eq!(run.final_state, 0);
                    assert!(!run.entered_error_sink);
                }
            }
        }
    }

    #[test]
    fn uncoded_blocks_reach_the_sink() {
        // source that never emits 'b': block "ab" has no codeword
        let det = HiddenMarkovModel::new(
            MarkovChain::new(vec![vec![1.0]]).unwrap(),
            Alphabet::from_chars("ab").unwrap(),
            vec![vec![1.0, 0.0]],
            None,
        )
        .unwrap();
        let dist = block_distribution(&det, 2, DEFAULT_BLOCK_CAP).unwrap();
        let code = build_shannon_code(&dist, det.alphabet()).unwrap();
        let machine = compile_ih(&code);
        assert!(machine.error_sink().is_some());
        let run = machine.run(&[0, 1]).unwrap();
        assert!(run.entered_error_sink);
        let ok = machine.run(&[0, 0, 0, 0]).unwrap();
        assert!(!ok.entered_error_sink);
        assert_eq!(ok.output, ih_encode(&[0, 0, 0, 0], &code).unwrap());
    }

    #[test]
    fn lower_bound_arithmetic() {
        assert_eq!(fsc_length_lower_bound(1, 1), -3.0);
        assert_eq!(fsc_length_lower_bound(64, 1), 64.0 * 6.0 - 3.0 * 64.0);
        assert_eq!(fsc_length_lower_bound(64, 4), 64.0 * 6.0 - 7.0 * 64.0);
    }

    #[test]
    fn identity_machine_respects_lower_bound_small_n() {
        use crate::complexity::{max_distinct_parse, DEFAULT_EXACT_CAP};
        let machine = identity_bits();
        for n in 1..=8usize {
            for pattern in 0..(1u32 << n) {
                let input: Vec<u16> = (0..n).map(|i| (pattern >> i & 1) as u16).collect();
                let (t, _) = max_distinct_parse(&input, DEFAULT_EXACT_CAP).unwrap();
                let bound = fsc_length_lower_bound(t as u64, 1).max(0.0);
                let run = machine.run(&input).unwrap();
                assert!(run.output.len() as f64 >= bound);
            }
        }
    }
}
