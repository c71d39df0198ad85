//! Exact block distributions and entropy-rate machinery for stationary
//! hidden Markov sources.
//!
//! All logarithms are base 2; lengths are in bits. The convention
//! 0*log(1/0) = 0 applies throughout, realized by omitting zero-probability
//! blocks entirely.

use crate::error::{Error, Result};
use crate::markov::{HiddenMarkovModel, MarkovChain};

/// Default cap on the block space |Sigma|^L a single call may materialize.
pub const DEFAULT_BLOCK_CAP: u64 = 1 << 24;

/// Pack a block of symbols into its base-|Sigma| index, most significant
/// symbol first.
pub fn pack_block(symbols: &[u16], alphabet_size: usize) -> u64 {
    symbols
        .iter()
        .fold(0u64, |acc, &s| acc * alphabet_size as u64 + s as u64)
}

/// Inverse of [`pack_block`].
pub fn unpack_block(mut index: u64, block_len: usize, alphabet_size: usize) -> Vec<u16> {
    let mut out = vec![0u16; block_len];
    for slot in out.iter_mut().rev() {
        *slot = (index % alphabet_size as u64) as u16;
        index /= alphabet_size as u64;
    }
    out
}

fn check_block_space(alphabet_size: usize, block_len: usize, cap: u64) -> Result<()> {
    if block_len == 0 {
        return Err(Error::ZeroBlockLen);
    }
    // block lengths ride in 16-bit container/fingerprint fields
    if block_len > u16::MAX as usize {
        return Err(Error::BlockSpaceTooLarge {
            alphabet_size,
            block_len,
            cap,
        });
    }
    let space = (alphabet_size as u128).checked_pow(block_len as u32);
    match space {
        Some(s) if s <= cap as u128 => Ok(()),
        _ => Err(Error::BlockSpaceTooLarge {
            alphabet_size,
            block_len,
            cap,
        }),
    }
}

/// Exact stationary distribution of length-L output blocks. Blocks are keyed
/// by their packed index; zero-probability blocks are omitted.
#[derive(Debug, Clone)]
pub struct BlockDistribution {
    block_len: usize,
    alphabet_size: usize,
    entries: Vec<(u64, f64)>, // sorted by packed block index
}

impl BlockDistribution {
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Number of positive-probability blocks.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Probability of a packed block; 0 for omitted blocks.
    pub fn prob(&self, block: u64) -> f64 {
        match self.entries.binary_search_by_key(&block, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// Walk the depth-L prefix tree of the stationary forward recursion,
/// invoking `visit(depth, packed, mass)` at every node with positive mass.
/// Children are visited in symbol order, so leaves arrive in ascending
/// packed order and the summation order is fixed.
fn walk_prefix_tree<F: FnMut(usize, u64, f64)>(
    hmm: &HiddenMarkovModel,
    max_depth: usize,
    visit: &mut F,
) -> Result<()> {
    let pi = hmm.chain().stationary_distribution()?;
    if hmm.alphabet().len() == 1 {
        // single-symbol sources have one prefix per depth, with mass 1;
        // handled directly so the recursion depth stays bounded by the
        // block-space cap
        for depth in 1..=max_depth {
            visit(depth, 0, 1.0);
        }
        return Ok(());
    }

    // alpha holds Pr[prefix, Z_{d-1} = z]; the root carries pi itself.
    fn recurse<F: FnMut(usize, u64, f64)>(
        hmm: &HiddenMarkovModel,
        depth: usize,
        max_depth: usize,
        packed: u64,
        alpha: &[f64],
        visit: &mut F,
    ) {
        let k = hmm.state_count();
        let a = hmm.alphabet().len();
        // propagate one chain step (the root emits from pi directly)
        let propagated: Vec<f64> = if depth == 0 {
            alpha.to_vec()
        } else {
            let rows = hmm.chain().rows();
            let mut out = vec![0.0; k];
            for (z, &w) in alpha.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (zn, slot) in out.iter_mut().enumerate() {
                    *slot += w * rows[z][zn];
                }
            }
            out
        };
        for sym in 0..a {
            let child: Vec<f64> = (0..k)
                .map(|z| propagated[z] * hmm.emission_row(z)[sym])
                .collect();
            let mass: f64 = child.iter().sum();
            if mass <= 0.0 {
                continue;
            }
            let child_packed = packed * a as u64 + sym as u64;
            visit(depth + 1, child_packed, mass);
            if depth + 1 < max_depth {
                recurse(hmm, depth + 1, max_depth, child_packed, &child, visit);
            }
        }
    }

    recurse(hmm, 0, max_depth, 0, &pi, visit);
    Ok(())
}

/// Exact P_L: the stationary probability of each length-L output block,
/// computed by the forward recursion over a shared prefix tree.
pub fn block_distribution(
    hmm: &HiddenMarkovModel,
    block_len: usize,
    cap: u64,
) -> Result<BlockDistribution> {
    let alphabet_size = hmm.alphabet().len();
    check_block_space(alphabet_size, block_len, cap)?;
    if !hmm.chain().validate(0.0)?.aperiodic {
        return Err(Error::NotErgodic);
    }
    let mut entries = Vec::new();
    walk_prefix_tree(hmm, block_len, &mut |depth, packed, mass| {
        if depth == block_len {
            entries.push((packed, mass));
        }
    })?;
    Ok(BlockDistribution {
        block_len,
        alphabet_size,
        entries,
    })
}

/// Shannon entropy of a block distribution, in bits.
pub fn block_entropy(dist: &BlockDistribution) -> f64 {
    dist.iter().map(|(_, p)| -p * p.log2()).sum()
}

/// Block entropies H_L and the two derived per-symbol estimates for
/// L = 1..=max_len.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimates {
    /// H_L in bits; index 0 holds H_1.
    pub block_entropies: Vec<f64>,
    /// v_L = H_L / L, non-increasing in L.
    pub per_symbol: Vec<f64>,
    /// d_L = H_L - H_{L-1}, with d_1 = H_1.
    pub increments: Vec<f64>,
}

impl RateEstimates {
    pub fn max_len(&self) -> usize {
        self.block_entropies.len()
    }

    pub fn block_entropy(&self, l: usize) -> f64 {
        self.block_entropies[l - 1]
    }

    pub fn per_symbol(&self, l: usize) -> f64 {
        self.per_symbol[l - 1]
    }

    pub fn increment(&self, l: usize) -> f64 {
        self.increments[l - 1]
    }
}

/// H_L, v_L and d_L for every L up to `max_len`, from a single prefix-tree
/// walk rather than `max_len` independent ones.
pub fn entropy_rate_estimates(
    hmm: &HiddenMarkovModel,
    max_len: usize,
    cap: u64,
) -> Result<RateEstimates> {
    check_block_space(hmm.alphabet().len(), max_len, cap)?;
    if !hmm.chain().validate(0.0)?.aperiodic {
        return Err(Error::NotErgodic);
    }
    let mut entropies = vec![0.0; max_len];
    walk_prefix_tree(hmm, max_len, &mut |depth, _packed, mass| {
        entropies[depth - 1] += -mass * mass.log2();
    })?;
    let per_symbol = entropies
        .iter()
        .enumerate()
        .map(|(i, h)| h / (i + 1) as f64)
        .collect();
    let increments = entropies
        .iter()
        .enumerate()
        .map(|(i, h)| if i == 0 { *h } else { h - entropies[i - 1] })
        .collect();
    Ok(RateEstimates {
        block_entropies: entropies,
        per_symbol,
        increments,
    })
}

/// Closed-form entropy rate of a visible chain:
/// `sum_a pi(a) sum_b M[a][b] log2(1/M[a][b])`. Ground truth for models whose
/// emissions reveal the state.
pub fn markov_entropy_rate(chain: &MarkovChain) -> Result<f64> {
    let pi = chain.stationary_distribution()?;
    Ok(chain
        .rows()
        .iter()
        .zip(&pi)
        .map(|(row, &w)| {
            w * row
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| -p * p.log2())
                .sum::<f64>()
        })
        .sum())
}

/// Outcome of the compressive-block-length test H_L + 1 <= rate*(1+eps)*L.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressiveCheck {
    pub block_len: usize,
    pub block_entropy: f64,
    /// rate * (1 + eps) * L, the budget H_L + 1 must fit under.
    pub budget: f64,
    pub compressive: bool,
    /// 1 / (eps * rate): no block length below this can pass.
    pub min_block_len: f64,
}

/// Decide whether `block_len` is compressive at slack `eps` for a source of
/// the given entropy `rate` (bits/symbol, supplied by the caller).
pub fn compressive_check(
    hmm: &HiddenMarkovModel,
    block_len: usize,
    eps: f64,
    rate: f64,
    cap: u64,
) -> Result<CompressiveCheck> {
    let dist = block_distribution(hmm, block_len, cap)?;
    let h = block_entropy(&dist);
    let budget = rate * (1.0 + eps) * block_len as f64;
    Ok(CompressiveCheck {
        block_len,
        block_entropy: h,
        budget,
        compressive: h + 1.0 <= budget,
        min_block_len: 1.0 / (eps * rate),
    })
}

/// For each block γ with positive mass given `Z_0 = from_state`, the vector
/// of joint probabilities Pr[block = γ, Z_L = b | Z_0 = from_state] over end
/// states b. Dividing by the L-step transition probability turns an entry
/// into the doubly-conditioned block law.
pub fn conditioned_block_matrix(
    hmm: &HiddenMarkovModel,
    from_state: usize,
    block_len: usize,
    cap: u64,
) -> Result<Vec<(u64, Vec<f64>)>> {
    let a = hmm.alphabet().len();
    check_block_space(a, block_len, cap)?;
    let k = hmm.state_count();
    if a == 1 {
        // the unique block is emitted with probability 1; end states follow
        // the L-step law from the start state
        let row = hmm.chain().l_step_matrix(block_len as u32)[from_state].clone();
        return Ok(vec![(0, row)]);
    }

    // w holds Pr[prefix, Z_d = z | Z_0 = from]: emission from the current
    // state, then one chain step, repeated block_len times.
    fn recurse(
        hmm: &HiddenMarkovModel,
        depth: usize,
        max_depth: usize,
        packed: u64,
        w: &[f64],
        out: &mut Vec<(u64, Vec<f64>)>,
    ) {
        let k = hmm.state_count();
        let a = hmm.alphabet().len();
        let rows = hmm.chain().rows();
        for sym in 0..a {
            let mut next = vec![0.0; k];
            for (z, &weight) in w.iter().enumerate() {
                if weight == 0.0 {
                    continue;
                }
                let emitted = weight * hmm.emission_row(z)[sym];
                if emitted == 0.0 {
                    continue;
                }
                for (zn, slot) in next.iter_mut().enumerate() {
                    *slot += emitted * rows[z][zn];
                }
            }
            let mass: f64 = next.iter().sum();
            if mass <= 0.0 {
                continue;
            }
            let child_packed = packed * a as u64 + sym as u64;
            if depth + 1 == max_depth {
                out.push((child_packed, next));
            } else {
                recurse(hmm, depth + 1, max_depth, child_packed, &next, out);
            }
        }
    }

    let mut start = vec![0.0; k];
    start[from_state] = 1.0;
    let mut out = Vec::new();
    recurse(hmm, 0, block_len, 0, &start, &mut out);
    Ok(out)
}
