//! The rate-convergence experiment: compress stationary samples with both
//! codecs across a ladder of lengths and seeds, and report bits per symbol
//! against the model's entropy rate.

use lzhm_core::block_code::{build_shannon_code, ih_encode};
use lzhm_core::entropy::{block_distribution, entropy_rate_estimates, markov_entropy_rate, DEFAULT_BLOCK_CAP};
use lzhm_core::lz::lz_encode;
use lzhm_core::markov::{HiddenMarkovModel, InitialDist};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// One (length, seed) cell of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCell {
    pub n: usize,
    pub seed: u64,
    pub lz_bits: u64,
    pub ih_bits: u64,
}

impl RateCell {
    pub fn lz_bps(&self) -> f64 {
        self.lz_bits as f64 / self.n as f64
    }

    pub fn ih_bps(&self) -> f64 {
        self.ih_bits as f64 / self.n as f64
    }
}

#[derive(Debug, Clone)]
pub struct RateExperiment {
    pub cells: Vec<RateCell>,
    pub block_len: usize,
    pub eps: f64,
    /// Closed-form rate for visible models, else the block-entropy
    /// increment at the estimation depth.
    pub rate_estimate: f64,
    /// rate_estimate * (1 + eps): the good-compressor budget per symbol.
    pub eps_threshold: f64,
}

impl RateExperiment {
    /// Deterministic CSV: one row per (n, seed) in ascending order.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,seed,lz_bits,ih_bits,lz_bps,ih_bps,rate_estimate,eps_threshold\n");
        for cell in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.6},{:.6},{:.6}\n",
                cell.n,
                cell.seed,
                cell.lz_bits,
                cell.ih_bits,
                cell.lz_bps(),
                cell.ih_bps(),
                self.rate_estimate,
                self.eps_threshold,
            ));
        }
        out
    }

    /// Median lz bits/symbol over the seeds at length n.
    pub fn median_lz_bps(&self, n: usize) -> Option<f64> {
        let mut values: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.n == n)
            .map(RateCell::lz_bps)
            .collect();
        if values.is_empty() {
            return None;
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = values.len() / 2;
        Some(if values.len() % 2 == 1 {
            values[mid]
        } else {
            (values[mid - 1] + values[mid]) / 2.0
        })
    }
}

/// Closed-form entropy rate when every state emits a single distinct symbol
/// (the emissions reveal the state), else `None`.
pub fn visible_entropy_rate(model: &HiddenMarkovModel) -> Option<f64> {
    let mut markers = Vec::with_capacity(model.state_count());
    for row in model.emissions() {
        let (best, &weight) = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
        if weight < 1.0 - 1e-9 {
            return None;
        }
        if markers.contains(&best) {
            return None;
        }
        markers.push(best);
    }
    markov_entropy_rate(model.chain()).ok()
}

/// Largest estimation depth whose block space stays within 2^16.
pub fn default_rate_len(alphabet_size: usize) -> usize {
    let mut l = 1usize;
    while (alphabet_size as u128).pow(l as u32 + 1) <= 1 << 16 {
        l += 1;
    }
    l.max(2)
}

/// Entropy-rate figure used by experiments: exact for visible models,
/// otherwise the conditional-entropy estimate d_{l_max} (an upper estimate).
pub fn rate_estimate(model: &HiddenMarkovModel, l_max: Option<usize>) -> Result<f64> {
    if let Some(rate) = visible_entropy_rate(model) {
        return Ok(rate);
    }
    let l_max = l_max.unwrap_or_else(|| default_rate_len(model.alphabet().len()));
    let estimates = entropy_rate_estimates(model, l_max, DEFAULT_BLOCK_CAP)?;
    Ok(estimates.increment(l_max))
}

/// Run the experiment: for each (n, seed), sample a stationary path and
/// compress it with both codecs. Cells are computed independently (in
/// parallel) and merged in (n, seed) order, so the output is deterministic.
pub fn rate_experiment(
    model: &HiddenMarkovModel,
    lengths: &[usize],
    seeds: &[u64],
    block_len: usize,
    eps: f64,
    rate_len: Option<usize>,
) -> Result<RateExperiment> {
    for &n in lengths {
        if n % block_len != 0 {
            return Err(Error::LengthNotAligned { n, block_len });
        }
    }
    let dist = block_distribution(model, block_len, DEFAULT_BLOCK_CAP)?;
    let code = build_shannon_code(&dist, model.alphabet())?;
    let alphabet_size = model.alphabet().len();

    let mut grid: Vec<(usize, u64)> = Vec::new();
    for &n in lengths {
        for &seed in seeds {
            grid.push((n, seed));
        }
    }
    let mut cells = grid
        .par_iter()
        .map(|&(n, seed)| -> Result<RateCell> {
            let path = model.sample_path(n, seed, InitialDist::Stationary)?;
            let lz_bits = lz_encode(&path.symbols, alphabet_size)?.len() as u64;
            let ih_bits = ih_encode(&path.symbols, &code)?.len() as u64;
            Ok(RateCell {
                n,
                seed,
                lz_bits,
                ih_bits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by_key(|c| (c.n, c.seed));

    let rate = rate_estimate(model, rate_len)?;
    Ok(RateExperiment {
        cells,
        block_len,
        eps,
        rate_estimate: rate,
        eps_threshold: rate * (1.0 + eps),
    })
}
