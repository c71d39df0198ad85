//! Epoch statistics: divide a stationary sample of length n into n/L
//! consecutive length-L epochs and count, per seed, how many epochs start
//! at each state, start/end at each state pair, and emit each tracked
//! block — against their exact expectations.

use std::collections::HashMap;

use lzhm_core::entropy::{
    block_distribution, conditioned_block_matrix, pack_block, DEFAULT_BLOCK_CAP,
};
use lzhm_core::markov::{HiddenMarkovModel, InitialDist};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default cap on the number of blocks whose epoch counts are tracked.
pub const DEFAULT_TRACK_CAP: usize = 256;

/// Raw counts for one seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochStats {
    pub seed: u64,
    /// Number of epochs m = n / L.
    pub epochs: usize,
    /// Epochs starting at each state.
    pub start_counts: Vec<u64>,
    /// Epochs starting at a and ending at b, indexed `[a][b]`.
    pub pair_counts: Vec<Vec<u64>>,
    /// Epochs starting at a, ending at b, and emitting tracked block t,
    /// indexed `[a][b][t]`. Untracked blocks are not counted.
    pub block_counts: Vec<Vec<Vec<u64>>>,
}

/// Exact expectations shared by every seed.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochExpectations {
    /// Stationary law over start states.
    pub stationary: Vec<f64>,
    /// Joint epoch law `rho[a][b] = pi(a) * (M^L)[a][b]`.
    pub pair_law: Vec<Vec<f64>>,
    /// Packed indices of tracked blocks, ascending.
    pub tracked_blocks: Vec<u64>,
    /// Per-cell expected frequency `rho[a][b] * P_ab(block)`, indexed
    /// `[a][b][t]`; sums to the block's stationary probability over (a, b).
    pub cell_freq: Vec<Vec<Vec<f64>>>,
}

impl EpochExpectations {
    /// Number of (start state, end state, tracked block) cells.
    pub fn tracked_cells(&self) -> usize {
        let k = self.stationary.len();
        k * k * self.tracked_blocks.len()
    }
}

/// Per-seed deviation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSummary {
    pub seed: u64,
    /// `max_a |start_counts[a]/m - pi(a)|`
    pub max_state_dev: f64,
    /// `max_ab |pair_counts[a][b]/m - rho[a][b]|`
    pub max_pair_dev: f64,
    pub tracked_cells: usize,
    /// Cells with `|K - m*p| > 4*sqrt(m*p*(1-p)) + 1`.
    pub band_violations: usize,
}

#[derive(Debug, Clone)]
pub struct EpochExperiment {
    pub block_len: usize,
    pub epochs: usize,
    pub expectations: EpochExpectations,
    pub per_seed: Vec<(EpochStats, EpochSummary)>,
}

fn tracked_blocks(
    model: &HiddenMarkovModel,
    block_len: usize,
    track_cap: usize,
) -> Result<Vec<u64>> {
    let space = (model.alphabet().len() as u128).checked_pow(block_len as u32);
    match space {
        Some(s) if s <= DEFAULT_BLOCK_CAP as u128 => {
            let dist = block_distribution(model, block_len, DEFAULT_BLOCK_CAP)?;
            if dist.support_size() <= track_cap {
                Ok(dist.iter().map(|(b, _)| b).collect())
            } else {
                // keep the top-probability blocks
                let mut by_prob: Vec<(u64, f64)> = dist.iter().collect();
                by_prob.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
                let mut kept: Vec<u64> = by_prob[..track_cap].iter().map(|e| e.0).collect();
                kept.sort_unstable();
                Ok(kept)
            }
        }
        // block space too large to enumerate: no block tracking
        _ => Ok(Vec::new()),
    }
}

/// Run the experiment for every seed. Each seed is an independent pure
/// sample; summaries are merged in input order.
pub fn epoch_experiment(
    model: &HiddenMarkovModel,
    block_len: usize,
    n: usize,
    seeds: &[u64],
    track_cap: usize,
) -> Result<EpochExperiment> {
    if block_len == 0 {
        return Err(Error::Core(lzhm_core::Error::ZeroBlockLen));
    }
    if n % block_len != 0 {
        return Err(Error::LengthNotAligned { n, block_len });
    }
    let epochs = n / block_len;
    let k = model.state_count();

    let stationary = model.chain().stationary_distribution()?;
    let pair_law = model.chain().joint_l_step(block_len as u32)?;
    let tracked = tracked_blocks(model, block_len, track_cap)?;
    let track_index: HashMap<u64, usize> =
        tracked.iter().enumerate().map(|(i, &b)| (b, i)).collect();

    // cell_freq[a][b][t] = pi(a) * Pr[block = t, Z_L = b | Z_0 = a]
    let mut cell_freq = vec![vec![vec![0.0; tracked.len()]; k]; k];
    if !tracked.is_empty() {
        for a in 0..k {
            let rows = conditioned_block_matrix(model, a, block_len, DEFAULT_BLOCK_CAP)?;
            for (block, end_mass) in rows {
                if let Some(&t) = track_index.get(&block) {
                    for (b, &mass) in end_mass.iter().enumerate() {
                        cell_freq[a][b][t] = stationary[a] * mass;
                    }
                }
            }
        }
    }
    let expectations = EpochExpectations {
        stationary,
        pair_law,
        tracked_blocks: tracked,
        cell_freq,
    };

    let alphabet_size = model.alphabet().len();
    let per_seed = seeds
        .par_iter()
        .map(|&seed| -> Result<(EpochStats, EpochSummary)> {
            let path = model.sample_path_with_end_state(n, seed, InitialDist::Stationary)?;
            let mut stats = EpochStats {
                seed,
                epochs,
                start_counts: vec![0; k],
                pair_counts: vec![vec![0; k]; k],
                block_counts: vec![
                    vec![vec![0; expectations.tracked_blocks.len()]; k];
                    k
                ],
            };
            for i in 0..epochs {
                let a = path.states[i * block_len];
                let b = path.states[(i + 1) * block_len];
                stats.start_counts[a] += 1;
                stats.pair_counts[a][b] += 1;
                if !expectations.tracked_blocks.is_empty() {
                    let block =
                        pack_block(&path.symbols[i * block_len..(i + 1) * block_len], alphabet_size);
                    if let Some(&t) = track_index.get(&block) {
                        stats.block_counts[a][b][t] += 1;
                    }
                }
            }
            let summary = summarize(&stats, &expectations);
            Ok((stats, summary))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EpochExperiment {
        block_len,
        epochs,
        expectations,
        per_seed,
    })
}

fn summarize(stats: &EpochStats, expect: &EpochExpectations) -> EpochSummary {
    let m = stats.epochs as f64;
    let k = expect.stationary.len();
    let max_state_dev = (0..k)
        .map(|a| (stats.start_counts[a] as f64 / m - expect.stationary[a]).abs())
        .fold(0.0, f64::max);
    let max_pair_dev = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| (stats.pair_counts[a][b] as f64 / m - expect.pair_law[a][b]).abs())
        .fold(0.0, f64::max);
    let mut band_violations = 0usize;
    let tracked = expect.tracked_blocks.len();
    for a in 0..k {
        for b in 0..k {
            for t in 0..tracked {
                let p = expect.cell_freq[a][b][t];
                let band = 4.0 * (m * p * (1.0 - p)).sqrt() + 1.0;
                let dev = (stats.block_counts[a][b][t] as f64 - m * p).abs();
                if dev > band {
                    band_violations += 1;
                }
            }
        }
    }
    EpochSummary {
        seed: stats.seed,
        max_state_dev,
        max_pair_dev,
        tracked_cells: k * k * tracked,
        band_violations,
    }
}

impl EpochExperiment {
    /// Deterministic CSV: one row per seed with observed vs expected
    /// frequencies and the deviation summaries.
    pub fn to_csv(&self) -> String {
        let k = self.expectations.stationary.len();
        let mut header = String::from("seed,m,max_state_dev,max_pair_dev");
        for a in 0..k {
            header.push_str(&format!(",na_{a},pi_{a}"));
        }
        for a in 0..k {
            for b in 0..k {
                header.push_str(&format!(",nab_{a}_{b},rho_{a}_{b}"));
            }
        }
        header.push_str(",tracked_cells,band_violations\n");

        let mut out = header;
        for (stats, summary) in &self.per_seed {
            let m = stats.epochs as f64;
            out.push_str(&format!(
                "{},{},{:.6},{:.6}",
                summary.seed, stats.epochs, summary.max_state_dev, summary.max_pair_dev
            ));
            for a in 0..k {
                out.push_str(&format!(
                    ",{:.6},{:.6}",
                    stats.start_counts[a] as f64 / m,
                    self.expectations.stationary[a]
                ));
            }
            for a in 0..k {
                for b in 0..k {
                    out.push_str(&format!(
                        ",{:.6},{:.6}",
                        stats.pair_counts[a][b] as f64 / m,
                        self.expectations.pair_law[a][b]
                    ));
                }
            }
            out.push_str(&format!(
                ",{},{}\n",
                summary.tracked_cells, summary.band_violations
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_file::parse_model;

    fn flip_model(p: f64) -> HiddenMarkovModel {
        parse_model(&format!(
            r#"
schema = 1
alphabet = ["a", "b"]
states = 2
transitions = [[{q}, {p}], [{p}, {q}]]
emissions = [[1.0, 0.0], [0.0, 1.0]]
"#,
            p = p,
            q = 1.0 - p,
        ))
        .unwrap()
    }

    #[test]
    fn deterministic_single_state_source() {
        // one state emitting 'a': L=2, n=6 gives m=3 epochs, all counted in
        // the single cell
        let model = parse_model(
            r#"
schema = 1
alphabet = ["a"]
states = 1
transitions = [[1.0]]
emissions = [[1.0]]
"#,
        )
        .unwrap();
        let exp = epoch_experiment(&model, 2, 6, &[42], DEFAULT_TRACK_CAP).unwrap();
        let (stats, summary) = &exp.per_seed[0];
        assert_eq!(stats.epochs, 3);
        assert_eq!(stats.start_counts, vec![3]);
        assert_eq!(stats.pair_counts, vec![vec![3]]);
        assert_eq!(exp.expectations.tracked_blocks, vec![0]); // block "aa"
        assert_eq!(stats.block_counts[0][0][0], 3);
        assert_eq!(summary.max_state_dev, 0.0);
        assert_eq!(summary.band_violations, 0);
    }

    #[test]
    fn counts_are_internally_consistent() {
        let model = flip_model(0.1);
        let exp = epoch_experiment(&model, 4, 4 * 500, &[1, 2, 3], DEFAULT_TRACK_CAP).unwrap();
        for (stats, _) in &exp.per_seed {
            let m: u64 = stats.start_counts.iter().sum();
            assert_eq!(m, 500);
            for a in 0..2 {
                let row: u64 = stats.pair_counts[a].iter().sum();
                assert_eq!(row, stats.start_counts[a]);
                for b in 0..2 {
                    let blocks: u64 = stats.block_counts[a][b].iter().sum();
                    // all 16 blocks tracked, so the block counts tile n_ab
                    assert_eq!(blocks, stats.pair_counts[a][b]);
                }
            }
        }
    }

    #[test]
    fn expectations_are_a_probability_law() {
        let model = flip_model(0.3);
        let exp = epoch_experiment(&model, 3, 3 * 10, &[7], DEFAULT_TRACK_CAP).unwrap();
        let total_pairs: f64 = exp.expectations.pair_law.iter().flatten().sum();
        assert!((total_pairs - 1.0).abs() < 1e-12);
        let total_cells: f64 = exp
            .expectations
            .cell_freq
            .iter()
            .flatten()
            .flatten()
            .sum();
        assert!((total_cells - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_block_spaces_disable_tracking() {
        let model = flip_model(0.1);
        let exp = epoch_experiment(&model, 64, 64 * 10, &[1], DEFAULT_TRACK_CAP).unwrap();
        assert!(exp.expectations.tracked_blocks.is_empty());
        let (_, summary) = &exp.per_seed[0];
        assert_eq!(summary.tracked_cells, 0);
    }

    #[test]
    fn track_cap_keeps_top_probability_blocks() {
        let model = flip_model(0.1);
        // 2^6 = 64 blocks but cap at 8: the sticky chain favors runs
        let exp = epoch_experiment(&model, 6, 6 * 10, &[1], 8).unwrap();
        assert_eq!(exp.expectations.tracked_blocks.len(), 8);
        // all-a and all-b runs are the two most likely blocks
        assert!(exp.expectations.tracked_blocks.contains(&0));
        assert!(exp.expectations.tracked_blocks.contains(&63));
    }

    #[test]
    fn misalignment_is_rejected() {
        let model = flip_model(0.1);
        assert!(matches!(
            epoch_experiment(&model, 64, 100, &[1], DEFAULT_TRACK_CAP),
            Err(Error::LengthNotAligned { .. })
        ));
    }

    #[test]
    fn csv_shape() {
        let model = flip_model(0.1);
        let exp = epoch_experiment(&model, 2, 2 * 50, &[1, 2], DEFAULT_TRACK_CAP).unwrap();
        let csv = exp.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("seed,m,max_state_dev,max_pair_dev,na_0,pi_0"));
        assert!(lines[0].ends_with("tracked_cells,band_violations"));
        let b = epoch_experiment(&model, 2, 2 * 50, &[1, 2], DEFAULT_TRACK_CAP).unwrap();
        assert_eq!(csv, b.to_csv());
    }
}
