//! Deterministic sampling primitives.
//!
//! Every sampled experiment in this workspace is reproducible from a 64-bit
//! seed. The generator is SplitMix64; categorical draws use inverse-CDF
//! lookup over a stored cumulative vector, with ties on an interval boundary
//! broken toward the lower index.

/// SplitMix64 generator (Vigna's reference constants).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D4_ECB1_7564_AB8D);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse-CDF sampler over a fixed finite distribution.
#[derive(Debug, Clone)]
pub struct Categorical {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Categorical {
    /// `probs` must be nonnegative with at least one positive entry; callers
    /// validate distributions before sampling.
    pub fn new(probs: &[f64]) -> Self {
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in probs {
            acc += p;
            cumulative.push(acc);
        }
        Self {
            probs: probs.to_vec(),
            cumulative,
        }
    }

    /// Smallest positive-probability index i with `u <= cum[i]`. Falls back to
    /// the last positive index if rounding left u above the final cumulative
    /// value.
    pub fn sample(&self, u: f64) -> usize {
        for (i, &c) in self.cumulative.iter().enumerate() {
            if self.probs[i] > 0.0 && u <= c {
                return i;
            }
        }
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("distribution has a positive entry")
    }

    pub fn draw(&self, rng: &mut SplitMix64) -> usize {
        self.sample(rng.next_f64())
    }
}
