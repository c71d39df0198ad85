//! Finite-state Markov chains and hidden Markov models: structural
//! validation, stationary and L-step behavior, and reproducible path
//! sampling.

use crate::error::{Error, Result};
use crate::rng::{Categorical, SplitMix64};

/// Tolerance for row/vector sums at construction time.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Residual bound the stationary solve must meet.
pub const STATIONARY_TOL: f64 = 1e-12;

/// Row-stochastic transition matrix over states `0..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    rows: Vec<Vec<f64>>,
}

/// Structural facts about a chain's transition graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub row_stochastic: bool,
    pub irreducible: bool,
    pub aperiodic: bool,
    /// gcd of cycle lengths; defined only for irreducible chains.
    pub period: Option<u64>,
}

impl MarkovChain {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let k = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::RaggedMatrix {
                    row: i,
                    found: row.len(),
                    expected: k,
                });
            }
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if !(-ROW_SUM_TOL..=1.0 + ROW_SUM_TOL).contains(&v) {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowNotStochastic { row: i, sum });
            }
        }
        Ok(Self { rows })
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.rows[from][to]
    }

    /// Graph checks with an edge wherever `M[i][j] > tol` (default 0: the
    /// support of the matrix). Rejects non-finite entries and entries more
    /// negative than `-tol`.
    pub fn validate(&self, tol: f64) -> Result<ValidationReport> {
        let k = self.state_count();
        let mut row_stochastic = true;
        for (i, row) in self.rows.iter().enumerate() {
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if v < -tol {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                row_stochastic = false;
            }
        }

        let edges: Vec<Vec<usize>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v > tol)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, out) in edges.iter().enumerate() {
            for &j in out {
                reverse[j].push(i);
            }
        }

        let forward = reachable(&edges, 0);
        let backward = reachable(&reverse, 0);
        let irreducible = forward.iter().all(|&r| r) && backward.iter().all(|&r| r);

        let period = if irreducible {
            // BFS levels from state 0; the gcd of level(u)+1-level(v) over
            // all edges (u, v) is the chain's period.
            let levels = bfs_levels(&edges, 0);
            let mut g: u64 = 0;
            for (u, out) in edges.iter().enumerate() {
                for &v in out {
                    let diff = levels[u] + 1 - levels[v];
                    g = gcd(g, diff);
                }
            }
            Some(g.max(1))
        } else {
            None
        };

        Ok(ValidationReport {
            row_stochastic,
            irreducible,
            aperiodic: irreducible && period == Some(1),
            period,
        })
    }

    /// Unique stationary distribution of an irreducible aperiodic chain,
    /// found by a direct linear solve of pi (M - I) = 0 with sum(pi) = 1.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        let report = self.validate(0.0)?;
        if !report.aperiodic {
            return Err(Error::NotErgodic);
        }
        let k = self.state_count();
        // Transposed system A x = b with the last equation replaced by the
        // normalization constraint.
        let mut a = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                a[j][i] = self.rows[i][j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        for j in 0..k {
            a[k - 1][j] = 1.0;
        }
        let mut b = vec![0.0; k];
        b[k - 1] = 1.0;
        let mut pi = solve_linear(a, b)?;

        let sum: f64 = pi.iter().sum();
        for v in &mut pi {
            *v /= sum;
        }
        // Polish with power iterations when the direct solve leaves slack.
        for _ in 0..256 {
            if self.stationary_residual(&pi) <= 1e-14 {
                break;
            }
            pi = self.left_multiply(&pi);
            let sum: f64 = pi.iter().sum();
            for v in &mut pi {
                *v /= sum;
            }
        }
        let residual = self.stationary_residual(&pi);
        if residual > STATIONARY_TOL {
            return Err(Error::StationaryResidual { residual });
        }
        if pi.iter().any(|&v| v <= 0.0) {
            return Err(Error::StationaryResidual { residual });
        }
        Ok(pi)
    }

    fn left_multiply(&self, pi: &[f64]) -> Vec<f64> {
        let k = self.state_count();
        let mut out = vec![0.0; k];
        for (i, &w) in pi.iter().enumerate() {
            for j in 0..k {
                out[j] += w * self.rows[i][j];
            }
        }
        out
    }

    fn stationary_residual(&self, pi: &[f64]) -> f64 {
        let next = self.left_multiply(pi);
        next.iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// M^L; entry `(a, b)` is the probability of reaching b from a in
    /// exactly L steps.
    pub fn l_step_matrix(&self, l: u32) -> Vec<Vec<f64>> {
        debug_assert!(l >= 1);
        let k = self.state_count();
        let mut result = identity(k);
        let mut base = self.rows.clone();
        let mut exp = l;
        while exp > 0 {
            if exp & 1 == 1 {
                result = mat_mul(&result, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = mat_mul(&base, &base);
            }
        }
        result
    }

    /// max over start states a of `sum_b |(M^L)[a][b] - pi[b]|`; 0 means
    /// every row of M^L already equals the stationary law.
    pub fn mixing_deficit(&self, l: u32) -> Result<f64> {
        let pi = self.stationary_distribution()?;
        // identical rows are already the stationary law, and stay so under
        // any power; report the exact zero rather than rounding noise
        if self.rows.iter().all(|r| *r == self.rows[0]) {
            return Ok(0.0);
        }
        let ml = self.l_step_matrix(l);
        Ok(ml
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&pi)
                    .map(|(p, q)| (p - q).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max))
    }

    /// Joint L-step law: entry `(a, b)` is `pi[a] * (M^L)[a][b]`, the
    /// stationary probability of starting an epoch at a and ending it at b.
    pub fn joint_l_step(&self, l: u32) -> Result<Vec<Vec<f64>>> {
        let pi = self.stationary_distribution()?;
        let mut ml = self.l_step_matrix(l);
        for (a, row) in ml.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v *= pi[a];
            }
        }
        Ok(ml)
    }
}

fn reachable(edges: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; edges.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &v in &edges[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn bfs_levels(edges: &[Vec<usize>], start: usize) -> Vec<u64> {
    let mut level = vec![u64::MAX; edges.len()];
    let mut queue = std::collections::VecDeque::new();
    level[start] = 0;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        for &v in &edges[u] {
            if level[v] == u64::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    level
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn identity(k: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; k]; k];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = a.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for (l, &av) in a[i].iter().enumerate() {
            if av == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i][j] += av * b[l][j];
            }
        }
    }
    out
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::StationaryResidual {
                residual: f64::INFINITY,
            });
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for j in col..k {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let mut acc = b[col];
        for j in col + 1..k {
            acc -= a[col][j] * x[j];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

/// Ordered, duplicate-free list of source symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if symbols.len() > u16::MAX as usize {
            return Err(Error::AlphabetTooLarge {
                size: symbols.len(),
            });
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::DuplicateSymbol { symbol: s.clone() });
            }
        }
        Ok(Self { symbols })
    }

    /// One symbol per character of `s`.
    pub fn from_chars(s: &str) -> Result<Self> {
        Self::new(s.chars().map(String::from).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, index: u16) -> &str {
        &self.symbols[index as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, token: &str) -> Option<u16> {
        self.symbols.iter().position(|s| s == token).map(|i| i as u16)
    }

    /// True when every symbol is a single character, so sequences can be
    /// written as contiguous text.
    pub fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }
}

/// Which distribution `Z_0` is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialDist {
    /// The model's stored initial distribution.
    Explicit,
    /// The stationary distribution of the underlying chain.
    Stationary,
}

/// A sampled state/output path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSample {
    pub states: Vec<usize>,
    pub symbols: Vec<u16>,
}

/// A Markov chain observed through per-state emission distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenMarkovModel {
    chain: MarkovChain,
    pi0: Vec<f64>,
    alphabet: Alphabet,
    emissions: Vec<Vec<f64>>,
}

impl HiddenMarkovModel {
    /// `pi0 = None` defaults the initial distribution to the stationary one
    /// (which requires an irreducible aperiodic chain).
    pub fn new(
        chain: MarkovChain,
        alphabet: Alphabet,
        emissions: Vec<Vec<f64>>,
        pi0: Option<Vec<f64>>,
    ) -> Result<Self> {
        let k = chain.state_count();
        if emissions.len() != k {
            return Err(Error::EmissionRowCount {
                found: emissions.len(),
                expected: k,
            });
        }
        for (i, row) in emissions.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::RaggedMatrix {
                    row: i,
                    found: row.len(),
                    expected: alphabet.len(),
                });
            }
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if !(-ROW_SUM_TOL..=1.0 + ROW_SUM_TOL).contains(&v) {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowNotStochastic { row: i, sum });
            }
        }
        let pi0 = match pi0 {
            Some(v) => {
                if v.len() != k {
                    return Err(Error::BadVectorLength {
                        found: v.len(),
                        expected: k,
                    });
                }
                let mut sum = 0.0;
                for (index, &p) in v.iter().enumerate() {
                    if !p.is_finite() || !(-ROW_SUM_TOL..=1.0 + ROW_SUM_TOL).contains(&p) {
                        return Err(Error::VectorEntryOutOfRange { index, value: p });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::VectorNotStochastic { sum });
                }
                v
            }
            None => chain.stationary_distribution()?,
        };
        Ok(Self {
            chain,
            pi0,
            alphabet,
            emissions,
        })
    }

    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    pub fn state_count(&self) -> usize {
        self.chain.state_count()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.pi0
    }

    pub fn emissions(&self) -> &[Vec<f64>] {
        &self.emissions
    }

    pub fn emission_row(&self, state: usize) -> &[f64] {
        &self.emissions[state]
    }

    /// Sample n states and n symbols. The draw order is fixed: one uniform
    /// for Z_0, then alternately one for each X_t and one for each Z_{t+1};
    /// identical inputs give identical outputs.
    pub fn sample_path(&self, n: usize, seed: u64, init: InitialDist) -> Result<PathSample> {
        self.sample_impl(n, seed, init, false)
    }

    /// Like [`sample_path`](Self::sample_path) but also draws the state that
    /// follows the final emission, so `states.len() == n + 1`. The shared
    /// prefix of the two variants is identical for the same seed.
    pub fn sample_path_with_end_state(
        &self,
        n: usize,
        seed: u64,
        init: InitialDist,
    ) -> Result<PathSample> {
        self.sample_impl(n, seed, init, true)
    }

    fn sample_impl(
        &self,
        n: usize,
        seed: u64,
        init: InitialDist,
        with_end: bool,
    ) -> Result<PathSample> {
        let init_dist = match init {
            InitialDist::Explicit => Categorical::new(&self.pi0),
            InitialDist::Stationary => Categorical::new(&self.chain.stationary_distribution()?),
        };
        let transitions: Vec<Categorical> =
            self.chain.rows().iter().map(|r| Categorical::new(r)).collect();
        let emissions: Vec<Categorical> =
            self.emissions.iter().map(|r| Categorical::new(r)).collect();

        let mut rng = SplitMix64::new(seed);
        let mut states = Vec::with_capacity(n + usize::from(with_end));
        let mut symbols = Vec::with_capacity(n);
        if n == 0 {
            if with_end {
                states.push(init_dist.draw(&mut rng));
            }
            return Ok(PathSample { states, symbols });
        }
        let mut z = init_dist.draw(&mut rng);
        for t in 0..n {
            states.push(z);
            symbols.push(emissions[z].draw(&mut rng) as u16);
            if t + 1 < n || with_end {
                z = transitions[z].draw(&mut rng);
            }
        }
        if with_end {
            states.push(z);
        }
        Ok(PathSample { states, symbols })
    }
}
