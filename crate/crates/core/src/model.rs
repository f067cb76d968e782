//! Temporal networks as ordered lists of structured pairs `(A_i, B_i)`.
//!
//! All indices are 0-based in this module. The JSON format in [`crate::io`]
//! converts from and to the 1-based positions used in network files.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Zero/nonzero skeleton of a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SparsityPattern {
    rows: usize,
    cols: usize,
    nonzeros: BTreeSet<(usize, usize)>,
}

impl SparsityPattern {
    /// Builds a pattern from `(row, col)` positions. Repeated positions collapse.
    pub fn new<I>(rows: usize, cols: usize, positions: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut nonzeros = BTreeSet::new();
        for (r, c) in positions {
            if r >= rows || c >= cols {
                return Err(Error::InvalidPattern(format!(
                    "position ({r}, {c}) outside a {rows}x{cols} pattern"
                )));
            }
            nonzeros.insert((r, c));
        }
        Ok(Self {
            rows,
            cols,
            nonzeros,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            nonzeros: BTreeSet::new(),
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let nonzeros = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .collect();
        Self {
            rows,
            cols,
            nonzeros,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            nonzeros: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// Columns of the `n x n` identity selected by `support`, in the given order.
    pub fn identity_columns(n: usize, support: &[usize]) -> Result<Self> {
        Self::new(
            n,
            support.len(),
            support.iter().enumerate().map(|(c, &r)| (r, c)),
        )
    }

    /// Horizontal concatenation `[P_1, P_2, ...]`; all blocks need the same row count.
    pub fn hconcat(rows: usize, blocks: &[&SparsityPattern]) -> Result<Self> {
        let mut nonzeros = BTreeSet::new();
        let mut offset = 0;
        for block in blocks {
            if block.rows != rows {
                return Err(Error::NonConformable(format!(
                    "block with {} rows in a {rows}-row concatenation",
                    block.rows
                )));
            }
            nonzeros.extend(block.nonzeros.iter().map(|&(r, c)| (r, c + offset)));
            offset += block.cols;
        }
        Ok(Self {
            rows,
            cols: offset,
            nonzeros,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.nonzeros.contains(&(row, col))
    }

    /// Nonzero positions in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nonzeros.iter().copied()
    }

    pub fn column_count(&self, col: usize) -> usize {
        self.nonzeros.iter().filter(|&&(_, c)| c == col).count()
    }

    /// Pattern with the given position removed (no-op when absent).
    pub fn without(&self, row: usize, col: usize) -> Self {
        let mut out = self.clone();
        out.nonzeros.remove(&(row, col));
        out
    }

    /// Keeps only rows and columns whose flags are set. Dimensions are unchanged.
    pub fn masked(&self, keep_row: &[bool], keep_col: &[bool]) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            nonzeros: self
                .nonzeros
                .iter()
                .copied()
                .filter(|&(r, c)| keep_row[r] && keep_col[c])
                .collect(),
        }
    }

    /// Rows of the pattern indexed by `rows`, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let nonzeros = rows
            .iter()
            .enumerate()
            .flat_map(|(new_r, &r)| {
                self.nonzeros
                    .range((r, 0)..(r, usize::MAX))
                    .map(move |&(_, c)| (new_r, c))
            })
            .collect();
        Self {
            rows: rows.len(),
            cols: self.cols,
            nonzeros,
        }
    }

    /// Random pattern with independent entries present with probability `density`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, density: f64) -> Self {
        let mut nonzeros = BTreeSet::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    nonzeros.insert((r, c));
                }
            }
        }
        Self {
            rows,
            cols,
            nonzeros,
        }
    }
}

/// One subsystem `(A_i, B_i)`: `a` is `n x n`, `b` is `n x m_i` (`m_i = 0` allowed).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StructuredPair {
    a: SparsityPattern,
    b: SparsityPattern,
}

impl StructuredPair {
    pub fn new(a: SparsityPattern, b: SparsityPattern) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::InvalidPattern(format!(
                "state matrix is {}x{}, expected square",
                a.rows, a.cols
            )));
        }
        if b.rows != a.rows {
            return Err(Error::InvalidPattern(format!(
                "input matrix has {} rows, state matrix has {}",
                b.rows, a.rows
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &SparsityPattern {
        &self.a
    }

    pub fn b(&self) -> &SparsityPattern {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.rows
    }

    pub fn m(&self) -> usize {
        self.b.cols
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, density: f64) -> Self {
        Self {
            a: SparsityPattern::random(rng, n, n, density),
            b: SparsityPattern::random(rng, n, m, density),
        }
    }

    /// Every input column has exactly one nonzero.
    pub fn is_dedicated(&self) -> bool {
        (0..self.b.cols).all(|c| self.b.column_count(c) == 1)
    }
}

/// Ordered sequence of structured pairs sharing the state dimension `n`.
/// Pair `0` is active first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TemporalNetwork {
    n: usize,
    pairs: Vec<StructuredPair>,
    labels: Vec<Option<String>>,
}

/// Outcome of [`validate_network`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

impl TemporalNetwork {
    /// Builds and validates a network.
    pub fn new(n: usize, pairs: Vec<StructuredPair>) -> Result<Self> {
        let net = Self::from_parts(n, pairs);
        let report = validate_network(&net);
        if report.is_ok() {
            Ok(net)
        } else {
            Err(Error::InvalidNetwork(report.to_string()))
        }
    }

    /// Builds a network without checking it; see [`validate_network`].
    pub fn from_parts(n: usize, pairs: Vec<StructuredPair>) -> Self {
        let labels = vec![None; pairs.len()];
        Self { n, pairs, labels }
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Self {
        self.labels = labels;
        self.labels.resize(self.pairs.len(), None);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of subsystems `N`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[StructuredPair] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> &StructuredPair {
        &self.pairs[i]
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn input_counts(&self) -> Vec<usize> {
        self.pairs.iter().map(StructuredPair::m).collect()
    }

    /// Random network with `m_i` drawn from `inputs` (inclusive range).
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n: usize,
        n_subsystems: usize,
        inputs: (usize, usize),
        density: f64,
    ) -> Self {
        let pairs = (0..n_subsystems)
            .map(|_| {
                let m = rng.gen_range(inputs.0..=inputs.1);
                StructuredPair::random(rng, n, m, density)
            })
            .collect();
        Self::from_parts(n, pairs)
    }

    /// Network whose pairs are copies of the pairs listed in `order`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(order.len());
        let mut labels = Vec::with_capacity(order.len());
        for &i in order {
            if i >= self.len() {
                return Err(Error::BadIndex {
                    index: i,
                    n_subsystems: self.len(),
                });
            }
            pairs.push(self.pairs[i].clone());
            labels.push(self.labels[i].clone());
        }
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("empty subsystem order".into()));
        }
        Ok(Self {
            n: self.n,
            pairs,
            labels,
        })
    }
}

/// Checks every structural invariant of a network and names each violation.
pub fn validate_network(net: &TemporalNetwork) -> ValidationReport {
    let mut violations = Vec::new();
    if net.pairs.is_empty() {
        violations.push("N ≥ 1 required".to_string());
    }
    for (idx, pair) in net.pairs.iter().enumerate() {
        let label = idx + 1;
        if pair.a.rows != pair.a.cols {
            violations.push(format!(
                "pair {label}: A is {}x{}, not square",
                pair.a.rows, pair.a.cols
            ));
        }
        if pair.a.rows != net.n {
            violations.push(format!(
                "pair {label}: state dim {} ≠ {}",
                pair.a.rows, net.n
            ));
        }
        if pair.b.rows != pair.a.rows {
            violations.push(format!(
                "pair {label}: B has {} rows, A has {}",
                pair.b.rows, pair.a.rows
            ));
        }
        for (name, p) in [("A", &pair.a), ("B", &pair.b)] {
            if let Some(&(r, c)) = p
                .nonzeros
                .iter()
                .find(|&&(r, c)| r >= p.rows || c >= p.cols)
            {
                violations.push(format!(
                    "pair {label}: {name} position ({}, {}) out of bounds",
                    r + 1,
                    c + 1
                ));
            }
        }
    }
    ValidationReport { violations }
}

/// Reverses the temporal order, mapping controllability questions to reachability ones.
pub fn reverse_temporal_order(net: &TemporalNetwork) -> TemporalNetwork {
    TemporalNetwork {
        n: net.n,
        pairs: net.pairs.iter().rev().cloned().collect(),
        labels: net.labels.iter().rev().cloned().collect(),
    }
}

/// Replaces each dedicated input matrix `B_k` with `[B_1, ..., B_k]`, every block
/// carrying fresh independent nonzeros. The generic dimension of the minimal
/// subspace containing the overall reachable set is unchanged.
pub fn augment_dedicated_inputs(net: &TemporalNetwork) -> Result<TemporalNetwork> {
    for (i, pair) in net.pairs.iter().enumerate() {
        for c in 0..pair.m() {
            let nonzeros = pair.b.column_count(c);
            if nonzeros != 1 {
                return Err(Error::NotDedicated {
                    subsystem: i + 1,
                    column: c + 1,
                    nonzeros,
                });
            }
        }
    }
    let mut pairs = Vec::with_capacity(net.len());
    for k in 0..net.len() {
        let blocks: Vec<&SparsityPattern> = net.pairs[..=k].iter().map(|p| &p.b).collect();
        let b = SparsityPattern::hconcat(net.n, &blocks)?;
        pairs.push(StructuredPair {
            a: net.pairs[k].a.clone(),
            b,
        });
    }
    Ok(TemporalNetwork {
        n: net.n,
        pairs,
        labels: net.labels.clone(),
    })
}

/// Ranges used when sampling numeric realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingConfig {
    /// Magnitudes of nonzero entries are uniform on this interval; signs are uniform.
    pub magnitude: (f64, f64),
    /// Durations `h_i` are uniform on this interval.
    pub duration: (f64, f64),
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            magnitude: (0.1, 1.0),
            duration: (0.5, 1.5),
        }
    }
}

impl SamplingConfig {
    fn check(&self) -> Result<()> {
        let (lo, hi) = self.magnitude;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "value magnitude range [{lo}, {hi}] is degenerate"
            )));
        }
        let (lo, hi) = self.duration;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration range [{lo}, {hi}] must be a nondegenerate positive interval"
            )));
        }
        Ok(())
    }
}

/// Numeric matrices and durations assigned to a network's patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a_mats: Vec<DMatrix<f64>>,
    pub b_mats: Vec<DMatrix<f64>>,
    pub durations: Vec<f64>,
    pub phi_seed: u64,
}

impl Realization {
    /// Every nonzero set to `value`, with the given durations.
    pub fn constant(net: &TemporalNetwork, value: f64, durations: &[f64]) -> Result<Self> {
        if durations.len() != net.len() {
            return Err(Error::InvalidParameter(format!(
                "{} durations for {} subsystems",
                durations.len(),
                net.len()
            )));
        }
        let fill = |p: &SparsityPattern| {
            let mut m = DMatrix::zeros(p.rows, p.cols);
            for (r, c) in p.iter() {
                m[(r, c)] = value;
            }
            m
        };
        Ok(Self {
            a_mats: net.pairs.iter().map(|p| fill(&p.a)).collect(),
            b_mats: net.pairs.iter().map(|p| fill(&p.b)).collect(),
            durations: durations.to_vec(),
            phi_seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.a_mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_mats.is_empty()
    }
}

/// Samples a realization. Deterministic in `seed`.
pub fn sample_realization(
    net: &TemporalNetwork,
    seed: u64,
    config: &SamplingConfig,
) -> Result<Realization> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = config.magnitude;
    let fill = |p: &SparsityPattern, rng: &mut ChaCha8Rng| {
        let mut m = DMatrix::zeros(p.rows, p.cols);
        for (r, c) in p.iter() {
            let magnitude = rng.gen_range(lo..hi);
            m[(r, c)] = if rng.gen_bool(0.5) {
                magnitude
            } else {
                -magnitude
            };
        }
        m
    };
    let mut a_mats = Vec::with_capacity(net.len());
    let mut b_mats = Vec::with_capacity(net.len());
    for pair in &net.pairs {
        a_mats.push(fill(&pair.a, &mut rng));
        b_mats.push(fill(&pair.b, &mut rng));
    }
    let durations = (0..net.len())
        .map(|_| rng.gen_range(config.duration.0..config.duration.1))
        .collect();
    Ok(Realization {
        a_mats,
        b_mats,
        durations,
        phi_seed: seed,
    })
}

/// Target set `T ⊆ {0..n-1}` for target-controllability questions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetSpec {
    target: BTreeSet<usize>,
}

impl TargetSpec {
    pub fn new<I: IntoIterator<Item = usize>>(n: usize, nodes: I) -> Result<Self> {
        let target: BTreeSet<usize> = nodes.into_iter().collect();
        if target.is_empty() {
            return Err(Error::BadTarget("target set is empty".into()));
        }
        if let Some(&bad) = target.iter().find(|&&v| v >= n) {
            return Err(Error::BadTarget(format!(
                "node {} outside 1..={n}",
                bad + 1
            )));
        }
        Ok(Self { target })
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.target.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.target.contains(&v)
    }
}

/// Embeds a target-controllability instance `(pair, T)` into an `N`-subsystem
/// network: subsystem 1 is `pair`, subsystems `2..N` have `A = 0` and inputs
/// actuating the complement of `T`, split into `N - 1` contiguous runs.
pub fn stcp_embedding(
    pair: &StructuredPair,
    target: &TargetSpec,
    n_subsystems: usize,
) -> Result<TemporalNetwork> {
    let n = pair.n();
    if let Some(&bad) = target.target.iter().find(|&&v| v >= n) {
        return Err(Error::BadTarget(format!(
            "node {} outside 1..={n}",
            bad + 1
        )));
    }
    let complement: Vec<usize> = (0..n).filter(|v| !target.contains(*v)).collect();
    let max = complement.len() + 1;
    if n_subsystems < 2 || n_subsystems > max {
        return Err(Error::BadN {
            n_subsystems,
            min: 2,
            max,
        });
    }
    let parts = n_subsystems - 1;
    let base = complement.len() / parts;
    let extra = complement.len() % parts;
    let mut pairs = vec![pair.clone()];
    let mut start = 0;
    for j in 0..parts {
        let len = base + usize::from(j < extra);
        let support = &complement[start..start + len];
        start += len;
        pairs.push(StructuredPair {
            a: SparsityPattern::zeros(n, n),
            b: SparsityPattern::identity_columns(n, support)?,
        });
    }
    TemporalNetwork::new(n, pairs)
}

/// A sequence of (0-based) subsystem indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SwitchingPath(Vec<usize>);

impl SwitchingPath {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter(
                "switching path must have length ≥ 1".into(),
            ));
        }
        Ok(Self(indices))
    }

    /// Parses 1-based indices as used on the command line and in reports.
    pub fn from_one_based(indices: &[usize]) -> Result<Self> {
        if let Some(pos) = indices.iter().position(|&i| i == 0) {
            return Err(Error::BadIndex {
                index: pos,
                n_subsystems: 0,
            });
        }
        Self::new(indices.iter().map(|&i| i - 1).collect())
    }

    pub fn identity(n_subsystems: usize) -> Result<Self> {
        Self::new((0..n_subsystems).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// Fails with `BadIndex` when an entry does not name a subsystem of `net`.
    pub fn check(&self, net: &TemporalNetwork) -> Result<()> {
        match self.0.iter().find(|&&i| i >= net.len()) {
            Some(&index) => Err(Error::BadIndex {
                index: index + 1,
                n_subsystems: net.len(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for SwitchingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Uniformly random permutation of `0..len`.
pub(crate) fn random_permutation<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..len).collect();
    p.shuffle(rng);
    p
}
