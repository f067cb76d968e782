//! Numerical oracle: subspace dimensions of random realizations.
//!
//! Subspaces are carried as orthonormal bases. A basis is extended by
//! projecting new columns off it and keeping the directions whose singular
//! values exceed `tol` times a reference scale: the norm of the block itself
//! for raw input matrices, and the norm of the operator for images `M Q` of an
//! orthonormal `Q`, so rounding noise in a vanishing image is never promoted.

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    reverse_temporal_order, sample_realization, Realization, SamplingConfig, StructuredPair,
    SwitchingPath, TargetSpec, TemporalNetwork,
};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Diagonal Padé approximant `r_m(A)` with coefficients `b`.
fn pade(a: &DMatrix<f64>, b: &[f64]) -> DMatrix<f64> {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = DMatrix::identity(n, n);
    let mut odd = DMatrix::zeros(n, n);
    let mut even = DMatrix::zeros(n, n);
    for k in 0..b.len() / 2 {
        even += &power * b[2 * k];
        odd += &power * b[2 * k + 1];
        power = &power * &a2;
    }
    let u = a * odd;
    let p = &even + &u;
    let q = &even - &u;
    q.lu().solve(&p).expect("Padé denominator is nonsingular")
}

/// `e^{A h}` by scaling and squaring with Padé approximants.
pub fn matrix_exponential(a: &DMatrix<f64>, h: f64) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|x| !x.is_finite()) || !h.is_finite() {
        return Err(Error::InvalidParameter(
            "non-finite matrix exponential input".into(),
        ));
    }
    let ah = a * h;
    let norm = norm1(&ah);
    for (theta, b) in [
        (THETA_3, &PADE_3[..]),
        (THETA_5, &PADE_5[..]),
        (THETA_7, &PADE_7[..]),
        (THETA_9, &PADE_9[..]),
    ] {
        if norm <= theta {
            return Ok(pade(&ah, b));
        }
    }
    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let mut x = pade(&(ah / 2f64.powi(s)), &PADE_13);
    for _ in 0..s {
        x = &x * &x;
    }
    Ok(x)
}

/// `[B, AB, ..., A^{n-1} B]`.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NonSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if b.nrows() != n {
        return Err(Error::NonConformable(format!(
            "A is {n}x{n}, B has {} rows",
            b.nrows()
        )));
    }
    let m = b.ncols();
    let mut out = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.columns_mut(k * m, m).copy_from(&block);
        block = a * block;
    }
    Ok(out)
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Number of singular values above `tol` times the largest one.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Orthonormal basis of the directions of `m` with singular value above
/// `threshold` (absolute). The left vectors are rebuilt as `QR(M V_k)` from
/// the right singular vectors: nalgebra's `U` can be inaccurate when `m` has
/// exactly zero singular values.
fn range_basis(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("V requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > threshold)
        .collect();
    if keep.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let v_k = DMatrix::from_fn(m.ncols(), keep.len(), |r, c| v_t[(keep[c], r)]);
    (m * v_k).qr().q().columns(0, keep.len()).into_owned()
}

/// Orthonormal basis of the column space, relative tolerance `tol`.
pub fn orth(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let max = singular_values(m).into_iter().fold(0.0, f64::max);
    if max == 0.0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    range_basis(m, tol * max)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// `span Q + span V` keeping new directions above the absolute `threshold`.
fn extend_above(q: &DMatrix<f64>, v: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    if v.ncols() == 0 || q.ncols() == q.nrows() {
        return q.clone();
    }
    let mut r = v - q * (q.transpose() * v);
    r -= q * (q.transpose() * &r);
    let mut extra = range_basis(&r, threshold);
    if extra.ncols() == 0 {
        return q.clone();
    }
    // Directions kept from a small residual carry rounding of order eps/σ
    // along Q; project once more and re-orthonormalize.
    extra -= q * (q.transpose() * &extra);
    let extra = range_basis(&extra, 0.5);
    let mut out = DMatrix::zeros(q.nrows(), q.ncols() + extra.ncols());
    out.columns_mut(0, q.ncols()).copy_from(q);
    out.columns_mut(q.ncols(), extra.ncols()).copy_from(&extra);
    out
}

/// Orthonormal basis of `span Q + span V`, with `Q` orthonormal. New
/// directions must exceed `tol` times the norm of `V`.
pub fn extend_basis(q: &DMatrix<f64>, v: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let scale = spectral_norm(v);
    if scale == 0.0 {
        return q.clone();
    }
    extend_above(q, v, tol * scale)
}

/// `span Q + M span P` for orthonormal `Q` and `P`, judged against `‖M‖`.
fn extend_with_image(
    q: &DMatrix<f64>,
    m: &DMatrix<f64>,
    p: &DMatrix<f64>,
    tol: f64,
) -> DMatrix<f64> {
    let scale = spectral_norm(m);
    if scale == 0.0 {
        return q.clone();
    }
    extend_above(q, &(m * p), tol * scale)
}

/// Orthonormal basis of the Krylov space `⟨A|B⟩`, the column space of `[B, AB, ...]`.
pub fn krylov_basis(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut q = extend_basis(&DMatrix::zeros(a.nrows(), 0), b, tol);
    loop {
        let next = extend_with_image(&q, a, &q, tol);
        if next.ncols() == q.ncols() {
            return q;
        }
        q = next;
    }
}

/// Subsystems visited in order, each with its duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub steps: Vec<(usize, f64)>,
}

impl Schedule {
    /// Subsystems `1..N` in order with the realization's durations.
    pub fn identity(real: &Realization) -> Self {
        Self {
            steps: real.durations.iter().copied().enumerate().collect(),
        }
    }

    pub fn along(path: &SwitchingPath, durations: &[f64]) -> Result<Self> {
        if durations.len() != path.len() {
            return Err(Error::InvalidParameter(format!(
                "{} durations for a path of length {}",
                durations.len(),
                path.len()
            )));
        }
        Ok(Self {
            steps: path
                .indices()
                .iter()
                .copied()
                .zip(durations.iter().copied())
                .collect(),
        })
    }
}

/// Orthonormal basis of the reachable subspace
/// `⟨A_l|B_l⟩ + e^{A_l h_l} ⟨A_{l-1}|B_{l-1}⟩ + e^{A_l h_l} e^{A_{l-1} h_{l-1}} ⟨...⟩ + ...`
/// along the schedule, i.e. the column space of the reachability matrix.
pub fn reachable_subspace_basis(
    real: &Realization,
    schedule: &Schedule,
    tol: f64,
) -> Result<DMatrix<f64>> {
    let mut q: Option<DMatrix<f64>> = None;
    for &(i, h) in &schedule.steps {
        if i >= real.len() {
            return Err(Error::BadIndex {
                index: i + 1,
                n_subsystems: real.len(),
            });
        }
        let k = krylov_basis(&real.a_mats[i], &real.b_mats[i], tol);
        q = Some(match q {
            None => k,
            Some(prev) => {
                extend_with_image(&k, &matrix_exponential(&real.a_mats[i], h)?, &prev, tol)
            }
        });
    }
    q.ok_or_else(|| Error::InvalidParameter("empty schedule".into()))
}

/// Orthonormal basis of the controllable subspace
/// `⟨A_1|B_1⟩ + e^{-A_1 h_1} ⟨A_2|B_2⟩ + e^{-A_1 h_1} e^{-A_2 h_2} ⟨A_3|B_3⟩ + ...`.
pub fn controllable_subspace_basis(real: &Realization, tol: f64) -> Result<DMatrix<f64>> {
    let mut q: Option<DMatrix<f64>> = None;
    for i in (0..real.len()).rev() {
        let k = krylov_basis(&real.a_mats[i], &real.b_mats[i], tol);
        q = Some(match q {
            None => k,
            Some(prev) => {
                let e = matrix_exponential(&real.a_mats[i], -real.durations[i])?;
                extend_with_image(&k, &e, &prev, tol)
            }
        });
    }
    q.ok_or_else(|| Error::InvalidParameter("empty realization".into()))
}

/// Orthonormal basis of `⟨A_1|B_1⟩ + ... + ⟨A_N|B_N⟩`, the column space of
/// `[C_N, ..., C_1]`.
pub fn clow_basis(real: &Realization, tol: f64) -> DMatrix<f64> {
    let n = real.a_mats.first().map_or(0, DMatrix::nrows);
    let mut q = DMatrix::zeros(n, 0);
    for (a, b) in real.a_mats.iter().zip(&real.b_mats) {
        q = extend_basis(&q, &krylov_basis(a, b, tol), tol);
    }
    q
}

/// Orthonormal basis of `Ω̄ = Σ A_N^{j_N} ⋯ A_k^{j_k} Im B_k`.
///
/// Runs `l_0 = N(n-1)` rounds of `Γ_{ij} = A_j [Γ_{i-1,1}, ..., Γ_{i-1,j}]`,
/// keeping for each `j` only an orthonormal basis of the prefix sum
/// `span Γ_{i,1} + ... + span Γ_{i,j}`, whose image under `A_j` spans `Γ_{i+1,j}`.
pub fn omegabar_basis(real: &Realization, tol: f64) -> DMatrix<f64> {
    let big_n = real.len();
    let n = real.a_mats.first().map_or(0, DMatrix::nrows);
    let empty = DMatrix::<f64>::zeros(n, 0);
    let mut prefix = Vec::with_capacity(big_n);
    let mut acc = empty.clone();
    for b in &real.b_mats {
        acc = extend_basis(&acc, b, tol);
        prefix.push(acc.clone());
    }
    let mut w = acc;
    for _ in 0..big_n * n.saturating_sub(1) {
        let mut next = Vec::with_capacity(big_n);
        let mut acc = empty.clone();
        for (j, a) in real.a_mats.iter().enumerate() {
            let gamma = extend_with_image(&empty, a, &prefix[j], tol);
            acc = extend_basis(&acc, &gamma, tol);
            w = extend_basis(&w, &gamma, tol);
            next.push(acc.clone());
        }
        prefix = next;
    }
    w
}

/// Orthonormal basis of `Θ̄ = Σ A_1^{j_1} ⋯ A_k^{j_k} Im B_k`, via the reversed order.
pub fn thetabar_basis(real: &Realization, tol: f64) -> DMatrix<f64> {
    let reversed = Realization {
        a_mats: real.a_mats.iter().rev().cloned().collect(),
        b_mats: real.b_mats.iter().rev().cloned().collect(),
        durations: real.durations.iter().rev().copied().collect(),
        phi_seed: real.phi_seed,
    };
    omegabar_basis(&reversed, tol)
}

/// Trial count, master seed and rank tolerance for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleParams {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip)]
    pub sampling: SamplingConfig,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            trials: 5,
            seed: 42,
            tol: 1e-8,
            sampling: SamplingConfig::default(),
        }
    }
}

impl OracleParams {
    pub fn new(trials: usize, seed: u64, tol: f64) -> Self {
        Self {
            trials,
            seed,
            tol,
            ..Self::default()
        }
    }

    /// Seed of realization number `trial`, independent across trials.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng.next_u64()
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} outside (0, 1)",
                self.tol
            )));
        }
        Ok(())
    }

    fn realizations<'a>(
        &'a self,
        net: &'a TemporalNetwork,
    ) -> impl Iterator<Item = Result<Realization>> + 'a {
        (0..self.trials).map(move |t| sample_realization(net, self.trial_seed(t), &self.sampling))
    }
}

/// Per-trial ranks and their maximum, the reported generic value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub quantity: String,
    pub value: usize,
    pub trials: usize,
    pub per_trial: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
}

impl RankReport {
    fn new(quantity: &str, params: &OracleParams, per_trial: Vec<usize>) -> Self {
        Self {
            quantity: quantity.to_string(),
            value: per_trial.iter().copied().max().unwrap_or(0),
            trials: per_trial.len(),
            per_trial,
            seed: params.seed,
            tol: params.tol,
        }
    }
}

fn rank_report<F>(
    quantity: &str,
    net: &TemporalNetwork,
    params: &OracleParams,
    rank: F,
) -> Result<RankReport>
where
    F: Fn(&Realization) -> Result<usize>,
{
    params.check()?;
    let per_trial = params
        .realizations(net)
        .map(|r| r.and_then(|r| rank(&r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RankReport::new(quantity, params, per_trial))
}

/// `gdim Ω_h`: rank of the reachability matrix on sampled realizations.
pub fn oracle_gdim_omega_h(net: &TemporalNetwork, params: &OracleParams) -> Result<RankReport> {
    rank_report("omega_h", net, params, |r| {
        Ok(reachable_subspace_basis(r, &Schedule::identity(r), params.tol)?.ncols())
    })
}

/// `gdim Θ_h`: rank of the controllable-subspace matrix.
pub fn oracle_gdim_theta_h(net: &TemporalNetwork, params: &OracleParams) -> Result<RankReport> {
    rank_report("theta_h", net, params, |r| {
        Ok(controllable_subspace_basis(r, params.tol)?.ncols())
    })
}

/// Generic rank of `[C_N, ..., C_1]` (all durations zero).
pub fn oracle_gdim_clow(net: &TemporalNetwork, params: &OracleParams) -> Result<RankReport> {
    rank_report("c_low", net, params, |r| {
        Ok(clow_basis(r, params.tol).ncols())
    })
}

/// `gdim Ω̄` via the compressed `Γ` recursion.
pub fn oracle_gdim_omegabar(net: &TemporalNetwork, params: &OracleParams) -> Result<RankReport> {
    rank_report("omega_bar", net, params, |r| {
        Ok(omegabar_basis(r, params.tol).ncols())
    })
}

/// `gdim Θ̄`, the minimal subspace containing the overall controllable set.
pub fn oracle_gdim_thetabar(net: &TemporalNetwork, params: &OracleParams) -> Result<RankReport> {
    rank_report("theta_bar", net, params, |r| {
        Ok(thetabar_basis(r, params.tol).ncols())
    })
}

/// Reachable-subspace dimension along a switching path, with an independent
/// duration drawn for every step.
pub fn oracle_gdim_path(
    net: &TemporalNetwork,
    path: &SwitchingPath,
    params: &OracleParams,
) -> Result<RankReport> {
    path.check(net)?;
    let steps: Vec<usize> = path.indices().to_vec();
    let expanded = net.reordered(&steps)?;
    rank_report("omega_path", &expanded, params, |r| {
        Ok(reachable_subspace_basis(r, &Schedule::identity(r), params.tol)?.ncols())
    })
}

/// Generic rank of the rows `T` of the controllability matrix of one pair.
pub fn oracle_target_rank(
    pair: &StructuredPair,
    target: &TargetSpec,
    params: &OracleParams,
) -> Result<RankReport> {
    let net = TemporalNetwork::new(pair.n(), vec![pair.clone()])?;
    let rows = target.nodes();
    rank_report("target_rank", &net, params, |r| {
        // Rows of an orthonormal basis: singular values are judged against 1,
        // the norm of the full basis, not against the selected rows.
        let q = krylov_basis(&r.a_mats[0], &r.b_mats[0], params.tol);
        let sv = singular_values(&q.select_rows(rows.iter()));
        Ok(sv.into_iter().filter(|&s| s > params.tol).count())
    })
}

/// Per-trial comparison of `rank 𝒞` and `rank 𝒞_low`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EzzineHaddadReport {
    pub rank_c: RankReport,
    pub rank_c_low: RankReport,
    /// Trials in which the two ranks differ.
    pub differing_trials: Vec<usize>,
    pub differs: bool,
    pub verdict: String,
}

pub fn ezzine_haddad_report(
    net: &TemporalNetwork,
    params: &OracleParams,
) -> Result<EzzineHaddadReport> {
    let rank_c = oracle_gdim_omega_h(net, params)?;
    let rank_c_low = oracle_gdim_clow(net, params)?;
    let differing_trials: Vec<usize> = (0..params.trials)
        .filter(|&t| rank_c.per_trial[t] != rank_c_low.per_trial[t])
        .collect();
    let differs = !differing_trials.is_empty();
    let verdict = match (differs, net.len()) {
        (false, _) => "equal".to_string(),
        (true, big_n) if big_n >= 3 => format!("differs (N={big_n} counterexample)"),
        (true, big_n) => format!("differs (N={big_n})"),
    };
    Ok(EzzineHaddadReport {
        rank_c,
        rank_c_low,
        differing_trials,
        differs,
        verdict,
    })
}

/// Reversal helper for callers that want `Θ̄` through the `Ω̄` oracle.
pub fn oracle_gdim_omegabar_reversed(
    net: &TemporalNetwork,
    params: &OracleParams,
) -> Result<RankReport> {
    oracle_gdim_omegabar(&reverse_temporal_order(net), params)
}
