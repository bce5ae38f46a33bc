//! Monte Carlo link simulation at the matched-filter output.
//!
//! Each trial draws the fading gains of two consecutive bit intervals on every
//! branch, adds white Gaussian noise, and applies the combining detector to
//! one equiprobable data bit. Only the joint statistics of the pair
//! `(ã(k−1), ã(k))` enter the decision, so every trial is an independent pair.
//!
//! Draw order within a trial stream (see [`crate::rng`]): one `u64` whose top
//! bit is the data bit, then per branch in order: `a_prev`, the innovation
//! `g`, the noise on `z_prev`, the noise on `z_curr` (two uniforms each).

use crate::analytic::detector_weights;
use crate::channel::{validate_branches, BranchParams, Detector, DiversityConfig};
use crate::rng::CounterRng;
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;
use num_complex::Complex64;

/// Energy and noise normalization.
///
/// The signal side is referenced to a unit noise level, so a branch with
/// SNR γ always has `R(0) = γ / (2 E_b)`; `n0` only sets the variance of the
/// additive noise, which lets tests switch noise off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimScale {
    pub eb: f64,
    pub n0: f64,
}

impl SimScale {
    pub const UNIT: SimScale = SimScale { eb: 1.0, n0: 1.0 };

    pub const fn noiseless() -> Self {
        SimScale { eb: 1.0, n0: 0.0 }
    }

    /// Per-dimension variance R(0) of the fading gain.
    pub fn r0(&self, branch: &BranchParams) -> f64 {
        branch.gamma / (2.0 * self.eb)
    }
}

impl Default for SimScale {
    fn default() -> Self {
        Self::UNIT
    }
}

/// Matched-filter fading gains of bit intervals k−1 and k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingPair {
    pub a_prev: Complex64,
    pub a_curr: Complex64,
}

/// Data phase change between consecutive bits: 0-bit ↦ 0, 1-bit ↦ π.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseChange {
    Zero,
    Pi,
}

impl PhaseChange {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            PhaseChange::Zero
        } else {
            PhaseChange::Pi
        }
    }
}

/// Matched-filter outputs z̃(k−1), z̃(k) of one branch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    pub z_prev: Complex64,
    pub z_curr: Complex64,
}

/// Draws a pair with per-dimension variance R(0) and real one-bit
/// cross-covariance ρR(0): `a_curr = ρ·a_prev + √(1−ρ²)·g`.
pub fn sample_fading_pair(branch: &BranchParams, scale: &SimScale, rng: &mut CounterRng) -> FadingPair {
    let r0 = scale.r0(branch);
    let a_prev = rng.complex_gaussian(r0);
    let g = rng.complex_gaussian(r0);
    let a_curr = a_prev * branch.rho + g * libm::sqrt((1.0 - branch.rho * branch.rho).max(0.0));
    FadingPair { a_prev, a_curr }
}

/// z_prev = √E_b·a_prev + ν_prev and z_curr = √E_b·e^{jΔφ}·a_curr + ν_curr,
/// with φ(k−1) = 0 and each ν of total variance N0.
pub fn make_observation(pair: &FadingPair, phase: PhaseChange, scale: &SimScale, rng: &mut CounterRng) -> Observation {
    let amp = libm::sqrt(scale.eb);
    let noise_var = 0.5 * scale.n0;
    let nu_prev = rng.complex_gaussian(noise_var);
    let nu_curr = rng.complex_gaussian(noise_var);
    let signal = match phase {
        PhaseChange::Zero => pair.a_curr,
        PhaseChange::Pi => -pair.a_curr,
    };
    Observation { z_prev: pair.a_prev * amp + nu_prev, z_curr: signal * amp + nu_curr }
}

/// Combined differential statistic Re Σ wᵢ z̃ᵢ(k) z̃ᵢ*(k−1).
pub fn combined_statistic(obs: &[Observation], weights: &[f64]) -> f64 {
    assert_eq!(obs.len(), weights.len(), "one weight per branch");
    obs.iter().zip(weights).map(|(o, &w)| w * (o.z_curr * o.z_prev.conj()).re).sum()
}

/// Detected bit: 0 when the combined statistic is ≥ 0 (ties go to 0), else 1.
pub fn decide(obs: &[Observation], weights: &[f64]) -> u8 {
    u8::from(combined_statistic(obs, weights) < 0.0)
}

/// Log-likelihood of the observations under Δφ = πm, up to a constant.
///
/// Sums, per branch, the log of the Gaussian density of z̃(k) given z̃(k−1)
/// (mean `2R(1)E_b/(2E_bR(0)+N0) · z̃(k−1)·e^{jπm}`, variance
/// `2E_bR(0)+N0 − 4E_b²R(1)²/(2E_bR(0)+N0)`) and of the marginal density of
/// z̃(k−1), which does not depend on m.
pub fn loglik_metric(obs: &[Observation], branches: &[BranchParams], scale: &SimScale, m: u8) -> f64 {
    assert_eq!(obs.len(), branches.len(), "one observation per branch");
    let sign = if m == 0 { 1.0 } else { -1.0 };
    obs.iter()
        .zip(branches)
        .map(|(o, b)| {
            let r0 = scale.r0(b);
            let r1 = b.rho * r0;
            let var_z = 2.0 * scale.eb * r0 + scale.n0;
            let gain = 2.0 * r1 * scale.eb / var_z;
            let cond_var = var_z - (2.0 * scale.eb * r1) * (2.0 * scale.eb * r1) / var_z;
            let mean = o.z_prev * (gain * sign);
            let conditional = -libm::log(PI * cond_var) - (o.z_curr - mean).norm_sqr() / cond_var;
            let marginal = -libm::log(PI * var_z) - o.z_prev.norm_sqr() / var_z;
            conditional + marginal
        })
        .sum()
}

/// Error and trial counts, split by the transmitted bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub errors: [u64; 2],
    pub trials: [u64; 2],
}

impl Tally {
    pub fn errors(&self) -> u64 {
        self.errors[0] + self.errors[1]
    }

    pub fn trials(&self) -> u64 {
        self.trials[0] + self.trials[1]
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            errors: [self.errors[0] + other.errors[0], self.errors[1] + other.errors[1]],
            trials: [self.trials[0] + other.trials[0], self.trials[1] + other.trials[1]],
        }
    }
}

/// Validated configuration with precomputed combining weights.
#[derive(Debug, Clone)]
pub struct PreparedSim {
    branches: Vec<BranchParams>,
    weights: Vec<f64>,
    scale: SimScale,
    detector: Detector,
}

impl PreparedSim {
    pub fn new(cfg: &DiversityConfig, scale: SimScale) -> Result<Self> {
        validate_branches(&cfg.branches)?;
        Ok(Self {
            weights: detector_weights(&cfg.branches, cfg.detector),
            branches: cfg.branches.clone(),
            scale,
            detector: cfg.detector,
        })
    }

    pub fn detector(&self) -> Detector {
        self.detector
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Runs one trial and fills `obs` (length L) with its observations.
    /// Returns `(sent_bit, detected_bit)`.
    pub fn run_trial(&self, seed: u64, trial: u64, obs: &mut [Observation]) -> (u8, u8) {
        let mut rng = CounterRng::for_trial(seed, trial);
        let bit = (rng.next_u64() >> 63) as u8;
        let phase = PhaseChange::from_bit(bit);
        for (slot, branch) in obs.iter_mut().zip(&self.branches) {
            let pair = sample_fading_pair(branch, &self.scale, &mut rng);
            *slot = make_observation(&pair, phase, &self.scale, &mut rng);
        }
        (bit, decide(obs, &self.weights))
    }

    /// Tally over the global trial indices in `range`.
    pub fn simulate_range(&self, seed: u64, range: Range<u64>) -> Tally {
        let mut obs = alloc::vec![Observation::default(); self.branches.len()];
        let mut tally = Tally::default();
        for trial in range {
            let (sent, got) = self.run_trial(seed, trial, &mut obs);
            tally.trials[sent as usize] += 1;
            tally.errors[sent as usize] += u64::from(sent != got);
        }
        tally
    }
}

/// Executes a set of trial ranges, possibly in parallel; must return one
/// tally per range, in order.
pub trait PartitionRunner {
    fn run(&self, sim: &PreparedSim, seed: u64, ranges: &[Range<u64>]) -> Vec<Tally>;
}

/// Runs partitions one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl PartitionRunner for Sequential {
    fn run(&self, sim: &PreparedSim, seed: u64, ranges: &[Range<u64>]) -> Vec<Tally> {
        ranges.iter().map(|r| sim.simulate_range(seed, r.clone())).collect()
    }
}

/// Stop once `ci95_halfwidth < rel_tol · p_hat` with at least `min_errors`
/// errors. Checked after every round of `workers × batch` trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStop {
    pub rel_tol: f64,
    pub min_errors: u64,
    pub batch: u64,
}

impl Default for EarlyStop {
    fn default() -> Self {
        Self { rel_tol: 0.05, min_errors: 100, batch: 1 << 16 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRequest {
    /// Trial budget (the exact count when early stopping is off).
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub early_stop: Option<EarlyStop>,
    pub scale: SimScale,
}

impl SimRequest {
    pub fn new(trials: u64, seed: u64, workers: usize) -> Self {
        Self { trials, seed, workers, early_stop: None, scale: SimScale::UNIT }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BepEstimate {
    pub errors: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci95_halfwidth: f64,
    pub seed: u64,
    pub detector: Detector,
    pub workers: usize,
    /// Counts split by transmitted bit.
    pub by_bit: Tally,
    pub early_stopped: bool,
    /// Set when early stopping was enabled: the stopping point then depends
    /// on the round size, hence on the worker count.
    pub worker_dependent: bool,
}

impl BepEstimate {
    fn from_tally(tally: Tally, req: &SimRequest, detector: Detector, early_stopped: bool) -> Self {
        let (p_hat, ci95_halfwidth) = binomial_ci95(tally.errors(), tally.trials());
        Self {
            errors: tally.errors(),
            trials: tally.trials(),
            p_hat,
            ci95_halfwidth,
            seed: req.seed,
            detector,
            workers: req.workers,
            by_bit: tally,
            early_stopped,
            worker_dependent: req.early_stop.is_some(),
        }
    }
}

/// Point estimate and 95 % normal-approximation half-width.
pub fn binomial_ci95(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = errors as f64 / trials as f64;
    (p, 1.96 * libm::sqrt(p * (1.0 - p) / trials as f64))
}

/// Splits `0..trials` into `parts` contiguous, nearly equal ranges.
pub fn partition(range: Range<u64>, parts: usize) -> Vec<Range<u64>> {
    let parts = parts.max(1) as u64;
    let len = range.end - range.start;
    (0..parts)
        .map(|w| {
            let lo = range.start + len * w / parts;
            let hi = range.start + len * (w + 1) / parts;
            lo..hi
        })
        .filter(|r| !r.is_empty())
        .collect()
}

/// Single-threaded [`estimate_bep_with`].
pub fn estimate_bep(cfg: &DiversityConfig, trials: u64, seed: u64, workers: usize) -> Result<BepEstimate> {
    estimate_bep_with(cfg, &SimRequest::new(trials, seed, workers), &Sequential)
}

/// Monte Carlo bit error probability for `cfg`.
///
/// Without early stopping the result depends only on `(cfg, trials, seed)`:
/// trial `t` always uses the stream `(seed, t)` whichever worker runs it.
pub fn estimate_bep_with(
    cfg: &DiversityConfig,
    req: &SimRequest,
    runner: &impl PartitionRunner,
) -> Result<BepEstimate> {
    if req.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    if req.workers == 0 {
        return Err(Error::InvalidArgument("at least one worker is required".into()));
    }
    let sim = PreparedSim::new(cfg, req.scale)?;
    let Some(rule) = req.early_stop else {
        let tally = runner
            .run(&sim, req.seed, &partition(0..req.trials, req.workers))
            .into_iter()
            .fold(Tally::default(), Tally::merge);
        return Ok(BepEstimate::from_tally(tally, req, cfg.detector, false));
    };
    if rule.batch == 0 || rule.rel_tol.is_nan() || rule.rel_tol <= 0.0 {
        return Err(Error::InvalidArgument("early stop needs a positive batch size and tolerance".into()));
    }
    let mut tally = Tally::default();
    let mut next = 0;
    while next < req.trials {
        let round_end = (next + rule.batch * req.workers as u64).min(req.trials);
        let ranges: Vec<Range<u64>> = (0..req.workers as u64)
            .map(|w| (next + w * rule.batch).min(round_end)..(next + (w + 1) * rule.batch).min(round_end))
            .filter(|r| !r.is_empty())
            .collect();
        tally = runner.run(&sim, req.seed, &ranges).into_iter().fold(tally, Tally::merge);
        next = round_end;
        let (p, ci) = binomial_ci95(tally.errors(), tally.trials());
        if tally.errors() >= rule.min_errors && ci < rule.rel_tol * p {
            return Ok(BepEstimate::from_tally(tally, req, cfg.detector, next < req.trials));
        }
    }
    Ok(BepEstimate::from_tally(tally, req, cfg.detector, false))
}
