//! Monte Carlo estimation of the subset-sum success probabilities.
//!
//! Trials are independent: trial i draws a fresh sample set seeded by
//! `trial_seed(master_seed, i)` and runs one exact solve (meet-in-the-middle
//! throughout). Results are reduced by trial index, so estimates are
//! identical for any worker count.

use crate::bounds::{entropy_scaled, ConstantsConfig};
use crate::densities::{sample, DensitySpec};
use crate::rng::trial_seed;
use crate::solver::{count_qualifying, grid_covered, MitmSolver, Solver, SolverError, Target};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MonteCarloError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solver failed on trial {trial}: {source}")]
    Solver { trial: u64, source: SolverError },
}

pub type Result<T> = std::result::Result<T, MonteCarloError>;

/// What the per-trial solve aims at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TargetMode {
    /// One fixed target value.
    Fixed { z: f64 },
    /// Full coverage of the amplification grid.
    Grid,
}

/// One experiment binding: sizes, tolerance, target, distribution, trial
/// count, and the master seed everything derives from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub target: TargetMode,
    pub spec: DensitySpec,
    pub trials: u64,
    pub master_seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.n < 1 {
            return Err(MonteCarloError::Domain("n and k must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(MonteCarloError::Domain("need at least one trial".into()));
        }
        if self.epsilon < 0.0 {
            return Err(MonteCarloError::Domain(
                "epsilon must be nonnegative".into(),
            ));
        }
        self.spec
            .validate()
            .map_err(|e| MonteCarloError::Domain(e.to_string()))?;
        Ok(())
    }

    /// Whether the binding sits in the `k <= n/2` regime the theory states.
    pub fn in_theorem_regime(&self) -> bool {
        2 * self.k <= self.n
    }
}

/// Success counts with the Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub wilson_ci_95: (f64, f64),
}

impl SuccessEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        Self {
            successes,
            trials,
            p_hat,
            wilson_ci_95: wilson_interval(successes, trials, Z_95),
        }
    }
}

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval; well behaved at the p = 0 and p = 1 edges, which
/// the sweeps routinely hit.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Inverse standard normal CDF (Acklam's rational approximation, about
/// 1e-9 relative accuracy).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

/// Two-sided z for a confidence level.
pub fn z_for_confidence(confidence: f64) -> f64 {
    assert!(confidence > 0.0 && confidence < 1.0);
    inverse_normal_cdf(0.5 + confidence / 2.0)
}

fn run_trials(
    config: &TrialConfig,
    success: impl Fn(u64) -> std::result::Result<bool, SolverError> + Sync,
) -> Result<SuccessEstimate> {
    let outcomes: std::result::Result<Vec<bool>, MonteCarloError> = (0..config.trials)
        .into_par_iter()
        .map(|trial| success(trial).map_err(|source| MonteCarloError::Solver { trial, source }))
        .collect();
    let successes = outcomes?.into_iter().filter(|&s| s).count() as u64;
    Ok(SuccessEstimate::from_counts(successes, config.trials))
}

/// Probability that a fresh sample set admits a k-subset within epsilon of
/// the fixed target.
pub fn estimate_success(config: &TrialConfig) -> Result<SuccessEstimate> {
    config.validate()?;
    let z = match config.target {
        TargetMode::Fixed { z } => z,
        TargetMode::Grid => {
            return Err(MonteCarloError::Domain(
                "estimate_success needs a fixed target; use estimate_uniform_success".into(),
            ))
        }
    };
    let solver = MitmSolver::default();
    let target = Target::new(z, config.epsilon);
    run_trials(config, |trial| {
        let samples = sample(
            &config.spec,
            config.n,
            trial_seed(config.master_seed, trial),
        );
        Ok(solver.solve(&samples, config.k, &target)?.is_some())
    })
}

fn spec_contains_symmetric_uniform(spec: &DensitySpec) -> bool {
    match spec {
        DensitySpec::Uniform { lo, hi } => *lo == -1.0 && *hi == 1.0,
        DensitySpec::Mixture { uniform, .. } => uniform.lo == -1.0 && uniform.hi == 1.0,
        _ => false,
    }
}

/// Probability that a fresh sample set covers the whole amplification grid
/// (the all-targets event).
pub fn estimate_uniform_success(config: &TrialConfig) -> Result<SuccessEstimate> {
    config.validate()?;
    if !matches!(config.target, TargetMode::Grid) {
        return Err(MonteCarloError::Domain(
            "estimate_uniform_success needs target = grid".into(),
        ));
    }
    if !(config.epsilon > 0.0 && config.epsilon < 0.5) {
        return Err(MonteCarloError::Domain(format!(
            "the all-targets event needs epsilon in (0, 1/2), got {}",
            config.epsilon
        )));
    }
    if !spec_contains_symmetric_uniform(&config.spec) {
        return Err(MonteCarloError::Domain(
            "the all-targets event needs a Uniform[-1,1] component in the spec".into(),
        ));
    }
    let solver = MitmSolver::default();
    run_trials(config, |trial| {
        let samples = sample(
            &config.spec,
            config.n,
            trial_seed(config.master_seed, trial),
        );
        grid_covered(&samples, config.k, config.epsilon, &solver)
    })
}

/// One sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_times_h2: f64,
    pub seed: u64,
}

/// CSV header for sweep output.
pub const SWEEP_CSV_HEADER: &str = "n,k,epsilon,trials,p_hat,ci_lo,ci_hi,n_times_H2,seed";

impl SweepRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.epsilon,
            self.trials,
            self.p_hat,
            self.ci_lo,
            self.ci_hi,
            self.n_times_h2,
            self.seed
        )
    }
}

/// Success probability versus sample count, with interpolated crossings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Linear-interpolation estimate of where p crosses one half.
    pub n_crossing_50: Option<f64>,
    /// Linear-interpolation estimate of where p crosses 0.99.
    pub n_crossing_99: Option<f64>,
}

fn interpolate_crossing(rows: &[SweepRow], level: f64) -> Option<f64> {
    for w in rows.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.p_hat < level && b.p_hat >= level {
            let t = (level - a.p_hat) / (b.p_hat - a.p_hat);
            return Some(a.n as f64 + t * (b.n as f64 - a.n as f64));
        }
    }
    rows.first()
        .filter(|r| r.p_hat >= level)
        .map(|r| r.n as f64)
}

/// Estimate the fixed-target success probability across increasing sample
/// counts. Row i derives its seed as `trial_seed(master_seed, i)`.
pub fn phase_sweep(
    k: usize,
    epsilon: f64,
    n_values: &[usize],
    spec: &DensitySpec,
    trials: u64,
    master_seed: u64,
) -> Result<SweepResult> {
    if !n_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(MonteCarloError::Domain(
            "n values must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for (i, &n) in n_values.iter().enumerate() {
        let seed = trial_seed(master_seed, i as u64);
        let config = TrialConfig {
            n,
            k,
            epsilon,
            target: TargetMode::Fixed { z: 0.0 },
            spec: spec.clone(),
            trials,
            master_seed: seed,
        };
        let est = if n < k {
            // no size-k subset exists
            SuccessEstimate::from_counts(0, trials)
        } else {
            estimate_success(&config)?
        };
        rows.push(SweepRow {
            n,
            k,
            epsilon,
            trials,
            p_hat: est.p_hat,
            ci_lo: est.wilson_ci_95.0,
            ci_hi: est.wilson_ci_95.1,
            n_times_h2: if k <= n {
                entropy_scaled(n as u64, k as u64)
            } else {
                f64::NAN
            },
            seed,
        });
    }
    let n_crossing_50 = interpolate_crossing(&rows, 0.5);
    let n_crossing_99 = interpolate_crossing(&rows, 0.99);
    Ok(SweepResult {
        rows,
        n_crossing_50,
        n_crossing_99,
    })
}

/// Weighted isotonic regression (pool adjacent violators) of the sweep
/// probabilities, plus a chi-square statistic of the observed counts
/// against the fitted monotone curve.
pub fn isotonic_fit(rows: &[SweepRow]) -> (Vec<f64>, f64) {
    #[derive(Clone, Copy)]
    struct Block {
        weight: f64,
        mean: f64,
        len: usize,
    }
    let mut blocks: Vec<Block> = Vec::with_capacity(rows.len());
    for r in rows {
        blocks.push(Block {
            weight: r.trials as f64,
            mean: r.p_hat,
            len: 1,
        });
        while blocks.len() >= 2 {
            let b = blocks[blocks.len() - 1];
            let a = blocks[blocks.len() - 2];
            if a.mean <= b.mean {
                break;
            }
            let weight = a.weight + b.weight;
            let mean = (a.mean * a.weight + b.mean * b.weight) / weight;
            let len = a.len + b.len;
            blocks.truncate(blocks.len() - 2);
            blocks.push(Block { weight, mean, len });
        }
    }
    let mut fitted = Vec::with_capacity(rows.len());
    for b in &blocks {
        fitted.extend(std::iter::repeat(b.mean).take(b.len));
    }
    // chi-square of observed successes against the fitted probabilities,
    // skipping degenerate cells
    let mut chi2 = 0.0;
    for (r, &p) in rows.iter().zip(fitted.iter()) {
        if p <= 0.0 || p >= 1.0 {
            continue;
        }
        let t = r.trials as f64;
        let observed = r.p_hat * t;
        let expected = p * t;
        chi2 += (observed - expected) * (observed - expected) / (expected * (1.0 - p));
    }
    (fitted, chi2)
}

/// Chi-square quantile by the Wilson-Hilferty cube approximation.
pub fn chi_square_quantile(df: f64, p: f64) -> f64 {
    assert!(df > 0.0);
    let z = inverse_normal_cdf(p);
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Calibration evidence for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub k: u64,
    pub epsilon: f64,
    /// Smallest n meeting the acceptance rule, if the range sufficed.
    pub n_min: Option<u64>,
    /// `n H2(k/n) / log2^2(k/eps)` (all-targets) or `/ log2(k/eps)` (fixed).
    pub ratio: Option<f64>,
    pub estimate: Option<SuccessEstimate>,
}

/// Calibrated constants plus the per-point evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub constants: ConstantsConfig,
    pub amp_evidence: Vec<CalibrationPoint>,
    pub hyp_evidence: Vec<CalibrationPoint>,
    /// Grid points whose bisection range was exhausted.
    pub exhausted: Vec<(u64, f64)>,
}

/// Search cap for calibration bisection.
pub const CALIBRATION_N_CAP: usize = 128;

fn smallest_passing_n(
    k: u64,
    lo_floor: usize,
    accept: impl Fn(usize) -> Result<bool>,
) -> Result<Option<usize>> {
    // doubling bracket from the floor, then bisection on the (statistically)
    // monotone acceptance predicate
    let mut hi = lo_floor.max(k as usize + 1);
    let mut lo = k as usize; // below any admissible n
    loop {
        match accept(hi) {
            Ok(true) => break,
            Ok(false) => {
                lo = hi;
                hi *= 2;
                if hi > CALIBRATION_N_CAP {
                    return Ok(None);
                }
            }
            Err(MonteCarloError::Solver {
                source: SolverError::MemoryCap { .. },
                ..
            }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if mid <= k as usize {
            lo = mid;
            continue;
        }
        match accept(mid) {
            Ok(true) => hi = mid,
            Ok(false) => lo = mid,
            Err(MonteCarloError::Solver {
                source: SolverError::MemoryCap { .. },
                ..
            }) => lo = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(Some(hi))
}

/// Empirical stand-ins for the theory constants.
///
/// For each `(k, eps)` the all-targets pass finds, by bracketed bisection
/// over n, the smallest sample count whose Wilson lower bound (at the given
/// confidence) reaches `1 - eps`; the fixed-target pass does the same
/// against the `c_thm` success level. The constants are the worst-case
/// ratios of `n H2(k/n)` to the corresponding log thresholds.
pub fn calibrate_constants(
    grid: &[(u64, f64)],
    spec: &DensitySpec,
    trials: u64,
    confidence: f64,
    master_seed: u64,
) -> Result<CalibrationResult> {
    if grid.is_empty() {
        return Err(MonteCarloError::Domain(
            "calibration grid must be nonempty".into(),
        ));
    }
    let z = z_for_confidence(confidence);
    let defaults = ConstantsConfig::default();
    let mut amp_evidence = Vec::new();
    let mut hyp_evidence = Vec::new();
    let mut exhausted = Vec::new();
    let mut c_amp: f64 = 0.0;
    let mut c_hyp: f64 = 0.0;

    for (point, &(k, epsilon)) in grid.iter().enumerate() {
        // all-targets pass
        let base_seed = trial_seed(master_seed, point as u64);
        let estimate_at = |n: usize| -> Result<SuccessEstimate> {
            estimate_uniform_success(&TrialConfig {
                n,
                k: k as usize,
                epsilon,
                target: TargetMode::Grid,
                spec: spec.clone(),
                trials,
                master_seed: trial_seed(base_seed, n as u64),
            })
        };
        let accept = |n: usize| -> Result<bool> {
            let est = estimate_at(n)?;
            Ok(wilson_interval(est.successes, est.trials, z).0 >= 1.0 - epsilon)
        };
        match smallest_passing_n(k, 2 * k as usize, accept)? {
            Some(n_min) => {
                let log = (k as f64 / epsilon).log2();
                let ratio = entropy_scaled(n_min as u64, k) / (log * log);
                c_amp = c_amp.max(ratio);
                amp_evidence.push(CalibrationPoint {
                    k,
                    epsilon,
                    n_min: Some(n_min as u64),
                    ratio: Some(ratio),
                    estimate: Some(estimate_at(n_min)?),
                });
            }
            None => {
                exhausted.push((k, epsilon));
                amp_evidence.push(CalibrationPoint {
                    k,
                    epsilon,
                    n_min: None,
                    ratio: None,
                    estimate: None,
                });
            }
        }

        // fixed-target pass at the c_thm success level
        let hyp_seed = trial_seed(master_seed ^ 0x5EED_CA1B, point as u64);
        let estimate_fixed = |n: usize| -> Result<SuccessEstimate> {
            estimate_success(&TrialConfig {
                n,
                k: k as usize,
                epsilon,
                target: TargetMode::Fixed { z: 0.0 },
                spec: spec.clone(),
                trials,
                master_seed: trial_seed(hyp_seed, n as u64),
            })
        };
        let accept_fixed = |n: usize| -> Result<bool> {
            let est = estimate_fixed(n)?;
            Ok(wilson_interval(est.successes, est.trials, z).0 >= defaults.c_thm)
        };
        match smallest_passing_n(k, 2 * k as usize, accept_fixed)? {
            Some(n_min) => {
                let log = (k as f64 / epsilon).log2();
                let ratio = entropy_scaled(n_min as u64, k) / log;
                c_hyp = c_hyp.max(ratio);
                hyp_evidence.push(CalibrationPoint {
                    k,
                    epsilon,
                    n_min: Some(n_min as u64),
                    ratio: Some(ratio),
                    estimate: Some(estimate_fixed(n_min)?),
                });
            }
            None => {
                exhausted.push((k, epsilon));
                hyp_evidence.push(CalibrationPoint {
                    k,
                    epsilon,
                    n_min: None,
                    ratio: None,
                    estimate: None,
                });
            }
        }
    }

    let constants = ConstantsConfig {
        // the single-target hypothesis requires c_hyp >= 1; report at least that
        c_hyp: c_hyp.max(1.0),
        c_amp: if c_amp > 0.0 { c_amp } else { defaults.c_amp },
        c_thm: defaults.c_thm,
        p_mix: spec.mixture_weight().unwrap_or(1.0),
    };
    Ok(CalibrationResult {
        constants,
        amp_evidence,
        hyp_evidence,
        exhausted,
    })
}

/// Monte Carlo moments of the qualifying-subset count Y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentReport {
    pub mean_y: f64,
    pub mean_y2: f64,
    /// `(E Y)^2 / E Y^2`, 0 by convention when Y is identically 0.
    pub ratio: f64,
    pub p_hat_positive: f64,
    pub trials: u64,
    /// Delta-method standard error of the ratio.
    pub se_ratio: f64,
    pub se_p_hat: f64,
}

impl SecondMomentReport {
    /// The second-moment inequality direction, with statistical slack:
    /// `ratio <= Pr(Y > 0) + sigmas * combined standard error`.
    pub fn inequality_holds(&self, sigmas: f64) -> bool {
        let combined = (self.se_ratio * self.se_ratio + self.se_p_hat * self.se_p_hat).sqrt();
        self.ratio <= self.p_hat_positive + sigmas * combined
    }
}

/// Enumerate the count Y of qualifying k-subsets per trial and report the
/// moment ratio against the empirical positivity probability.
pub fn second_moment_diagnostic(config: &TrialConfig) -> Result<SecondMomentReport> {
    config.validate()?;
    let z = match config.target {
        TargetMode::Fixed { z } => z,
        TargetMode::Grid => {
            return Err(MonteCarloError::Domain(
                "the second-moment diagnostic needs a fixed target".into(),
            ))
        }
    };
    let target = Target::new(z, config.epsilon);
    let counts: std::result::Result<Vec<u64>, MonteCarloError> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let samples = sample(
                &config.spec,
                config.n,
                trial_seed(config.master_seed, trial),
            );
            count_qualifying(&samples, config.k, &target, 10_000_000)
                .map_err(|source| MonteCarloError::Solver { trial, source })
        })
        .collect();
    let counts = counts?;
    let t = counts.len() as f64;
    let mean_y = counts.iter().map(|&c| c as f64).sum::<f64>() / t;
    let mean_y2 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>() / t;
    let positives = counts.iter().filter(|&&c| c > 0).count() as f64;
    let p_hat_positive = positives / t;
    let ratio = if mean_y2 > 0.0 {
        mean_y * mean_y / mean_y2
    } else {
        0.0
    };

    // delta method for g(a, b) = a^2 / b at (mean Y, mean Y^2)
    let (se_ratio, se_p_hat) = if mean_y2 > 0.0 {
        let var_y = counts
            .iter()
            .map(|&c| (c as f64 - mean_y).powi(2))
            .sum::<f64>()
            / t;
        let var_y2 = counts
            .iter()
            .map(|&c| ((c as f64).powi(2) - mean_y2).powi(2))
            .sum::<f64>()
            / t;
        let cov = counts
            .iter()
            .map(|&c| (c as f64 - mean_y) * ((c as f64).powi(2) - mean_y2))
            .sum::<f64>()
            / t;
        let ga = 2.0 * mean_y / mean_y2;
        let gb = -(mean_y * mean_y) / (mean_y2 * mean_y2);
        let var_ratio = (ga * ga * var_y + gb * gb * var_y2 + 2.0 * ga * gb * cov) / t;
        (
            var_ratio.max(0.0).sqrt(),
            (p_hat_positive * (1.0 - p_hat_positive) / t).sqrt(),
        )
    } else {
        (0.0, 0.0)
    };

    Ok(SecondMomentReport {
        mean_y,
        mean_y2,
        ratio,
        p_hat_positive,
        trials: config.trials,
        se_ratio,
        se_p_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::coverage_infeasible;

    fn uniform_config(n: usize, k: usize, epsilon: f64, target: TargetMode) -> TrialConfig {
        TrialConfig {
            n,
            k,
            epsilon,
            target,
            spec: DensitySpec::uniform_symmetric(),
            trials: 200,
            master_seed: 0xA11CE,
        }
    }

    #[test]
    fn huge_tolerance_always_succeeds_and_zero_never() {
        let est =
            estimate_success(&uniform_config(10, 2, 100.0, TargetMode::Fixed { z: 0.0 })).unwrap();
        assert_eq!(est.p_hat, 1.0);

        let est =
            estimate_success(&uniform_config(10, 2, 0.0, TargetMode::Fixed { z: 0.0 })).unwrap();
        assert_eq!(est.p_hat, 0.0);
    }

    #[test]
    fn estimates_are_worker_count_independent() {
        let config = uniform_config(14, 3, 0.02, TargetMode::Fixed { z: 0.3 });
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap();
        let a = single.install(|| estimate_success(&config)).unwrap();
        let b = many.install(|| estimate_success(&config)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_success_never_exceeds_fixed_success() {
        // matched seeds: the all-targets event is included in the fixed one
        let mut grid_cfg = uniform_config(16, 2, 0.2, TargetMode::Grid);
        grid_cfg.trials = 100;
        let mut fixed_cfg = grid_cfg.clone();
        fixed_cfg.target = TargetMode::Fixed { z: 0.0 };
        let grid = estimate_uniform_success(&grid_cfg).unwrap();
        let fixed = estimate_success(&fixed_cfg).unwrap();
        assert!(
            grid.p_hat <= fixed.p_hat,
            "{} > {}",
            grid.p_hat,
            fixed.p_hat
        );
    }

    #[test]
    fn pigeonhole_configs_never_cover() {
        let config = uniform_config(6, 2, 0.01, TargetMode::Grid);
        assert!(coverage_infeasible(6, 2, 0.01));
        let est = estimate_uniform_success(&config).unwrap();
        assert_eq!(est.successes, 0);
        assert_eq!(est.p_hat, 0.0);
    }

    #[test]
    fn wilson_interval_edges_and_known_value() {
        let (lo, hi) = wilson_interval(0, 50, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.12);
        let (lo, hi) = wilson_interval(50, 50, Z_95);
        assert!(lo > 0.9 && lo < 1.0);
        assert_eq!(hi, 1.0);
        // s=40, n=50: standard Wilson gives about (0.669, 0.887)
        let (lo, hi) = wilson_interval(40, 50, Z_95);
        assert!((lo - 0.6688).abs() < 5e-3, "{lo}");
        assert!((hi - 0.8875).abs() < 5e-3, "{hi}");
    }

    #[test]
    fn inverse_normal_known_quantiles() {
        assert!((inverse_normal_cdf(0.975) - 1.959963984540054).abs() < 1e-7);
        assert!((inverse_normal_cdf(0.5)).abs() < 1e-12);
        assert!((inverse_normal_cdf(0.025) + 1.959963984540054).abs() < 1e-7);
        assert!((z_for_confidence(0.95) - Z_95).abs() < 1e-7);
    }

    #[test]
    fn sweep_rows_and_crossings() {
        let spec = DensitySpec::uniform_symmetric();
        let sweep = phase_sweep(2, 0.1, &[2, 4, 6, 8, 12, 16, 20], &spec, 300, 0x5EED).unwrap();
        assert_eq!(sweep.rows.len(), 7);
        // endpoints: sparse then saturated
        assert!(sweep.rows[0].p_hat < 0.9);
        assert!(sweep.rows.last().unwrap().p_hat > 0.9);
        assert!(sweep.n_crossing_50.is_some());
        // isotonic fit explains the data at the 99% level
        let (fitted, chi2) = isotonic_fit(&sweep.rows);
        assert!(fitted.windows(2).all(|w| w[0] <= w[1]));
        let df = sweep.rows.len() as f64;
        assert!(chi2 <= chi_square_quantile(df, 0.99), "chi2 {chi2}");
    }

    #[test]
    fn sweep_requires_increasing_n() {
        let spec = DensitySpec::uniform_symmetric();
        assert!(phase_sweep(2, 0.1, &[4, 4], &spec, 10, 0).is_err());
        // n < k rows report p = 0
        let sweep = phase_sweep(3, 0.2, &[2, 3, 8], &spec, 50, 1).unwrap();
        assert_eq!(sweep.rows[0].p_hat, 0.0);
    }

    #[test]
    fn second_moment_degenerate_cases() {
        // tolerance so large that every subset qualifies: Y = C(n,k), ratio 1
        let mut config = uniform_config(8, 2, 50.0, TargetMode::Fixed { z: 0.0 });
        config.trials = 50;
        let report = second_moment_diagnostic(&config).unwrap();
        assert_eq!(report.mean_y, 28.0); // C(8,2)
        assert!((report.ratio - 1.0).abs() < 1e-12);
        assert_eq!(report.p_hat_positive, 1.0);
        assert!(report.inequality_holds(3.0));

        config.epsilon = 0.0;
        let report = second_moment_diagnostic(&config).unwrap();
        assert_eq!(report.ratio, 0.0);
        assert_eq!(report.p_hat_positive, 0.0);
    }

    #[test]
    fn second_moment_inequality_direction() {
        let mut config = uniform_config(12, 3, 0.05, TargetMode::Fixed { z: 0.0 });
        config.trials = 2000;
        let report = second_moment_diagnostic(&config).unwrap();
        assert!(report.p_hat_positive > 0.0 && report.p_hat_positive < 1.0);
        assert!(
            report.inequality_holds(3.0),
            "ratio {} vs p {}",
            report.ratio,
            report.p_hat_positive
        );
    }

    #[test]
    fn calibration_single_point_and_growth() {
        let spec = DensitySpec::uniform_symmetric();
        // degenerate grid: the constant is the single ratio
        let single = calibrate_constants(&[(2, 0.1)], &spec, 120, 0.95, 7).unwrap();
        assert!(
            single.exhausted.is_empty(),
            "range exhausted: {:?}",
            single.exhausted
        );
        let pt = &single.amp_evidence[0];
        let log = (2.0f64 / 0.1).log2();
        let expect = entropy_scaled(pt.n_min.unwrap(), 2) / (log * log);
        assert!((single.constants.c_amp - expect).abs() < 1e-12);

        // a larger grid can only raise the max
        let bigger = calibrate_constants(&[(2, 0.1), (4, 0.1)], &spec, 120, 0.95, 7).unwrap();
        assert!(bigger.constants.c_amp >= single.constants.c_amp);
    }

    #[test]
    fn theorem_regime_flagging() {
        assert!(uniform_config(10, 5, 0.1, TargetMode::Grid).in_theorem_regime());
        assert!(!uniform_config(10, 6, 0.1, TargetMode::Grid).in_theorem_regime());
    }
}
