//! Resolved command configurations and their run functions.
//!
//! Each file-writing command owns a serializable config struct; the config
//! embeds everything the run needs (including instance/network payloads),
//! so a recorded manifest replays without consulting any other file.

use crate::manifest::{OutputWriter, RunManifest};
use rfss_core::bounds::{self, BoundError, ConstantsConfig, CURVE_CSV_HEADER};
use rfss_core::densities::{
    product_mixture_domination_check, sum_bounded_check, unimodality_check, DensityError,
    DensitySpec, DominationReport, Interval, SUM_DENSITY_CSV_HEADER,
};
use rfss_core::montecarlo::{
    calibrate_constants, isotonic_fit, phase_sweep, second_moment_diagnostic, MonteCarloError,
    TargetMode, TrialConfig, SWEEP_CSV_HEADER,
};
use rfss_core::rng::trial_seed;
use rfss_core::slth::{
    build_overparam, prune_network, DenseNet, MaskFile, NetworkFile, PruneReport, PruneSettings,
    SlthError, PRUNE_CSV_HEADER,
};
use rfss_core::solver::{solver_by_name, InstanceFile, SolutionFile, SolverError};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum CliError {
    /// exit 2
    Usage(String),
    /// exit 3
    Domain(String),
    /// exit 4
    SolverCap(String),
    /// exit 5
    Construction(String),
    /// exit 1
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::SolverCap(_) => 4,
            CliError::Construction(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::SolverCap(m) => write!(f, "{m}"),
            CliError::Construction(m) => write!(f, "construction failed: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::EnumerationCap { .. } | SolverError::MemoryCap { .. } => {
                CliError::SolverCap(e.to_string())
            }
            SolverError::Contract(_) => CliError::Domain(e.to_string()),
        }
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::Domain(_) => CliError::Domain(e.to_string()),
            MonteCarloError::Solver { ref source, .. } => match source {
                SolverError::Contract(_) => CliError::Domain(e.to_string()),
                _ => CliError::SolverCap(e.to_string()),
            },
        }
    }
}

impl From<SlthError> for CliError {
    fn from(e: SlthError) -> Self {
        match e {
            SlthError::NoQualifyingSubset { .. }
            | SlthError::GroupFailed { .. }
            | SlthError::PowerIteration(_) => CliError::Construction(e.to_string()),
            SlthError::Solver(s) => s.into(),
            SlthError::Shape(_) | SlthError::Bound(_) => CliError::Domain(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Mixture shorthand used by the stochastic commands: weight p on
/// Uniform[-1,1], remainder on the product law. No flag means pure uniform.
pub fn spec_from_mix(mix_p: Option<f64>) -> Result<DensitySpec> {
    let spec = match mix_p {
        None => DensitySpec::uniform_symmetric(),
        Some(p) => DensitySpec::Mixture {
            p,
            uniform: Interval { lo: -1.0, hi: 1.0 },
            other: Box::new(DensitySpec::ProductUniform),
        },
    };
    spec.validate()?;
    Ok(spec)
}

/// Inclusive `start:end:step` integer range.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "range '{s}' must be start:end:step"
        )));
    }
    let start: usize = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad range '{s}'")))?;
    let end: usize = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad range '{s}'")))?;
    let step: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad range '{s}'")))?;
    if step == 0 || end < start {
        return Err(CliError::Usage(format!("range '{s}' must move forward")));
    }
    Ok((start..=end).step_by(step).collect())
}

/// `k:eps,k:eps,...` calibration grid.
pub fn parse_grid(s: &str) -> Result<Vec<(u64, f64)>> {
    s.split(',')
        .map(|pair| {
            let (k, eps) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("grid entry '{pair}' must be k:eps")))?;
            let k = k
                .parse()
                .map_err(|_| CliError::Usage(format!("bad k in '{pair}'")))?;
            let eps = eps
                .parse()
                .map_err(|_| CliError::Usage(format!("bad eps in '{pair}'")))?;
            Ok((k, eps))
        })
        .collect()
}

/// `lo:hi:steps` linear grid of floats.
pub fn parse_float_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("grid '{s}' must be lo:hi:steps")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid '{s}'")))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid '{s}'")))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid '{s}'")))?;
    if steps < 2 || !(hi > lo) {
        return Err(CliError::Usage(format!(
            "grid '{s}' needs hi > lo and steps >= 2"
        )));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// `w0,w1,...` layer widths.
pub fn parse_widths(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|w| {
            w.parse()
                .map_err(|_| CliError::Usage(format!("bad width '{w}'")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// curve

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveConfig {
    pub m_target: u64,
    pub epsilon: f64,
    pub gamma_grid: Vec<f64>,
    pub c_amp: f64,
}

pub fn run_curve(cfg: &CurveConfig, mut w: OutputWriter) -> Result<RunManifest> {
    let constants = ConstantsConfig {
        c_amp: cfg.c_amp,
        ..Default::default()
    };
    let points = bounds::overparam_curve(cfg.m_target, cfg.epsilon, &cfg.gamma_grid, &constants)?;
    let mut csv = String::from(CURVE_CSV_HEADER);
    csv.push('\n');
    for p in &points {
        csv.push_str(&format!(
            "{},{},{}\n",
            p.gamma, p.overparameterization, p.regime_label
        ));
    }
    w.write("curve.csv", &csv)?;
    Ok(w.finish("curve", cfg, None)?)
}

// ---------------------------------------------------------------------------
// solve

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveConfig {
    pub instance: InstanceFile,
    pub solver: String,
    pub seed: Option<u64>,
}

/// The solution record, extended with the boundary flag; the file holds
/// `null` when no subset qualified.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolveOutput {
    #[serde(flatten)]
    pub solution: SolutionFile,
    /// Residual within 8 ulps of the tolerance boundary.
    pub near_boundary: bool,
}

pub fn run_solve(cfg: &SolveConfig, mut w: OutputWriter) -> Result<RunManifest> {
    if cfg.solver == "heuristic" && cfg.seed.is_none() {
        return Err(CliError::Usage("the heuristic solver needs --seed".into()));
    }
    let solver = solver_by_name(&cfg.solver, cfg.seed.unwrap_or(0))
        .ok_or_else(|| CliError::Usage(format!("unknown solver '{}'", cfg.solver)))?;
    let samples = cfg.instance.sample_set();
    let target = cfg.instance.target();
    let solution = solver.solve(&samples, cfg.instance.k, &target)?;
    let output = solution.as_ref().map(|s| SolveOutput {
        solution: SolutionFile::new(s, solver.as_ref()),
        near_boundary: rfss_core::solver::near_boundary(s.residual, target.epsilon),
    });
    match &output {
        Some(o) => println!(
            "found indices {:?} residual {:?}",
            o.solution.indices, o.solution.residual
        ),
        None => println!(
            "no qualifying subset ({})",
            if solver.is_exact() {
                "proof"
            } else {
                "search exhausted"
            }
        ),
    }
    w.write_json("solution.json", &output)?;
    Ok(w.finish("solve", cfg, cfg.seed)?)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k: usize,
    pub epsilon: f64,
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub mix_p: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SweepSummary {
    n_crossing_50: Option<f64>,
    n_crossing_99: Option<f64>,
    isotonic_chi2: f64,
}

pub fn run_sweep(cfg: &SweepConfig, mut w: OutputWriter) -> Result<RunManifest> {
    let spec = spec_from_mix(cfg.mix_p)?;
    let sweep = phase_sweep(
        cfg.k,
        cfg.epsilon,
        &cfg.n_values,
        &spec,
        cfg.trials,
        cfg.seed,
    )?;
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for row in &sweep.rows {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }
    w.write("sweep.csv", &csv)?;
    let (_, chi2) = isotonic_fit(&sweep.rows);
    w.write_json(
        "sweep_summary.json",
        &SweepSummary {
            n_crossing_50: sweep.n_crossing_50,
            n_crossing_99: sweep.n_crossing_99,
            isotonic_chi2: chi2,
        },
    )?;
    println!(
        "sweep wrote {} rows; crossings: 50% at {:?}, 99% at {:?}",
        sweep.rows.len(),
        sweep.n_crossing_50,
        sweep.n_crossing_99
    );
    Ok(w.finish("sweep", cfg, Some(cfg.seed))?)
}

// ---------------------------------------------------------------------------
// density

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityConfig {
    pub n_max: u32,
    pub resolution: u32,
    pub domination_grid: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct DensitySummary {
    c_l_hat: f64,
    c_u_hat: f64,
    unimodal_all: bool,
    domination: DominationReport,
}

pub fn run_density(cfg: &DensityConfig, mut w: OutputWriter) -> Result<RunManifest> {
    let report = sum_bounded_check(cfg.n_max, cfg.resolution);
    let mut csv = String::from(SUM_DENSITY_CSV_HEADER);
    csv.push('\n');
    for table in &report.tables {
        for row in table.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
    }
    w.write("density.csv", &csv)?;
    let unimodal_all = (1..=cfg.n_max).all(|n| unimodality_check(n, cfg.resolution));
    let domination = product_mixture_domination_check(cfg.domination_grid);
    let summary = DensitySummary {
        c_l_hat: report.c_l_hat,
        c_u_hat: report.c_u_hat,
        unimodal_all,
        domination,
    };
    w.write_json("density_summary.json", &summary)?;
    println!(
        "scaled envelope over n <= {}: lower {:?}, upper {:?}; unimodal: {}; domination margin {:?}",
        cfg.n_max, report.c_l_hat, report.c_u_hat, unimodal_all, domination.min_margin
    );
    Ok(w.finish("density", cfg, None)?)
}

// ---------------------------------------------------------------------------
// prune

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneConfig {
    pub target: NetworkFile,
    pub epsilon: f64,
    pub gamma_prime: f64,
    pub seed: u64,
    pub solver: String,
    pub budget: u64,
    pub retries: u64,
    pub verify_inputs: usize,
    pub c_amp: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PruneRunOutput {
    pub attempts: u64,
    pub report: PruneReport,
}

pub fn run_prune(cfg: &PruneConfig, mut w: OutputWriter) -> Result<RunManifest> {
    let target: DenseNet = cfg.target.to_net()?;
    let constants = ConstantsConfig {
        c_amp: cfg.c_amp,
        ..Default::default()
    };
    let settings = PruneSettings {
        solver: cfg.solver.clone(),
        heuristic_budget: cfg.budget,
        verify_inputs: cfg.verify_inputs,
    };
    let mut attempt = 0u64;
    let (mask, report, overparam) = loop {
        let over = build_overparam(
            target.layer_widths(),
            cfg.epsilon,
            cfg.gamma_prime,
            &constants,
            trial_seed(cfg.seed, 2 * attempt),
        )?;
        match prune_network(
            &over,
            &target,
            cfg.epsilon,
            cfg.gamma_prime,
            &settings,
            trial_seed(cfg.seed, 2 * attempt + 1),
        ) {
            Ok((mask, report)) => break (mask, report, over),
            Err(e @ (SlthError::NoQualifyingSubset { .. } | SlthError::GroupFailed { .. }))
                if attempt < cfg.retries =>
            {
                eprintln!("attempt {attempt} failed ({e}); resampling");
                attempt += 1;
            }
            Err(e) => return Err(e.into()),
        }
    };
    let pruned = mask.apply(overparam.net()).map_err(CliError::from)?;
    w.write_json("target.json", &cfg.target)?;
    w.write_json(
        "overparam.json",
        &NetworkFile::from_net(overparam.net(), overparam.seed()),
    )?;
    w.write_json("pruned.json", &NetworkFile::from_net(&pruned, cfg.seed))?;
    w.write_json("mask.json", &MaskFile::from_mask(&mask))?;
    w.write_json(
        "report.json",
        &PruneRunOutput {
            attempts: attempt + 1,
            report: report.clone(),
        },
    )?;
    let mut csv = String::from(PRUNE_CSV_HEADER);
    csv.push('\n');
    csv.push_str(&report.csv_row());
    csv.push('\n');
    w.write("report.csv", &csv)?;
    println!(
        "pruned to density {:?} (budget gamma {:?} + slack {:?}); sampled max error {:?} (target {:?})",
        report.density_overall,
        report.budget.gamma,
        report.rounding_slack,
        report.epsilon_achieved_estimate,
        report.epsilon_target
    );
    Ok(w.finish("prune", cfg, Some(cfg.seed))?)
}

// ---------------------------------------------------------------------------
// calibrate

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrateConfig {
    pub grid: Vec<(u64, f64)>,
    pub trials: u64,
    pub confidence: f64,
    pub seed: u64,
    pub mix_p: Option<f64>,
}

pub fn run_calibrate(cfg: &CalibrateConfig, mut w: OutputWriter) -> Result<RunManifest> {
    let spec = spec_from_mix(cfg.mix_p)?;
    let result = calibrate_constants(&cfg.grid, &spec, cfg.trials, cfg.confidence, cfg.seed)?;
    w.write_json("calibration.json", &result)?;
    let mut csv = String::from("pass,k,epsilon,n_min,ratio,p_hat\n");
    for (pass, points) in [("amp", &result.amp_evidence), ("hyp", &result.hyp_evidence)] {
        for p in points {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                pass,
                p.k,
                p.epsilon,
                p.n_min.map_or(String::from(""), |v| v.to_string()),
                p.ratio.map_or(String::from(""), |v| format!("{v}")),
                p.estimate
                    .map_or(String::from(""), |e| format!("{}", e.p_hat)),
            ));
        }
    }
    w.write("evidence.csv", &csv)?;
    println!(
        "calibrated c_amp {:?}, c_hyp {:?} ({} exhausted grid points)",
        result.constants.c_amp,
        result.constants.c_hyp,
        result.exhausted.len()
    );
    Ok(w.finish("calibrate", cfg, Some(cfg.seed))?)
}

// ---------------------------------------------------------------------------
// diagnose

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnoseConfig {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub z: f64,
    pub trials: u64,
    pub seed: u64,
}

pub fn run_diagnose(cfg: &DiagnoseConfig, mut w: OutputWriter) -> Result<RunManifest> {
    let report = second_moment_diagnostic(&TrialConfig {
        n: cfg.n,
        k: cfg.k,
        epsilon: cfg.epsilon,
        target: TargetMode::Fixed { z: cfg.z },
        spec: DensitySpec::uniform_symmetric(),
        trials: cfg.trials,
        master_seed: cfg.seed,
    })?;
    w.write_json("second_moment.json", &report)?;
    println!(
        "mean Y {:?}, ratio {:?}, Pr(Y>0) {:?}; inequality holds: {}",
        report.mean_y,
        report.ratio,
        report.p_hat_positive,
        report.inequality_holds(3.0)
    );
    Ok(w.finish("diagnose", cfg, Some(cfg.seed))?)
}

// ---------------------------------------------------------------------------
// manifest replay

pub fn rerun(manifest: &RunManifest, w: OutputWriter) -> Result<RunManifest> {
    match manifest.command.as_str() {
        "curve" => run_curve(&serde_json::from_value(manifest.config.clone())?, w),
        "solve" => run_solve(&serde_json::from_value(manifest.config.clone())?, w),
        "sweep" => run_sweep(&serde_json::from_value(manifest.config.clone())?, w),
        "density" => run_density(&serde_json::from_value(manifest.config.clone())?, w),
        "prune" => run_prune(&serde_json::from_value(manifest.config.clone())?, w),
        "calibrate" => run_calibrate(&serde_json::from_value(manifest.config.clone())?, w),
        "diagnose" => run_diagnose(&serde_json::from_value(manifest.config.clone())?, w),
        other => Err(CliError::Usage(format!(
            "manifest has unknown command '{other}'"
        ))),
    }
}
