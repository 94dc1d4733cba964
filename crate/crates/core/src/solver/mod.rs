//! Fixed-size subset-sum strategies behind a common trait.
//!
//! Three interchangeable strategies are registered by name: `bruteforce`
//! (exhaustive, the reference oracle), `mitm` (exact meet-in-the-middle),
//! and `heuristic` (randomized greedy plus swap local search; sound but
//! incomplete). Exact strategies share one canonical contract so their
//! outputs are bit-identical: the returned subset minimizes the canonical
//! residual, ties break toward the lexicographically smallest sorted index
//! sequence, and every candidate is judged by the same pairwise-tree sum.

mod bruteforce;
mod heuristic;
mod mitm;

pub use bruteforce::{count_qualifying, BruteForceSolver};
pub use heuristic::HeuristicSolver;
pub use mitm::MitmSolver;

use crate::densities::{DensitySpec, SampleSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("enumeration cap exceeded: C(n,k) = {combinations} > {cap}")]
    EnumerationCap { combinations: u128, cap: u64 },
    #[error("memory cap exceeded: half enumerations need {entries} entries > {cap}")]
    MemoryCap { entries: u128, cap: u64 },
    #[error("contract violation: {0}")]
    Contract(String),
}

/// A target value with its approximation tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub z: f64,
    pub epsilon: f64,
}

impl Target {
    pub fn new(z: f64, epsilon: f64) -> Self {
        assert!(epsilon >= 0.0, "tolerance must be nonnegative");
        assert!(z.is_finite());
        Self { z, epsilon }
    }

    /// Whether the target sits in the `|z| <= sqrt(k)` range the theory
    /// covers. Informational only; solvers accept any finite target.
    pub fn in_theory_range(&self, k: usize) -> bool {
        self.z.abs() <= (k as f64).sqrt()
    }
}

/// A qualifying subset: exactly k sorted distinct indices, the canonical
/// sum of the indexed values, and the signed residual against the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSolution {
    pub indices: Vec<usize>,
    pub achieved_sum: f64,
    pub residual: f64,
}

impl SubsetSolution {
    pub(crate) fn from_indices(values: &[f64], mut indices: Vec<usize>, z: f64) -> Self {
        indices.sort_unstable();
        let achieved_sum = subset_sum(values, &indices);
        Self {
            indices,
            achieved_sum,
            residual: achieved_sum - z,
        }
    }
}

/// Pairwise (tree) reduction: halves split at `len/2`, descending to runs
/// of at most 4 summed left to right. This exact shape is the canonical
/// summation for every residual comparison in the crate.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 4 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Canonical sum of the values at `indices` (assumed sorted).
pub fn subset_sum(values: &[f64], indices: &[usize]) -> f64 {
    let gathered: Vec<f64> = indices.iter().map(|&i| values[i]).collect();
    pairwise_sum(&gathered)
}

/// Number of residuals within 8 units in the last place of the tolerance
/// boundary; reports flag these because the strict-inequality acceptance is
/// reproducibility-sensitive there.
pub fn near_boundary(residual: f64, epsilon: f64) -> bool {
    let gap = (residual.abs() - epsilon).abs();
    gap <= 8.0 * f64::EPSILON * epsilon.max(residual.abs())
}

/// A subset-sum strategy. Implementations must be pure given their
/// configuration and inputs.
pub trait Solver: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    /// Whether absence of a solution proves nonexistence.
    fn is_exact(&self) -> bool;

    /// Best qualifying subset of exactly `k` indices, or `None`.
    fn solve(
        &self,
        samples: &SampleSet,
        k: usize,
        target: &Target,
    ) -> Result<Option<SubsetSolution>, SolverError>;

    /// Solve a batch of targets over one sample set. The default maps
    /// `solve` in parallel; strategies with shareable preprocessing
    /// override this.
    fn solve_many(
        &self,
        samples: &SampleSet,
        k: usize,
        targets: &[Target],
    ) -> Result<Vec<Option<SubsetSolution>>, SolverError> {
        targets
            .par_iter()
            .map(|t| self.solve(samples, k, t))
            .collect()
    }

    /// Whether every target in the batch admits a solution; stops at the
    /// first miss.
    fn covers_all(
        &self,
        samples: &SampleSet,
        k: usize,
        targets: &[Target],
    ) -> Result<bool, SolverError> {
        for t in targets {
            if self.solve(samples, k, t)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Names of the registered strategies, in registry order.
pub fn solver_names() -> Vec<&'static str> {
    vec!["bruteforce", "mitm", "heuristic"]
}

/// Instantiate every registered strategy with default configuration.
pub fn default_registry(seed: u64) -> Vec<Box<dyn Solver>> {
    vec![
        Box::new(BruteForceSolver::default()),
        Box::new(MitmSolver::default()),
        Box::new(HeuristicSolver::new(heuristic::DEFAULT_BUDGET, seed)),
    ]
}

/// Look a strategy up by registry name. The seed only matters for the
/// randomized strategy.
pub fn solver_by_name(name: &str, seed: u64) -> Option<Box<dyn Solver>> {
    match name {
        "bruteforce" => Some(Box::new(BruteForceSolver::default())),
        "mitm" => Some(Box::new(MitmSolver::default())),
        "heuristic" => Some(Box::new(HeuristicSolver::new(
            heuristic::DEFAULT_BUDGET,
            seed,
        ))),
        _ => None,
    }
}

/// Shared precondition handling: `Err` for k = 0, `Ok(false)` when no
/// size-k subset can exist.
fn check_k(k: usize, n: usize) -> Result<bool, SolverError> {
    if k == 0 {
        return Err(SolverError::Contract(
            "subset size k must be at least 1".into(),
        ));
    }
    Ok(k <= n)
}

/// Result of solving the amplification grid of targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetGridResult {
    /// Grid targets `-sqrt(k) + i * eps'`, `eps' = eps / 2`.
    pub grid: Vec<f64>,
    pub epsilon_prime: f64,
    pub solutions: Vec<Option<SubsetSolution>>,
    /// Indices of grid points with no qualifying subset.
    pub uncovered: Vec<usize>,
}

impl TargetGridResult {
    pub fn fully_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// The amplification grid for tolerance `eps`: targets spaced `eps' = eps/2`
/// from `-sqrt(k)` to at least `sqrt(k)`. Covering every grid point at
/// tolerance `eps'` certifies every `z` in `[-sqrt(k), sqrt(k)]` at
/// tolerance `eps`.
pub fn amplification_grid(k: usize, epsilon: f64) -> (Vec<f64>, f64) {
    let eps_prime = epsilon / 2.0;
    let sqrt_k = (k as f64).sqrt();
    let steps = (2.0 * sqrt_k / eps_prime).ceil() as usize;
    let grid = (0..=steps)
        .map(|i| -sqrt_k + i as f64 * eps_prime)
        .collect();
    (grid, eps_prime)
}

/// Solve every target on the amplification grid at tolerance `eps' = eps/2`
/// and report coverage. Targets are solved independently and merged by grid
/// index, so the result is identical for any worker count.
pub fn solve_all_targets(
    samples: &SampleSet,
    k: usize,
    epsilon: f64,
    solver: &dyn Solver,
) -> Result<TargetGridResult, SolverError> {
    assert!(
        epsilon > 0.0 && epsilon < 0.5,
        "the all-targets variant needs epsilon in (0, 1/2)"
    );
    let (grid, epsilon_prime) = amplification_grid(k, epsilon);
    let targets: Vec<Target> = grid
        .iter()
        .map(|&z| Target::new(z, epsilon_prime))
        .collect();
    let solutions = solver.solve_many(samples, k, &targets)?;
    let uncovered = solutions
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.is_none().then_some(i))
        .collect();
    Ok(TargetGridResult {
        grid,
        epsilon_prime,
        solutions,
        uncovered,
    })
}

/// Early-exit coverage check for the amplification grid.
pub fn grid_covered(
    samples: &SampleSet,
    k: usize,
    epsilon: f64,
    solver: &dyn Solver,
) -> Result<bool, SolverError> {
    assert!(
        epsilon > 0.0 && epsilon < 0.5,
        "the all-targets variant needs epsilon in (0, 1/2)"
    );
    let (grid, epsilon_prime) = amplification_grid(k, epsilon);
    let targets: Vec<Target> = grid
        .iter()
        .map(|&z| Target::new(z, epsilon_prime))
        .collect();
    solver.covers_all(samples, k, &targets)
}

/// On-disk instance format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub values: Vec<f64>,
    pub k: usize,
    pub z: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub spec: DensitySpec,
}

impl InstanceFile {
    pub fn sample_set(&self) -> SampleSet {
        SampleSet::from_values(self.values.clone(), self.spec.clone(), self.seed)
    }

    pub fn target(&self) -> Target {
        Target::new(self.z, self.epsilon)
    }
}

/// On-disk solution format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub indices: Vec<usize>,
    pub achieved_sum: f64,
    pub residual: f64,
    pub solver: String,
    pub exact: bool,
}

impl SolutionFile {
    pub fn new(solution: &SubsetSolution, solver: &dyn Solver) -> Self {
        Self {
            indices: solution.indices.clone(),
            achieved_sum: solution.achieved_sum,
            residual: solution.residual,
            solver: solver.name().to_string(),
            exact: solver.is_exact(),
        }
    }
}

/// Candidate ordering shared by the exact strategies: smaller canonical
/// absolute residual first, then lexicographically smaller index sequence.
pub(crate) fn candidate_improves(
    best: &Option<SubsetSolution>,
    abs_res: f64,
    indices: &[usize],
) -> bool {
    match best {
        None => true,
        Some(b) => {
            let best_abs = b.residual.abs();
            abs_res < best_abs || (abs_res == best_abs && indices < b.indices.as_slice())
        }
    }
}
