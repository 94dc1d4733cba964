//! Randomized greedy construction with one-in-one-out swap local search.
//!
//! Sound but incomplete: any returned subset passes the canonical residual
//! check, while absence proves nothing. Restarts and swaps share one move
//! budget.

use super::{check_k, SolverError, SubsetSolution, Target};
use crate::densities::SampleSet;
use crate::rng::{mix64, SplitMix64};
use crate::solver::{subset_sum, Solver};

pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct HeuristicSolver {
    /// Total moves (constructions plus swaps) before giving up.
    pub budget: u64,
    pub seed: u64,
}

impl HeuristicSolver {
    pub fn new(budget: u64, seed: u64) -> Self {
        assert!(budget >= 1, "budget must be at least 1");
        Self { budget, seed }
    }
}

struct SearchState {
    selected: Vec<usize>,
    in_set: Vec<bool>,
    running_sum: f64,
}

impl SearchState {
    fn canonical(&self, values: &[f64], z: f64) -> (f64, Vec<usize>) {
        let mut indices = self.selected.clone();
        indices.sort_unstable();
        let sum = subset_sum(values, &indices);
        ((sum - z).abs(), indices)
    }
}

/// Greedy construction: a random first pick, then each slot takes the value
/// steering the partial sum toward the proportional schedule `z * t / k`.
fn greedy_construct(values: &[f64], k: usize, z: f64, rng: &mut SplitMix64) -> SearchState {
    let n = values.len();
    let mut in_set = vec![false; n];
    let first = rng.next_below(n as u64) as usize;
    in_set[first] = true;
    let mut selected = vec![first];
    let mut running_sum = values[first];
    for t in 1..k {
        let goal = z * (t + 1) as f64 / k as f64;
        let mut best_j = usize::MAX;
        let mut best_dist = f64::INFINITY;
        for (j, &v) in values.iter().enumerate() {
            if in_set[j] {
                continue;
            }
            let dist = (running_sum + v - goal).abs();
            if dist < best_dist {
                best_dist = dist;
                best_j = j;
            }
        }
        in_set[best_j] = true;
        selected.push(best_j);
        running_sum += values[best_j];
    }
    SearchState {
        selected,
        in_set,
        running_sum,
    }
}

impl Solver for HeuristicSolver {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn solve(
        &self,
        samples: &SampleSet,
        k: usize,
        target: &Target,
    ) -> Result<Option<SubsetSolution>, SolverError> {
        let values = samples.values();
        let n = values.len();
        if !check_k(k, n)? {
            return Ok(None);
        }
        // Stream derived from (solver seed, sample seed, k): deterministic
        // per configuration, distinct across trials that vary any of them.
        let mut rng = SplitMix64::new(mix64(
            self.seed ^ mix64(samples.seed().wrapping_add(k as u64)),
        ));
        let mut moves_left = self.budget;

        loop {
            if moves_left == 0 {
                return Ok(None);
            }
            moves_left -= 1; // construction counts as a move
            let mut state = greedy_construct(values, k, target.z, &mut rng);
            let (mut cur_abs, indices) = state.canonical(values, target.z);
            if cur_abs < target.epsilon {
                return Ok(Some(SubsetSolution::from_indices(
                    values, indices, target.z,
                )));
            }

            // best-improvement swaps until a local minimum or budget end
            loop {
                if moves_left == 0 {
                    return Ok(None);
                }
                moves_left -= 1;
                let mut best: Option<(usize, usize, f64)> = None;
                for (slot, &out) in state.selected.iter().enumerate() {
                    let without = state.running_sum - values[out];
                    for (j, &v) in values.iter().enumerate() {
                        if state.in_set[j] {
                            continue;
                        }
                        let dist = (without + v - target.z).abs();
                        if best.map_or(true, |(_, _, d)| dist < d) {
                            best = Some((slot, j, dist));
                        }
                    }
                }
                match best {
                    Some((slot, j, dist)) if dist < cur_abs => {
                        let out = state.selected[slot];
                        state.in_set[out] = false;
                        state.in_set[j] = true;
                        state.selected[slot] = j;
                        let (abs, indices) = state.canonical(values, target.z);
                        state.running_sum = subset_sum(values, &indices);
                        cur_abs = abs;
                        if cur_abs < target.epsilon {
                            return Ok(Some(SubsetSolution::from_indices(
                                values, indices, target.z,
                            )));
                        }
                    }
                    _ => break, // local minimum; restart
                }
            }
        }
    }
}
