//! Exact meet-in-the-middle over a fixed split.
//!
//! Indices split at n/2; for every admissible left size j the strategy
//! enumerates size-j subsets of the left half and size-(k-j) subsets of the
//! right half, sorts the right sums, and binary-searches complements. The
//! index depends only on (samples, k), so one build serves any number of
//! targets.
//!
//! Residuals are re-judged with the canonical pairwise sum before a
//! candidate is accepted, and the search window around the insertion point
//! carries an ulp-scale slack, so results are bit-identical to the
//! exhaustive oracle including tie-breaks.

use super::{candidate_improves, check_k, SolverError, SubsetSolution, Target};
use crate::densities::SampleSet;
use crate::solver::{subset_sum, Solver};
use rayon::prelude::*;

pub const DEFAULT_ENTRY_CAP: u64 = 20_000_000;

#[derive(Debug, Clone)]
pub struct MitmSolver {
    /// Largest total number of half-subset entries the index may hold.
    pub max_entries: u64,
}

impl Default for MitmSolver {
    fn default() -> Self {
        Self {
            max_entries: DEFAULT_ENTRY_CAP,
        }
    }
}

#[derive(Clone, Copy)]
struct HalfEntry {
    sum: f64,
    mask: u64,
}

struct JoinLayer {
    left: Vec<HalfEntry>,
    /// sorted by sum
    right: Vec<HalfEntry>,
}

/// Reusable two-table index for one `(samples, k)` pair.
pub struct MitmIndex<'a> {
    values: &'a [f64],
    n_left: usize,
    k: usize,
    layers: Vec<JoinLayer>,
    /// Magnitude scale for the fp slack of the search window.
    scale: f64,
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// All size-j subsets of `values[offset .. offset + half_n]` as
/// (running sum, local bitmask) pairs.
fn enumerate_half(values: &[f64], offset: usize, half_n: usize, j: usize) -> Vec<HalfEntry> {
    debug_assert!(half_n <= 64);
    if j == 0 {
        return vec![HalfEntry { sum: 0.0, mask: 0 }];
    }
    let mut out = Vec::with_capacity(binomial_u128(half_n, j) as usize);
    let mut combo: Vec<usize> = (0..j).collect();
    loop {
        let mut sum = 0.0;
        let mut mask = 0u64;
        for &c in &combo {
            sum += values[offset + c];
            mask |= 1 << c;
        }
        out.push(HalfEntry { sum, mask });
        // advance to the next combination
        let mut i = j;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if combo[i] < half_n - j + i {
                combo[i] += 1;
                for t in i + 1..j {
                    combo[t] = combo[t - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
    }
}

impl<'a> MitmIndex<'a> {
    pub fn build(samples: &'a SampleSet, k: usize, max_entries: u64) -> Result<Self, SolverError> {
        let values = samples.values();
        let n = values.len();
        let n_left = n / 2;
        let n_right = n - n_left;
        if n_right > 64 {
            return Err(SolverError::Contract(format!(
                "meet-in-the-middle is limited to n <= 128 (half masks are 64-bit), got n = {n}"
            )));
        }
        let j_lo = k.saturating_sub(n_right);
        let j_hi = k.min(n_left);
        let mut entries: u128 = 0;
        for j in j_lo..=j_hi {
            entries += binomial_u128(n_left, j) + binomial_u128(n_right, k - j);
        }
        if entries > max_entries as u128 {
            return Err(SolverError::MemoryCap {
                entries,
                cap: max_entries,
            });
        }
        let mut layers = Vec::with_capacity(j_hi - j_lo + 1);
        for j in j_lo..=j_hi {
            let left = enumerate_half(values, 0, n_left, j);
            let mut right = enumerate_half(values, n_left, n_right, k - j);
            right.sort_unstable_by(|a, b| a.sum.total_cmp(&b.sum));
            layers.push(JoinLayer { left, right });
        }
        let maxabs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            values,
            n_left,
            k,
            layers,
            scale: 1.0 + k as f64 * maxabs,
        })
    }

    fn merge_indices(&self, left_mask: u64, right_mask: u64) -> Vec<usize> {
        let mut indices = Vec::with_capacity(self.k);
        let mut m = left_mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            indices.push(b);
            m &= m - 1;
        }
        let mut m = right_mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            indices.push(self.n_left + b);
            m &= m - 1;
        }
        indices
    }

    /// Best qualifying subset for one target, bit-identical to the
    /// exhaustive oracle.
    pub fn query(&self, target: &Target) -> Option<SubsetSolution> {
        let slack = 1e-9 * (self.scale + target.z.abs());
        let mut best: Option<SubsetSolution> = None;
        for layer in &self.layers {
            for le in &layer.left {
                let want = target.z - le.sum;
                let window = |best: &Option<SubsetSolution>| {
                    let lead = match best {
                        Some(b) => b.residual.abs().min(target.epsilon),
                        None => target.epsilon,
                    };
                    lead + slack
                };
                let idx = layer.right.partition_point(|e| e.sum < want);
                let mut lo = idx as isize - 1;
                let mut hi = idx;
                loop {
                    let d_lo = if lo >= 0 {
                        want - layer.right[lo as usize].sum
                    } else {
                        f64::INFINITY
                    };
                    let d_hi = if hi < layer.right.len() {
                        layer.right[hi].sum - want
                    } else {
                        f64::INFINITY
                    };
                    let (dist, re) = if d_lo <= d_hi {
                        if d_lo.is_infinite() {
                            break;
                        }
                        let e = &layer.right[lo as usize];
                        lo -= 1;
                        (d_lo, e)
                    } else {
                        if d_hi.is_infinite() {
                            break;
                        }
                        let e = &layer.right[hi];
                        hi += 1;
                        (d_hi, e)
                    };
                    if dist > window(&best) {
                        break;
                    }
                    let indices = self.merge_indices(le.mask, re.mask);
                    let sum = subset_sum(self.values, &indices);
                    let abs_res = (sum - target.z).abs();
                    if abs_res < target.epsilon && candidate_improves(&best, abs_res, &indices) {
                        best = Some(SubsetSolution {
                            indices,
                            achieved_sum: sum,
                            residual: sum - target.z,
                        });
                    }
                }
            }
        }
        best
    }

    /// Existence only: stops at the first qualifying subset.
    pub fn covers(&self, target: &Target) -> bool {
        let slack = 1e-9 * (self.scale + target.z.abs());
        for layer in &self.layers {
            for le in &layer.left {
                let want = target.z - le.sum;
                let idx = layer.right.partition_point(|e| e.sum < want);
                let mut lo = idx as isize - 1;
                let mut hi = idx;
                loop {
                    let d_lo = if lo >= 0 {
                        want - layer.right[lo as usize].sum
                    } else {
                        f64::INFINITY
                    };
                    let d_hi = if hi < layer.right.len() {
                        layer.right[hi].sum - want
                    } else {
                        f64::INFINITY
                    };
                    let (dist, re) = if d_lo <= d_hi {
                        if d_lo.is_infinite() {
                            break;
                        }
                        let e = &layer.right[lo as usize];
                        lo -= 1;
                        (d_lo, e)
                    } else {
                        if d_hi.is_infinite() {
                            break;
                        }
                        let e = &layer.right[hi];
                        hi += 1;
                        (d_hi, e)
                    };
                    if dist > target.epsilon + slack {
                        break;
                    }
                    let indices = self.merge_indices(le.mask, re.mask);
                    let sum = subset_sum(self.values, &indices);
                    if (sum - target.z).abs() < target.epsilon {
                        return true;
                    }
                }
            }
        }
        false
    }
}

impl Solver for MitmSolver {
    fn name(&self) -> &'static str {
        "mitm"
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn solve(
        &self,
        samples: &SampleSet,
        k: usize,
        target: &Target,
    ) -> Result<Option<SubsetSolution>, SolverError> {
        if !check_k(k, samples.len())? {
            return Ok(None);
        }
        Ok(MitmIndex::build(samples, k, self.max_entries)?.query(target))
    }

    fn solve_many(
        &self,
        samples: &SampleSet,
        k: usize,
        targets: &[Target],
    ) -> Result<Vec<Option<SubsetSolution>>, SolverError> {
        if !check_k(k, samples.len())? {
            return Ok(vec![None; targets.len()]);
        }
        let index = MitmIndex::build(samples, k, self.max_entries)?;
        Ok(targets.par_iter().map(|t| index.query(t)).collect())
    }

    fn covers_all(
        &self,
        samples: &SampleSet,
        k: usize,
        targets: &[Target],
    ) -> Result<bool, SolverError> {
        if !check_k(k, samples.len())? {
            return Ok(targets.is_empty());
        }
        let index = MitmIndex::build(samples, k, self.max_entries)?;
        Ok(targets.iter().all(|t| index.covers(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{sample, DensitySpec};
    use crate::rng::trial_seed;
    use crate::solver::BruteForceSolver;

    #[test]
    fn agrees_with_oracle_on_random_instances() {
        let brute = BruteForceSolver::default();
        let mitm = MitmSolver::default();
        let spec = DensitySpec::uniform_symmetric();
        for trial in 0..200u64 {
            let seed = trial_seed(0x51F7, trial);
            let n = 6 + (seed % 15) as usize; // 6..=20
            let k = 1 + (seed >> 8) as usize % (n / 2);
            let s = sample(&spec, n, seed);
            let eps = [1e-4, 1e-3, 1e-2, 0.1][(seed >> 16) as usize % 4];
            let z = ((seed >> 24) % 2000) as f64 / 1000.0 - 1.0;
            let t = Target::new(z * (k as f64).sqrt(), eps);
            let a = brute.solve(&s, k, &t).unwrap();
            let b = mitm.solve(&s, k, &t).unwrap();
            assert_eq!(a, b, "disagreement at trial {trial} (n={n}, k={k})");
        }
    }

    #[test]
    fn query_reuse_matches_one_shot_solves() {
        let spec = DensitySpec::uniform_symmetric();
        let s = sample(&spec, 16, 99);
        let mitm = MitmSolver::default();
        let index = MitmIndex::build(&s, 3, DEFAULT_ENTRY_CAP).unwrap();
        for i in 0..20 {
            let t = Target::new(-1.5 + i as f64 * 0.15, 0.05);
            assert_eq!(index.query(&t), mitm.solve(&s, 3, &t).unwrap());
            assert_eq!(index.covers(&t), index.query(&t).is_some());
        }
    }

    #[test]
    fn k_zero_is_a_contract_error() {
        let s = sample(&DensitySpec::uniform_symmetric(), 8, 1);
        assert!(matches!(
            MitmSolver::default().solve(&s, 0, &Target::new(0.0, 0.1)),
            Err(SolverError::Contract(_))
        ));
    }

    #[test]
    fn memory_cap_reports_entries() {
        let s = sample(&DensitySpec::uniform_symmetric(), 40, 2);
        let tiny = MitmSolver { max_entries: 100 };
        match tiny.solve(&s, 8, &Target::new(0.0, 1e-6)) {
            Err(SolverError::MemoryCap { entries, cap }) => {
                assert_eq!(cap, 100);
                assert!(entries > 100);
            }
            other => panic!("expected memory cap, got {other:?}"),
        }
    }

    #[test]
    fn dense_instance_succeeds_near_zero() {
        // n = 40, k = 8 around z = 0 at tight tolerance: qualifying subsets
        // are plentiful, so the exact search finds one.
        let s = sample(&DensitySpec::uniform_symmetric(), 40, 7);
        let sol = MitmSolver::default()
            .solve(&s, 8, &Target::new(0.0, 1e-6))
            .unwrap();
        let sol = sol.expect("dense regime should admit a subset");
        assert_eq!(sol.indices.len(), 8);
        assert!(sol.residual.abs() < 1e-6);
    }

    #[test]
    fn odd_n_and_extreme_split_sizes() {
        let spec = DensitySpec::uniform_symmetric();
        let brute = BruteForceSolver::default();
        let mitm = MitmSolver::default();
        // k = n forces j to its upper range; k = 1 its lower
        for (n, k) in [(7usize, 7usize), (7, 1), (9, 8), (3, 2), (2, 1), (1, 1)] {
            let s = sample(&spec, n, 1000 + n as u64);
            for t in [Target::new(0.0, 0.5), Target::new(1.0, 0.2)] {
                assert_eq!(
                    brute.solve(&s, k, &t).unwrap(),
                    mitm.solve(&s, k, &t).unwrap(),
                    "n={n} k={k}"
                );
            }
        }
    }
}
