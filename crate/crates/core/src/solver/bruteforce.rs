//! Exhaustive enumeration of all k-subsets in lexicographic index order.
//!
//! The reference oracle for the other strategies. Every candidate is judged
//! by the canonical pairwise sum, so the result is the global optimum of
//! the shared contract.

use super::{candidate_improves, check_k, SolverError, SubsetSolution, Target};
use crate::densities::SampleSet;
use crate::solver::{subset_sum, Solver};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub struct BruteForceSolver {
    /// Largest C(n,k) the solver will enumerate.
    pub max_combinations: u64,
}

impl Default for BruteForceSolver {
    fn default() -> Self {
        Self {
            max_combinations: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// C(n,k) if it does not exceed `cap`, else the error carrying the count
/// (saturated at u128 scale).
fn binomial_capped(n: usize, k: usize, cap: u64) -> Result<u64, SolverError> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > cap as u128 {
            // finish the exact count only if it stays representable
            return Err(SolverError::EnumerationCap {
                combinations: acc,
                cap,
            });
        }
    }
    Ok(acc as u64)
}

/// Advance `combo` to the next k-subset in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn for_each_combination(
    n: usize,
    k: usize,
    cap: u64,
    mut f: impl FnMut(&[usize]),
) -> Result<(), SolverError> {
    binomial_capped(n, k, cap)?;
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        f(&combo);
        if !next_combination(&mut combo, n) {
            return Ok(());
        }
    }
}

impl Solver for BruteForceSolver {
    fn name(&self) -> &'static str {
        "bruteforce"
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
        let values = samples.values();
        if !check_k(k, values.len())? {
            return Ok(None);
        }
        let mut best: Option<SubsetSolution> = None;
        for_each_combination(values.len(), k, self.max_combinations, |combo| {
            let sum = subset_sum(values, combo);
            let abs_res = (sum - target.z).abs();
            if abs_res < target.epsilon && candidate_improves(&best, abs_res, combo) {
                best = Some(SubsetSolution {
                    indices: combo.to_vec(),
                    achieved_sum: sum,
                    residual: sum - target.z,
                });
            }
        })?;
        Ok(best)
    }
}

/// Count the k-subsets whose canonical sum lands within the tolerance:
/// the subset-count statistic of the second-moment diagnostic.
pub fn count_qualifying(
    samples: &SampleSet,
    k: usize,
    target: &Target,
    cap: u64,
) -> Result<u64, SolverError> {
    let values = samples.values();
    if !check_k(k, values.len())? {
        return Ok(0);
    }
    let mut count = 0u64;
    for_each_combination(values.len(), k, cap, |combo| {
        if (subset_sum(values, combo) - target.z).abs() < target.epsilon {
            count += 1;
        }
    })?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{sample, DensitySpec, SampleSet};

    fn set(values: &[f64]) -> SampleSet {
        SampleSet::from_values(values.to_vec(), DensitySpec::uniform_symmetric(), 0)
    }

    #[test]
    fn four_sample_example() {
        let s = set(&[0.5, -0.3, 0.2, -0.1]);
        let sol = BruteForceSolver::default()
            .solve(&s, 2, &Target::new(0.2, 0.01))
            .unwrap()
            .unwrap();
        assert_eq!(sol.indices, vec![0, 1]);
        assert_eq!(sol.residual, 0.0);
        assert_eq!(sol.achieved_sum, 0.2);
    }

    #[test]
    fn full_set_is_the_only_candidate_at_k_equals_n() {
        let s = set(&[0.5, -0.3, 0.2, -0.1]);
        let full: f64 = 0.5 - 0.3 + 0.2 - 0.1;
        let sol = BruteForceSolver::default()
            .solve(&s, 4, &Target::new(full, 0.01))
            .unwrap()
            .unwrap();
        assert_eq!(sol.indices, vec![0, 1, 2, 3]);
        assert!(BruteForceSolver::default()
            .solve(&s, 4, &Target::new(full + 1.0, 0.01))
            .unwrap()
            .is_none());
    }

    #[test]
    fn out_of_range_target_is_absent() {
        let s = sample(&DensitySpec::uniform_symmetric(), 10, 3);
        let sol = BruteForceSolver::default()
            .solve(&s, 2, &Target::new(5.0, 0.1))
            .unwrap();
        assert!(sol.is_none(), "max achievable sum is 2");
    }

    #[test]
    fn k_zero_is_a_contract_error_and_k_above_n_is_absent() {
        let s = set(&[0.1, 0.2]);
        assert!(matches!(
            BruteForceSolver::default().solve(&s, 0, &Target::new(0.0, 0.1)),
            Err(SolverError::Contract(_))
        ));
        assert!(BruteForceSolver::default()
            .solve(&s, 3, &Target::new(0.0, 10.0))
            .unwrap()
            .is_none());
    }

    #[test]
    fn enumeration_cap_reports_combinations() {
        let s = sample(&DensitySpec::uniform_symmetric(), 40, 9);
        let tight = BruteForceSolver {
            max_combinations: 1000,
        };
        match tight.solve(&s, 8, &Target::new(0.0, 0.1)) {
            Err(SolverError::EnumerationCap { combinations, cap }) => {
                assert_eq!(cap, 1000);
                assert!(combinations > 1000);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn returns_minimum_residual_among_qualifiers() {
        let s = set(&[0.30, 0.21, 0.52, 0.19]);
        // target 0.5, eps 0.3: pairs qualifying include (0,1)=0.51, (0,3)=0.49,
        // (1,3)=0.40, (2,3)=0.71, (0,2)=0.82 no, (1,2)=0.73 qualifies
        let sol = BruteForceSolver::default()
            .solve(&s, 2, &Target::new(0.5, 0.3))
            .unwrap()
            .unwrap();
        assert_eq!(sol.indices, vec![0, 1]); // |0.51-0.5| = 0.01 is minimal
    }

    #[test]
    fn count_matches_direct_enumeration() {
        let s = set(&[0.1, 0.2, 0.3, -0.1]);
        // pairs and their sums: 0.3, 0.4, 0.0, 0.5, 0.1, 0.2
        let n = count_qualifying(&s, 2, &Target::new(0.25, 0.16), 100).unwrap();
        assert_eq!(n, 4); // 0.3, 0.4, 0.2, 0.1 are within 0.16 of 0.25
    }

    #[test]
    fn lexicographic_enumeration_order() {
        let mut combos = Vec::new();
        for_each_combination(4, 2, 100, |c| combos.push(c.to_vec())).unwrap();
        assert_eq!(
            combos,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }
}
