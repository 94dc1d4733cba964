//! Property tests for the solver contracts.

use proptest::prelude::*;
use rfss_core::densities::{DensitySpec, SampleSet};
use rfss_core::rng::SplitMix64;
use rfss_core::solver::{
    grid_covered, pairwise_sum, solve_all_targets, MitmSolver, Solver, Target,
};

fn instance(values: Vec<f64>, seed: u64) -> SampleSet {
    SampleSet::from_values(values, DensitySpec::uniform_symmetric(), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_are_sound(
        values in prop::collection::vec(-1.0f64..1.0, 4..18),
        k_frac in 0.0f64..1.0,
        z_frac in -1.0f64..1.0,
        eps in 1e-4f64..0.3,
    ) {
        let n = values.len();
        let k = 1 + (k_frac * (n as f64 / 2.0 - 1.0)) as usize;
        let z = z_frac * (k as f64).sqrt();
        let samples = instance(values.clone(), 0);
        let target = Target::new(z, eps);
        if let Some(sol) = MitmSolver::default().solve(&samples, k, &target).unwrap() {
            // exactly k distinct sorted indices
            prop_assert_eq!(sol.indices.len(), k);
            prop_assert!(sol.indices.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(*sol.indices.last().unwrap() < n);
            // independent pairwise re-sum reproduces the record and beats eps
            let gathered: Vec<f64> = sol.indices.iter().map(|&i| values[i]).collect();
            let resum = pairwise_sum(&gathered);
            prop_assert_eq!(resum, sol.achieved_sum);
            prop_assert!((resum - z).abs() < eps);
        }
    }

    #[test]
    fn permutation_equivariance(
        values in prop::collection::vec(-1.0f64..1.0, 4..14),
        shuffle_seed in any::<u64>(),
        eps in 1e-3f64..0.2,
    ) {
        let n = values.len();
        let k = (n / 3).max(1);
        let target = Target::new(0.2, eps);
        let solver = MitmSolver::default();
        let base = solver.solve(&instance(values.clone(), 0), k, &target).unwrap();

        // permute the sample order and map the result back
        let mut perm: Vec<usize> = (0..n).collect();
        SplitMix64::new(shuffle_seed).shuffle(&mut perm);
        let permuted: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let shuffled = solver.solve(&instance(permuted, 0), k, &target).unwrap();

        match (base, shuffled) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                let mut mapped: Vec<usize> = b.indices.iter().map(|&i| perm[i]).collect();
                mapped.sort_unstable();
                // continuous data: ties have probability zero, so the same
                // subset wins under any ordering
                prop_assert_eq!(mapped, a.indices);
                prop_assert!((a.achieved_sum - b.achieved_sum).abs() <= 1e-12);
            }
            (a, b) => prop_assert!(false, "presence changed under permutation: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn tolerance_monotonicity(
        values in prop::collection::vec(-1.0f64..1.0, 4..16),
        eps in 1e-4f64..0.2,
        z_frac in -1.0f64..1.0,
    ) {
        let n = values.len();
        let k = (n / 4).max(1);
        let z = z_frac * (k as f64).sqrt();
        let samples = instance(values, 0);
        let solver = MitmSolver::default();
        let tight = solver.solve(&samples, k, &Target::new(z, eps)).unwrap();
        let loose = solver.solve(&samples, k, &Target::new(z, 2.0 * eps)).unwrap();
        if tight.is_some() {
            prop_assert!(loose.is_some(), "a solution at eps must survive at 2 eps");
        }
    }

    #[test]
    fn coverage_monotone_in_tolerance(
        values in prop::collection::vec(-1.0f64..1.0, 6..16),
        eps in 0.02f64..0.2,
    ) {
        let k = 2usize;
        let samples = instance(values, 0);
        let solver = MitmSolver::default();
        let tight = grid_covered(&samples, k, eps, &solver).unwrap();
        let loose = grid_covered(&samples, k, 2.0 * eps, &solver).unwrap();
        if tight {
            prop_assert!(loose, "coverage at eps implies coverage at 2 eps");
        }
    }
}

#[test]
fn all_targets_reports_every_grid_point() {
    // dense equispaced values cover everything at k = 1
    let values: Vec<f64> = (0..81).map(|i| -1.0 + i as f64 / 40.0).collect();
    let samples = instance(values, 0);
    let result = solve_all_targets(&samples, 1, 0.1, &MitmSolver::default()).unwrap();
    assert!(result.fully_covered(), "uncovered: {:?}", result.uncovered);
    assert_eq!(result.grid.len(), result.solutions.len());
    assert_eq!(result.epsilon_prime, 0.05);

    // a sparse instance leaves holes, and they are reported
    let sparse = instance(vec![0.9, -0.9], 0);
    let result = solve_all_targets(&sparse, 1, 0.1, &MitmSolver::default()).unwrap();
    assert!(!result.fully_covered());
    for &i in &result.uncovered {
        assert!(result.solutions[i].is_none());
    }
}
