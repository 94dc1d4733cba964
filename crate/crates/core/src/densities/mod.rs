//! Distributions the experiments draw from, and the density facts the
//! subset-sum analysis rests on.

mod irwin_hall;

pub use irwin_hall::{
    exact_branch_integral, irwin_hall_pdf, sum_bounded_check, uniform_sum_pdf, unimodality_check,
    ConvolutionGrid, SumBoundedReport, SumDensityTable, EXACT_BRANCH_MAX, GRID_POINTS_PER_UNIT,
    SUM_DENSITY_CSV_HEADER,
};

use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("invalid density spec: {0}")]
    InvalidSpec(String),
    #[error("splitting requires samples drawn from a mixture with recorded tags")]
    NotAMixture,
    #[error("the split bound degenerates at alpha = p = {0}")]
    DegenerateSplit(f64),
}

/// A real interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Declared sampling distribution.
///
/// `ProductUniform` is the law of X*Y with X ~ Uniform\[0,1\] and
/// Y ~ Uniform[-1,1]; `DeltaZeroMixture` puts probability 1/2 on an exact
/// zero and 1/2 on a `ProductUniform` draw. These are the laws the network
/// preprocessing induces on first-times-second-layer weight products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Mixture {
        p: f64,
        uniform: Interval,
        other: Box<DensitySpec>,
    },
    ProductUniform,
    DeltaZeroMixture,
}

impl DensitySpec {
    pub fn uniform_symmetric() -> Self {
        DensitySpec::Uniform { lo: -1.0, hi: 1.0 }
    }

    pub fn validate(&self) -> Result<(), DensityError> {
        match self {
            DensitySpec::Uniform { lo, hi } => {
                if !(lo < hi) {
                    return Err(DensityError::InvalidSpec(format!(
                        "uniform needs lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            DensitySpec::Mixture { p, uniform, other } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(DensityError::InvalidSpec(format!(
                        "mixture weight must lie in (0,1], got {p}"
                    )));
                }
                if !(uniform.lo < uniform.hi) {
                    return Err(DensityError::InvalidSpec(
                        "mixture uniform component needs lo < hi".into(),
                    ));
                }
                other.validate()?;
            }
            DensitySpec::ProductUniform | DensitySpec::DeltaZeroMixture => {}
        }
        Ok(())
    }

    /// Mixture weight of the top-level uniform component, if any.
    pub fn mixture_weight(&self) -> Option<f64> {
        match self {
            DensitySpec::Mixture { p, .. } => Some(*p),
            _ => None,
        }
    }

    fn draw(&self, rng: &mut SplitMix64) -> f64 {
        match self {
            DensitySpec::Uniform { lo, hi } => rng.next_in(*lo, *hi),
            DensitySpec::Mixture { p, uniform, other } => {
                // component tag first, then the component draw
                if rng.next_f64() < *p {
                    rng.next_in(uniform.lo, uniform.hi)
                } else {
                    other.draw(rng)
                }
            }
            DensitySpec::ProductUniform => {
                let x = rng.next_f64(); // Uniform[0,1)
                let y = rng.next_in(-1.0, 1.0);
                x * y
            }
            DensitySpec::DeltaZeroMixture => {
                if rng.next_f64() < 0.5 {
                    0.0
                } else {
                    DensitySpec::ProductUniform.draw(rng)
                }
            }
        }
    }
}

/// An ordered sequence of draws with seed provenance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
    spec: DensitySpec,
    seed: u64,
    /// For top-level mixtures: which draws took the uniform component.
    uniform_tags: Option<Vec<bool>>,
}

impl SampleSet {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform_tags(&self) -> Option<&[bool]> {
        self.uniform_tags.as_deref()
    }

    /// Wrap values that were produced elsewhere (file input, derived
    /// products). No component tags are available on such sets.
    pub fn from_values(values: Vec<f64>, spec: DensitySpec, seed: u64) -> Self {
        assert!(!values.is_empty(), "a sample set holds at least one value");
        Self {
            values,
            spec,
            seed,
            uniform_tags: None,
        }
    }
}

/// Draw `count` samples from `spec`, deterministically in `(spec, count,
/// seed)`. Mixture draws take the Bernoulli component tag first, and the
/// tags are retained for splitting.
pub fn sample(spec: &DensitySpec, count: usize, seed: u64) -> SampleSet {
    assert!(count >= 1, "count must be at least 1");
    spec.validate().expect("invalid density spec");
    let mut rng = SplitMix64::new(seed);
    match spec {
        DensitySpec::Mixture { p, uniform, other } => {
            let mut values = Vec::with_capacity(count);
            let mut tags = Vec::with_capacity(count);
            for _ in 0..count {
                let tag = rng.next_f64() < *p;
                values.push(if tag {
                    rng.next_in(uniform.lo, uniform.hi)
                } else {
                    other.draw(&mut rng)
                });
                tags.push(tag);
            }
            SampleSet {
                values,
                spec: spec.clone(),
                seed,
                uniform_tags: Some(tags),
            }
        }
        _ => {
            let values = (0..count).map(|_| spec.draw(&mut rng)).collect();
            SampleSet {
                values,
                spec: spec.clone(),
                seed,
                uniform_tags: None,
            }
        }
    }
}

/// Indices of the uniform-tagged draws plus the analytic failure bound
/// `exp(-2 (alpha - p)^2 n')` for seeing fewer than `alpha n'` of them.
pub fn hoeffding_split(samples: &SampleSet, alpha: f64) -> Result<(Vec<usize>, f64), DensityError> {
    let p = samples
        .spec
        .mixture_weight()
        .ok_or(DensityError::NotAMixture)?;
    let tags = samples.uniform_tags().ok_or(DensityError::NotAMixture)?;
    if alpha == p {
        return Err(DensityError::DegenerateSplit(p));
    }
    let indices: Vec<usize> = tags
        .iter()
        .enumerate()
        .filter_map(|(i, &t)| t.then_some(i))
        .collect();
    let n = samples.len() as f64;
    let bound = (-2.0 * (alpha - p) * (alpha - p) * n).exp();
    Ok((indices, bound))
}

/// Density of X*Y with X ~ Uniform\[0,1\], Y ~ Uniform[-1,1]:
/// `(1/2) ln(1/|z|)` on `[-1,1] \ {0}`, zero outside, divergent at 0.
pub fn product_uniform_pdf(z: f64) -> f64 {
    let a = z.abs();
    if a > 1.0 {
        0.0
    } else if a == 0.0 {
        f64::INFINITY
    } else {
        0.5 * (1.0 / a).ln()
    }
}

/// Continuous part of the half-atom mixture (1/2) delta_0 + (1/2) X*Y:
/// `(1/4) ln(1/|z|)` away from the atom.
pub fn delta_zero_mixture_pdf_part(z: f64) -> f64 {
    0.5 * product_uniform_pdf(z)
}

/// Result of the pointwise domination scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub holds: bool,
    /// Minimum of `density - ln(2)/4` over the scanned grid; the boundary
    /// points attain exactly zero.
    pub min_margin: f64,
    pub grid_points: usize,
}

/// Check that the continuous part of the half-atom product mixture
/// dominates the constant `ln(2)/4` on `[-1/2, 1/2] \ {0}`, which is what
/// lets the mixture stand in for a Uniform[-1/2, 1/2] component of weight
/// `ln(2)/4`.
pub fn product_mixture_domination_check(grid_resolution: usize) -> DominationReport {
    let half = grid_resolution.max(2) / 2;
    let level = std::f64::consts::LN_2 / 4.0;
    let mut min_margin = f64::INFINITY;
    let mut points = 0usize;
    for i in 1..=half {
        let z = 0.5 * i as f64 / half as f64;
        for signed in [z, -z] {
            let margin = delta_zero_mixture_pdf_part(signed) - level;
            min_margin = min_margin.min(margin);
            points += 1;
        }
    }
    DominationReport {
        holds: min_margin >= -1e-12,
        min_margin,
        grid_points: points,
    }
}
