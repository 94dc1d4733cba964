//! Desk-scale laboratory for the fixed-size random subset sum problem and
//! its sparse lottery-ticket application.
//!
//! The crate is organized around five subsystems:
//!
//! - [`bounds`]: entropy-based sample-size calculators, counting bounds,
//!   and the density-versus-overparameterization curve.
//! - [`densities`]: the uniform-sum density (exact and grid-convolved),
//!   sum-boundedness and unimodality checks, and seeded samplers.
//! - [`solver`]: interchangeable subset-sum strategies (exhaustive,
//!   meet-in-the-middle, randomized local search) behind one trait,
//!   selected by name, plus the all-targets grid variant.
//! - [`montecarlo`]: success-probability estimation, phase-transition
//!   sweeps, constant calibration, and the second-moment diagnostic.
//! - [`slth`]: random dense networks, subset-sum pruning into sparse
//!   subnetworks, and approximation/sparsity verification.
//!
//! Everything stochastic is driven by explicit 64-bit seeds through
//! [`rng`]; identical configurations reproduce identical outputs
//! regardless of thread count.

pub mod baselines;
pub mod bounds;
pub mod densities;
pub mod montecarlo;
pub mod rng;
pub mod slth;
pub mod solver;
