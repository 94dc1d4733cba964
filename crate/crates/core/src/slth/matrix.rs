//! Row-major dense matrices at desk scale, with just the operations the
//! pruning construction needs.

use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};

pub const POWER_ITERATION_CAP: usize = 10_000;
pub const POWER_ITERATION_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows_data: Vec<Vec<f64>>) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, |r| r.len());
        assert!(rows_data.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows,
            cols,
            data: rows_data.into_iter().flatten().collect(),
        }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn random_uniform(rows: usize, cols: usize, rng: &mut SplitMix64) -> Self {
        let data = (0..rows * cols).map(|_| rng.next_in(-1.0, 1.0)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec shape mismatch");
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            out[r] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn transpose_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "transpose matvec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * x[r];
            }
        }
        out
    }

    /// Entrywise product, used to materialize masked networks.
    pub fn hadamard(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn count_nonzero(&self) -> u64 {
        self.data.iter().filter(|&&v| v != 0.0).count() as u64
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Largest singular value by power iteration on the normal matrix,
    /// seeded start vector, relative tolerance on successive estimates.
    pub fn spectral_norm(&self, seed: u64) -> Result<f64, PowerIterationError> {
        if self.data.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let mut rng = SplitMix64::new(seed);
        let mut v: Vec<f64> = (0..self.cols).map(|_| rng.next_in(-1.0, 1.0)).collect();
        normalize(&mut v);
        let mut prev = 0.0f64;
        for step in 0..POWER_ITERATION_CAP {
            let av = self.matvec(&v);
            let sigma = norm(&av);
            if sigma == 0.0 {
                // restart away from the kernel
                v = (0..self.cols).map(|_| rng.next_in(-1.0, 1.0)).collect();
                normalize(&mut v);
                continue;
            }
            let mut next = self.transpose_matvec(&av);
            normalize(&mut next);
            v = next;
            if step > 0 && (sigma - prev).abs() <= POWER_ITERATION_REL_TOL * sigma {
                return Ok(sigma);
            }
            prev = sigma;
        }
        Err(PowerIterationError {
            cap: POWER_ITERATION_CAP,
            prev,
            last: norm(&self.matvec(&v)),
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("power iteration did not converge after {cap} steps (estimates {prev}, {last})")]
pub struct PowerIterationError {
    pub cap: usize,
    pub prev: f64,
    pub last: f64,
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn normalize(x: &mut [f64]) {
    let n = norm(x);
    if n > 0.0 {
        for v in x {
            *v /= n;
        }
    }
}
