//! The uniform-sum density, exactly and on a grid.
//!
//! For n unit uniforms the alternating-sum closed form is exact but loses
//! roughly a bit of precision per term, so it is only used up to
//! [`EXACT_BRANCH_MAX`] (with the evaluation point reflected into the lower
//! half of the support, which keeps the powers small and the cancellation
//! harmless). Past that the density is advanced by iterated trapezoid
//! convolution with the unit box on a fixed grid; the two branches are
//! cross-checked on their overlap window.

use serde::{Deserialize, Serialize};

/// Largest n evaluated by the alternating-sum closed form.
pub const EXACT_BRANCH_MAX: u32 = 30;

/// Grid points per unit interval for the convolution branch.
pub const GRID_POINTS_PER_UNIT: u32 = 1 << 14;

/// Density of the sum of `n` independent Uniform\[0,1\] draws at `x`.
///
/// Exact piecewise-polynomial evaluation for `n <= EXACT_BRANCH_MAX`; a
/// freshly built convolution grid beyond that (callers doing bulk work
/// above the exact branch should use [`ConvolutionGrid`] directly).
pub fn irwin_hall_pdf(x: f64, n: u32) -> f64 {
    assert!(n >= 1, "irwin_hall_pdf needs n >= 1");
    if !(0.0..=n as f64).contains(&x) {
        return 0.0;
    }
    if n <= EXACT_BRANCH_MAX {
        irwin_hall_pdf_exact(x, n)
    } else {
        ConvolutionGrid::build(n).pdf(x)
    }
}

/// Density of the sum of `n` independent Uniform[-1,1] draws at `x`:
/// a rescaling of the unit-uniform sum, even in `x`, variance `n/3`.
/// Evaluates at `|x|` so the evenness is bitwise.
pub fn uniform_sum_pdf(x: f64, n: u32) -> f64 {
    0.5 * irwin_hall_pdf((x.abs() + n as f64) / 2.0, n)
}

fn irwin_hall_pdf_exact(x: f64, n: u32) -> f64 {
    debug_assert!(n <= EXACT_BRANCH_MAX);
    let nf = n as f64;
    // The density is symmetric about n/2; evaluating on the lower half
    // keeps (x - j)^(n-1) small and the alternating sum well conditioned.
    let x = if x > nf / 2.0 { nf - x } else { x };
    let mut binom = 1.0f64; // C(n, j), exact in f64 for n <= 30
    let mut sign = 1.0f64;
    let mut acc = 0.0f64;
    for j in 0..=(x.floor() as u32) {
        if j > 0 {
            binom *= (n - j + 1) as f64 / j as f64;
            sign = -sign;
        }
        let base = x - j as f64;
        // 0^0 = 1 covers the n = 1 case
        acc += sign * binom * base.powi(n as i32 - 1);
    }
    let mut factorial = 1.0f64;
    for i in 2..n {
        factorial *= i as f64;
    }
    (acc / factorial).max(0.0)
}

/// Iterated box-filter convolution of the unit uniform on a fixed grid.
///
/// Holds the density of the n-fold sum sampled at `i / GRID_POINTS_PER_UNIT`
/// over `[0, n]`. Each convolution step is a trapezoid prefix integral
/// followed by a one-unit difference, so the whole table for every m <= n
/// falls out of one incremental sweep.
pub struct ConvolutionGrid {
    n: u32,
    values: Vec<f64>,
}

impl ConvolutionGrid {
    pub fn build(n: u32) -> Self {
        let mut grid = Self::unit();
        while grid.n < n {
            grid.advance();
        }
        grid
    }

    /// The flat density of a single unit uniform.
    pub fn unit() -> Self {
        Self {
            n: 1,
            values: vec![1.0; GRID_POINTS_PER_UNIT as usize + 1],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Convolve once more with the unit box: f_{n+1}(x) = F_n(x) - F_n(x-1).
    pub fn advance(&mut self) {
        let h = 1.0 / GRID_POINTS_PER_UNIT as f64;
        let old_len = self.values.len();
        let mut prefix = Vec::with_capacity(old_len);
        prefix.push(0.0f64);
        for i in 1..old_len {
            let last = prefix[i - 1];
            prefix.push(last + 0.5 * h * (self.values[i - 1] + self.values[i]));
        }
        let step = GRID_POINTS_PER_UNIT as usize;
        let new_len = old_len + step;
        let total = prefix[old_len - 1];
        let mut next = Vec::with_capacity(new_len);
        for i in 0..new_len {
            let upper = if i < old_len { prefix[i] } else { total };
            let lower = if i >= step {
                prefix[(i - step).min(old_len - 1)]
            } else {
                0.0
            };
            next.push((upper - lower).max(0.0));
        }
        self.values = next;
        self.n += 1;
    }

    /// Linear interpolation between grid points; zero outside `[0, n]`.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=self.n as f64).contains(&x) {
            return 0.0;
        }
        let pos = x * GRID_POINTS_PER_UNIT as f64;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Trapezoid integral of the whole table.
    pub fn integral(&self) -> f64 {
        let h = 1.0 / GRID_POINTS_PER_UNIT as f64;
        let mut acc = 0.0;
        for w in self.values.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
        }
        acc
    }
}

/// Adaptive Simpson quadrature to the given absolute tolerance.
pub(crate) fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 40)
}

/// Integral of the exact-branch density over its support, by per-unit
/// adaptive Simpson (the integrand is polynomial between integer knots).
pub fn exact_branch_integral(n: u32, tol: f64) -> f64 {
    assert!(n <= EXACT_BRANCH_MAX);
    let f = |x: f64| irwin_hall_pdf_exact(x, n);
    (0..n)
        .map(|j| adaptive_simpson(&f, j as f64, (j + 1) as f64, tol / n as f64))
        .sum()
}

/// Scaled extrema of the centered uniform sum for one n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDensityTable {
    pub n: u32,
    /// `(x, f(x,n))` pairs over the support, at the caller's resolution.
    pub grid: Vec<(f64, f64)>,
    /// min of `f(x,n) * sqrt(n)` over `|x| <= sqrt(n)`
    pub scaled_min: f64,
    /// max of `f(x,n) * sqrt(n)` over the support
    pub scaled_max: f64,
    /// numeric integral of the density
    pub integral: f64,
}

/// CSV header for density tables.
pub const SUM_DENSITY_CSV_HEADER: &str = "n,x,f,f_times_sqrt_n";

impl SumDensityTable {
    pub fn csv_rows(&self) -> Vec<String> {
        let sqrt_n = (self.n as f64).sqrt();
        self.grid
            .iter()
            .map(|(x, f)| format!("{},{},{},{}", self.n, x, f, f * sqrt_n))
            .collect()
    }
}

fn table_for(n: u32, grid_resolution: u32, conv: Option<&ConvolutionGrid>) -> SumDensityTable {
    let nf = n as f64;
    let sqrt_n = nf.sqrt();
    let eval = |x: f64| match conv {
        Some(g) => 0.5 * g.pdf((x + nf) / 2.0),
        None => 0.5 * irwin_hall_pdf_exact((x + nf) / 2.0, n),
    };
    let res = grid_resolution.max(2);

    // Lower constant: scan |x| <= sqrt(n) including the endpoints, where
    // unimodality puts the minimum.
    let mut scaled_min = f64::INFINITY;
    for i in 0..=res {
        let x = -sqrt_n + 2.0 * sqrt_n * i as f64 / res as f64;
        scaled_min = scaled_min.min(eval(x) * sqrt_n);
    }

    // Upper constant: scan the full support and pin the mode at 0.
    let mut scaled_max = eval(0.0) * sqrt_n;
    for i in 0..=res {
        let x = -nf + 2.0 * nf * i as f64 / res as f64;
        scaled_max = scaled_max.max(eval(x) * sqrt_n);
    }

    let integral = match conv {
        Some(g) => g.integral(),
        None => exact_branch_integral(n, 1e-10),
    };

    let grid = (0..=res)
        .map(|i| {
            let x = -nf + 2.0 * nf * i as f64 / res as f64;
            (x, eval(x))
        })
        .collect();

    SumDensityTable {
        n,
        grid,
        scaled_min,
        scaled_max,
        integral,
    }
}

/// Empirical verification report for the sum-bounded property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumBoundedReport {
    pub tables: Vec<SumDensityTable>,
    /// infimum over n of the scaled minimum (the empirical lower constant)
    pub c_l_hat: f64,
    /// supremum over n of the scaled maximum (the empirical upper constant)
    pub c_u_hat: f64,
}

/// Tables and scaled envelopes for every n up to `n_max`.
///
/// Both constants must exist for the density family to be usable by the
/// subset-sum analysis; the report asserts positivity and finiteness.
pub fn sum_bounded_check(n_max: u32, grid_resolution: u32) -> SumBoundedReport {
    assert!(n_max >= 1);
    let mut tables = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max.min(EXACT_BRANCH_MAX) {
        tables.push(table_for(n, grid_resolution, None));
    }
    if n_max > EXACT_BRANCH_MAX {
        let mut conv = ConvolutionGrid::build(EXACT_BRANCH_MAX + 1);
        loop {
            tables.push(table_for(conv.n(), grid_resolution, Some(&conv)));
            if conv.n() == n_max {
                break;
            }
            conv.advance();
        }
    }
    let c_l_hat = tables
        .iter()
        .map(|t| t.scaled_min)
        .fold(f64::INFINITY, f64::min);
    let c_u_hat = tables
        .iter()
        .map(|t| t.scaled_max)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(c_l_hat > 0.0, "scaled lower envelope must be positive");
    assert!(c_u_hat.is_finite(), "scaled upper envelope must be finite");
    SumBoundedReport {
        tables,
        c_l_hat,
        c_u_hat,
    }
}

/// Grid check that the centered density is symmetric about 0, nondecreasing
/// on `[-n, 0]`, and nonincreasing on `[0, n]`, within floating tolerance.
pub fn unimodality_check(n: u32, grid_resolution: u32) -> bool {
    assert!(n >= 1);
    let conv = (n > EXACT_BRANCH_MAX).then(|| ConvolutionGrid::build(n));
    let nf = n as f64;
    let eval = |x: f64| match &conv {
        Some(g) => 0.5 * g.pdf((x + nf) / 2.0),
        None => 0.5 * irwin_hall_pdf_exact((x + nf) / 2.0, n),
    };
    let res = grid_resolution.max(2);
    let tol = 1e-9;
    let mut prev = eval(-nf);
    for i in 1..=res {
        let x = -nf + nf * i as f64 / res as f64; // [-n, 0]
        let cur = eval(x);
        if cur < prev - tol {
            return false;
        }
        if (cur - eval(-x)).abs() > tol.max(1e-9 * cur.abs()) {
            return false;
        }
        prev = cur;
    }
    for i in 1..=res {
        let x = nf * i as f64 / res as f64; // [0, n]
        let cur = eval(x);
        if cur > prev + tol {
            return false;
        }
        prev = cur;
    }
    true
}
