//! Seeded pseudo-random generation with a bit-exact, documented layout.
//!
//! Every stochastic run in this crate derives from a single 64-bit master
//! seed. The generator is SplitMix64 (Steele, Lea, Flood 2014): cheap,
//! stateless to fork, and simple enough to reimplement bit-for-bit in any
//! language, which is what makes cross-language result comparison possible.
//!
//! Layout, fixed for all time:
//! - stream: `state += 0x9E3779B97F4A7C15; output = mix(state)`
//! - trial seed: `mix(master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15)`
//!   (wrapping arithmetic), so trial streams are random-access and do not
//!   depend on execution order or worker count
//! - unit float: `(u64 >> 11) as f64 * 2^-53`, uniform on `[0, 1)`

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` of a run with the given master seed.
///
/// Random-access by construction: parallel schedulers can derive any
/// trial's seed without advancing a shared stream.
#[inline]
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    mix64(master_seed.wrapping_add(trial_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform over `0..n`. Rejection-free modulo bias is irrelevant at the
    /// n values used here (n < 2^32), but we reject anyway to stay exact.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Standard normal pair via Box-Muller.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        // u in (0,1] so the log is finite.
        let u = 1.0 - self.next_f64();
        let v = self.next_f64();
        let r = (-2.0 * u.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * v;
        (r * theta.cos(), r * theta.sin())
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
