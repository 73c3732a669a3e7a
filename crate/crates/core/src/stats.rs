//! Seeded random streams, compensated summation and Monte Carlo estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Purpose of a random stream derived from a master seed. Each purpose gets
/// its own ChaCha stream id so, e.g., arrival orders and coin flips of the
/// same trial never share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Instance = 0,
    Order = 1,
    Coins = 2,
    Oracle = 3,
}

/// Generator for `(master, trial, purpose)`. Distinct trials and purposes map
/// to distinct 64-bit ChaCha stream ids under the same key.
pub fn stream_rng(master: u64, trial: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial.wrapping_mul(4).wrapping_add(purpose as u64));
    rng
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    /// Mean and standard error of `xs`, summed in the given order.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as u64;
        if n == 0 {
            return Estimate {
                mean: 0.0,
                stderr: 0.0,
                trials: 0,
            };
        }
        let mut s = KahanSum::new();
        xs.iter().for_each(|&x| s.add(x));
        let mean = s.value() / n as f64;
        let mut ss = KahanSum::new();
        xs.iter().for_each(|&x| ss.add((x - mean) * (x - mean)));
        let var = if n > 1 { ss.value() / (n - 1) as f64 } else { 0.0 };
        Estimate {
            mean,
            stderr: (var / n as f64).sqrt(),
            trials: n,
        }
    }

    /// Frequency of `hits` out of `trials` with binomial standard error.
    pub fn binomial(hits: u64, trials: u64) -> Self {
        if trials == 0 {
            return Estimate {
                mean: 0.0,
                stderr: 0.0,
                trials: 0,
            };
        }
        let p = hits as f64 / trials as f64;
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// 95% normal-approximation interval.
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)
    }

    /// True when `x` lies within `k` standard errors of the mean (a zero
    /// stderr still admits a tiny rounding slack).
    pub fn within(&self, x: f64, k: f64) -> bool {
        (self.mean - x).abs() <= k * self.stderr + 1e-12
    }
}
