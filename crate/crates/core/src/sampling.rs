//! Seeded draws from a multivariate normal.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::experiment::Gaussian;
use crate::linalg;

pub struct GaussianSampler {
    mean: Vec<f64>,
    factor: DMatrix<f64>,
    rng: ChaCha8Rng,
    z: Vec<f64>,
}

impl GaussianSampler {
    pub fn new(g: &Gaussian, seed: u64) -> Self {
        Self {
            mean: g.mean.iter().copied().collect(),
            factor: linalg::psd_factor(&g.cov),
            rng: ChaCha8Rng::seed_from_u64(seed),
            z: vec![0.0; g.dim()],
        }
    }

    /// Writes the next draw into `out` (length = dimension).
    pub fn draw_into(&mut self, out: &mut [f64]) {
        for z in self.z.iter_mut() {
            *z = self.rng.sample(StandardNormal);
        }
        let n = self.mean.len();
        for i in 0..n {
            let mut v = self.mean[i];
            for j in 0..n {
                v += self.factor[(i, j)] * self.z[j];
            }
            out[i] = v;
        }
    }
}

/// Mean and standard error of a stream of values (Welford).
#[derive(Debug, Default, Clone, Copy)]
pub struct RunningMean {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMean {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sd() / (self.n as f64).sqrt()
        }
    }
}
