//! Independent oracles and random instance generators shared by the integration tests.
#![allow(dead_code)]

use launch_decision::{ExperimentRecord, MetricSchema};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn schema(n: usize) -> MetricSchema {
    MetricSchema::new((1..=n).map(|i| format!("M{i}")))
}

/// `A A^T + ridge * I` with standard normal `A`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, ridge: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let m = &a * a.transpose() + DMatrix::identity(n, n) * ridge;
    (&m + m.transpose()) * 0.5
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

pub fn random_record(rng: &mut ChaCha8Rng, id: usize, n: usize) -> ExperimentRecord {
    let x = random_vec(rng, n, 2.0);
    let sigma = random_spd(rng, n, 0.5);
    ExperimentRecord::new(format!("E{id}"), id as i64, schema(n), x, sigma)
}

/// Fixed-effect (complete pooling) estimate via explicit LU inverses:
/// mean `(sum S_i^-1)^-1 sum S_i^-1 x_i`, covariance `(sum S_i^-1)^-1`.
pub fn fixed_effect_pool(history: &[ExperimentRecord]) -> (DVector<f64>, DMatrix<f64>) {
    let n = history[0].dim();
    let mut precision = DMatrix::zeros(n, n);
    let mut info = DVector::zeros(n);
    for r in history {
        let inv = r.sigma.clone().try_inverse().expect("invertible");
        info += &inv * &r.x;
        precision += inv;
    }
    let cov = precision.try_inverse().expect("invertible");
    (&cov * info, cov)
}

fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let inner: f64 = values.iter().sum();
    h * (inner - 0.5 * (values[0] + values[values.len() - 1]))
}

/// A 1-D hierarchical problem: history `(x_i, var_i)`, current `(x_t, var_t)`, shrinkage `k`.
#[derive(Debug, Clone)]
pub struct OneDimCase {
    pub history: Vec<(f64, f64)>,
    pub current: (f64, f64),
    pub k: f64,
}

impl OneDimCase {
    pub fn random(rng: &mut ChaCha8Rng, k: f64) -> Self {
        let m = rng.random_range(0..=3);
        let draw_x = |rng: &mut ChaCha8Rng| {
            let mag = rng.random_range(0.5..3.0);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        };
        let history = (0..m)
            .map(|_| (draw_x(rng), rng.random_range(0.3..2.0)))
            .collect();
        let current = (draw_x(rng), rng.random_range(0.3..2.0));
        Self {
            history,
            current,
            k,
        }
    }

    pub fn records(&self) -> Vec<ExperimentRecord> {
        self.history
            .iter()
            .enumerate()
            .map(|(i, &(x, v))| {
                ExperimentRecord::new(
                    format!("h{i}"),
                    i as i64,
                    schema(1),
                    DVector::from_element(1, x),
                    DMatrix::from_element(1, 1, v),
                )
            })
            .collect()
    }

    /// Between-experiment variance `k * mean(x_i^2)`.
    pub fn gamma(&self) -> f64 {
        let m = self.history.len() as f64;
        self.k * self.history.iter().map(|(x, _)| x * x).sum::<f64>() / m
    }

    /// Posterior density of `w_t` on `grid`, by brute-force marginalization of the shared mean
    /// `mu` under a flat prior, with trapezoid integration over `mu` and normalization over `w_t`.
    pub fn numeric_posterior(&self, grid: &[f64], h: f64) -> Vec<f64> {
        let (xt, vt) = self.current;
        let unnorm: Vec<f64> = if self.history.is_empty() {
            grid.iter().map(|&w| normal_pdf(xt, w, vt)).collect()
        } else {
            let gamma = self.gamma();
            // likelihood of the history as a function of mu
            let hist_lik = |mu: f64, extra: f64| -> f64 {
                self.history
                    .iter()
                    .map(|&(x, v)| normal_pdf(x, mu, v + extra))
                    .product()
            };
            if gamma == 0.0 {
                grid.iter()
                    .map(|&w| normal_pdf(xt, w, vt) * hist_lik(w, 0.0))
                    .collect()
            } else {
                let mu_lik: Vec<f64> = grid.iter().map(|&mu| hist_lik(mu, gamma)).collect();
                // N(w; mu, gamma) depends only on the grid offset between w and mu
                let len = grid.len();
                let kernel: Vec<f64> = (0..2 * len - 1)
                    .map(|d| normal_pdf((d as f64 - (len - 1) as f64) * h, 0.0, gamma))
                    .collect();
                (0..len)
                    .map(|wi| {
                        let integrand: Vec<f64> = (0..len)
                            .map(|mi| kernel[wi + len - 1 - mi] * mu_lik[mi])
                            .collect();
                        normal_pdf(xt, grid[wi], vt) * trapezoid(&integrand, h)
                    })
                    .collect()
            }
        };
        let z = trapezoid(&unnorm, h);
        unnorm.iter().map(|v| v / z).collect()
    }
}

pub fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + i as f64 * h).collect()
}

pub fn gaussian_pdf_1d(w: f64, mean: f64, var: f64) -> f64 {
    normal_pdf(w, mean, var)
}

/// Every way to choose `k` of `n` items, as boolean masks.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).map(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}
