//! Conjugate update of the hierarchical prior with the current experiment's likelihood.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::experiment::Gaussian;
use crate::linalg;
use crate::prior::{Prior, ShrinkageLevel};
use crate::sampling::GaussianSampler;

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Posterior `N(tau, Delta)` for effects with likelihood `x_t ~ N(w, Sigma_t)`.
///
/// A flat prior returns `(x_t, Sigma_t)` unchanged. Otherwise, with `S = Sigma_t + Omega`
/// factored once:
///
/// ```text
/// tau   = m0 + Omega S^-1 (x_t - m0)
/// Delta = Omega S^-1 Sigma_t          (= (Sigma_t^-1 + Omega^-1)^-1)
/// ```
pub fn posterior_update(
    prior: &Prior,
    x_t: &DVector<f64>,
    sigma_t: &DMatrix<f64>,
) -> Result<Gaussian> {
    let n = x_t.len();
    linalg::check_square(sigma_t, n, "sigma_t")?;
    linalg::cholesky_with_jitter(sigma_t, "sigma_t")?;
    match prior {
        Prior::Flat => Ok(Gaussian {
            mean: x_t.clone(),
            cov: sigma_t.clone(),
        }),
        Prior::Gaussian(p) => {
            linalg::check_len(&p.mean, n, "prior mean")?;
            linalg::check_square(&p.cov, n, "prior covariance")?;
            let omega = linalg::symmetrize(&p.cov);
            let sigma = linalg::symmetrize(sigma_t);
            let chol = linalg::cholesky_with_jitter(&(&sigma + &omega), "Sigma_t + Omega")?;
            let gain = chol.solve(&omega).transpose();
            let mean = &p.mean + &gain * (x_t - &p.mean);
            let cov = linalg::symmetrize(&(&omega * chol.solve(&sigma)));
            Ok(Gaussian { mean, cov })
        }
    }
}

/// Central credible interval for one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<String>,
    pub k_used: ShrinkageLevel,
    pub level: f64,
    #[serde(flatten)]
    pub gaussian: Gaussian,
    pub intervals: Vec<Interval>,
    /// Interval excludes zero.
    pub significant: Vec<bool>,
}

impl PosteriorSummary {
    pub fn with_metrics(mut self, names: &[String]) -> Self {
        self.metrics = names.to_vec();
        self
    }

    pub fn mean_width(&self) -> f64 {
        self.intervals.iter().map(Interval::width).sum::<f64>() / self.intervals.len().max(1) as f64
    }
}

/// Two-sided standard-normal quantile for a central interval at `level`.
pub fn normal_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "credible level must be in (0, 1), got {level}"
        )));
    }
    let std = Normal::standard();
    Ok(std.inverse_cdf(0.5 + level / 2.0))
}

pub fn summarize(post: &Gaussian, k: ShrinkageLevel) -> PosteriorSummary {
    summarize_at(post, k, DEFAULT_LEVEL).expect("default level is valid")
}

pub fn summarize_at(post: &Gaussian, k: ShrinkageLevel, level: f64) -> Result<PosteriorSummary> {
    let z = normal_quantile(level)?;
    let intervals: Vec<Interval> = post
        .mean
        .iter()
        .zip(post.sd().iter())
        .map(|(m, s)| Interval {
            low: m - z * s,
            high: m + z * s,
        })
        .collect();
    let significant = intervals.iter().map(|i| !i.contains(0.0)).collect();
    Ok(PosteriorSummary {
        metrics: Vec::new(),
        k_used: k,
        level,
        gaussian: post.clone(),
        intervals,
        significant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Greater,
    Less,
}

/// "Metric `metric` is greater (less) than `threshold`."
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessCondition {
    pub metric: usize,
    pub direction: Direction,
    pub threshold: f64,
}

impl SuccessCondition {
    pub fn holds(&self, w: &[f64]) -> bool {
        match self.direction {
            Direction::Greater => w[self.metric] > self.threshold,
            Direction::Less => w[self.metric] < self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbability {
    pub probability: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

pub const MIN_JOINT_SAMPLES: usize = 1000;

/// Monte Carlo estimate of the probability that every condition holds jointly.
pub fn joint_success_probability(
    post: &Gaussian,
    conditions: &[SuccessCondition],
    samples: usize,
    seed: u64,
) -> Result<JointProbability> {
    if samples < MIN_JOINT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "joint success probability needs at least {MIN_JOINT_SAMPLES} samples, got {samples}"
        )));
    }
    if let Some(c) = conditions.iter().find(|c| c.metric >= post.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "condition on metric {} of {}",
            c.metric,
            post.dim()
        )));
    }
    let mut sampler = GaussianSampler::new(post, seed);
    let mut w = vec![0.0; post.dim()];
    let mut hits = 0usize;
    for _ in 0..samples {
        sampler.draw_into(&mut w);
        if conditions.iter().all(|c| c.holds(&w)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(JointProbability {
        probability: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}
