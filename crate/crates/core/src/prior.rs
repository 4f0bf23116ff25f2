//! Hierarchical prior for a new experiment's effects, pooled from earlier experiments.
//!
//! Model: `mu` flat, `w_i | mu ~ N(mu, Gamma)`, `x_i | w_i ~ N(w_i, Sigma_i)`, with
//! `Gamma = k * Theta_hat`. Integrating out `mu` given the history gives
//!
//! ```text
//! nu = sum_i (Sigma_i + Gamma)^-1 x_i        H = sum_i (Sigma_i + Gamma)^-1
//! mu | history ~ N(H^-1 nu, H^-1)
//! w_t | history ~ N(H^-1 nu, Gamma + H^-1)
//! ```
//!
//! `k = 0` pools every experiment into one shared effect; `k = inf` ignores history.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentRecord, Gaussian};
use crate::linalg::{self, serde_dense, RIDGE};

/// Shrinkage strength `k` in `Gamma = k * Theta_hat`; `Infinite` means no pooling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShrinkageLevel {
    Finite(f64),
    Infinite,
}

impl ShrinkageLevel {
    /// Complete pooling.
    pub const ZERO: Self = ShrinkageLevel::Finite(0.0);
    /// Moderate shrinkage (`Gamma = Theta_hat`).
    pub const ONE: Self = ShrinkageLevel::Finite(1.0);
    /// No shrinkage: the posterior is the likelihood.
    pub const INF: Self = ShrinkageLevel::Infinite;

    /// The three presets in order of increasing `k`.
    pub const PRESETS: [Self; 3] = [Self::ZERO, Self::ONE, Self::INF];

    pub fn finite(k: f64) -> Result<Self> {
        if k.is_nan() || k < 0.0 {
            return Err(Error::InvalidArgument(format!("k must be >= 0, got {k}")));
        }
        Ok(if k.is_infinite() {
            Self::Infinite
        } else {
            Self::Finite(k)
        })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(k) => *k,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ShrinkageLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(k) => write!(f, "{k}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ShrinkageLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinite),
            _ => {
                let k: f64 = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("k must be a number or `inf`, got {s:?}")))?;
                Self::finite(k)
            }
        }
    }
}

impl Serialize for ShrinkageLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(k) => s.serialize_f64(*k),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ShrinkageLevel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(k) => Self::finite(k),
            Raw::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Prior over the current experiment's effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Prior {
    /// Improper flat prior; the posterior equals the likelihood.
    Flat,
    Gaussian(Gaussian),
}

impl Prior {
    pub fn as_gaussian(&self) -> Option<&Gaussian> {
        match self {
            Prior::Flat => None,
            Prior::Gaussian(g) => Some(g),
        }
    }
}

/// Hyper-state of the hierarchical model for one shrinkage level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierParams {
    #[serde(with = "serde_dense::matrix")]
    pub theta_hat: DMatrix<f64>,
    #[serde(with = "serde_dense::matrix")]
    pub gamma: DMatrix<f64>,
    /// Mean precision `sum_i (Sigma_i + Gamma)^-1 x_i`.
    #[serde(with = "serde_dense::vector")]
    pub nu: DVector<f64>,
    /// Precision `H = sum_i (Sigma_i + Gamma)^-1` of the shared mean.
    #[serde(with = "serde_dense::matrix")]
    pub precision: DMatrix<f64>,
    pub history_count: usize,
}

fn history_dim(history: &[ExperimentRecord]) -> Result<usize> {
    let n = history.first().ok_or(Error::EmptyHistory)?.dim();
    for r in history {
        linalg::check_len(&r.x, n, &format!("x of `{}`", r.id))?;
        linalg::check_square(&r.sigma, n, &format!("sigma of `{}`", r.id))?;
    }
    Ok(n)
}

/// `Theta_hat = (1 / (t-1)) * sum_i x_i x_i^T`, uncentered.
///
/// When the minimum eigenvalue falls below `1e-8 * trace / n` a ridge of
/// `1e-8 * trace / n` is added to the diagonal. For an all-zero history the trace is
/// replaced by the mean trace of the records' covariances (or 1 if that is zero too).
pub fn empirical_theta(history: &[ExperimentRecord]) -> Result<DMatrix<f64>> {
    let n = history_dim(history)?;
    let mut theta = DMatrix::zeros(n, n);
    for r in history {
        theta += &r.x * r.x.transpose();
    }
    theta /= history.len() as f64;
    let theta = linalg::symmetrize(&theta);

    let mut scale = linalg::mean_diagonal(&theta);
    if scale <= 0.0 {
        scale = history
            .iter()
            .map(|r| linalg::mean_diagonal(&r.sigma))
            .sum::<f64>()
            / history.len() as f64;
        if scale <= 0.0 || !scale.is_finite() {
            scale = 1.0;
        }
    }
    let ridge = RIDGE * scale;
    if linalg::min_eigenvalue(&theta) < ridge {
        Ok(theta + DMatrix::identity(n, n) * ridge)
    } else {
        Ok(theta)
    }
}

/// Hyper-parameters for a finite `k`.
pub fn hier_params(history: &[ExperimentRecord], k: f64) -> Result<HierParams> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "k must be finite and >= 0, got {k}"
        )));
    }
    let n = history_dim(history)?;
    let theta_hat = empirical_theta(history)?;
    let gamma = if k == 0.0 {
        DMatrix::zeros(n, n)
    } else {
        &theta_hat * k
    };
    let mut nu = DVector::zeros(n);
    let mut precision = DMatrix::zeros(n, n);
    for r in history {
        let chol = linalg::cholesky_with_jitter(
            &(&r.sigma + &gamma),
            &format!("Sigma + Gamma for `{}`", r.id),
        )?;
        nu += chol.solve(&r.x);
        precision += chol.inverse();
    }
    Ok(HierParams {
        theta_hat,
        gamma,
        nu,
        precision: linalg::symmetrize(&precision),
        history_count: history.len(),
    })
}

impl HierParams {
    /// Distribution of the current experiment's effects: `N(H^-1 nu, Gamma + H^-1)`.
    pub fn prior(&self) -> Result<Gaussian> {
        let chol = linalg::cholesky_with_jitter(&self.precision, "pooled precision H")?;
        let mean = chol.solve(&self.nu);
        let cov = linalg::symmetrize(&(&self.gamma + chol.inverse()));
        Ok(Gaussian { mean, cov })
    }
}

/// Prior from the historical records at shrinkage level `k`.
pub fn build_prior(history: &[ExperimentRecord], k: ShrinkageLevel) -> Result<Prior> {
    match k {
        ShrinkageLevel::Infinite => Ok(Prior::Flat),
        _ if history.is_empty() => Ok(Prior::Flat),
        ShrinkageLevel::Finite(k) => Ok(Prior::Gaussian(hier_params(history, k)?.prior()?)),
    }
}

/// Display-oriented view of a Gaussian: means, standard deviations and correlations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub metrics: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Standard deviations on the diagonal, correlations off the diagonal.
    pub transformed_cov: Vec<Vec<f64>>,
}

impl MomentReport {
    pub fn new(metrics: &[String], g: &Gaussian) -> Self {
        let sd = g.sd();
        let corr = g.correlation();
        let n = g.dim();
        Self {
            metrics: metrics.to_vec(),
            means: g.mean.iter().copied().collect(),
            sds: sd.iter().copied().collect(),
            transformed_cov: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { sd[i] } else { corr[(i, j)] })
                        .collect()
                })
                .collect(),
        }
    }
}
