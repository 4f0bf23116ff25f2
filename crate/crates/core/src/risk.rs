//! Expected risks of launching versus rolling back, and trade-off decision spaces.
//!
//! With trade-offs `lambda` and posterior mean `tau`, the linear loss gives
//!
//! ```text
//! R(launch)   = -G(lambda)^T tau + c1
//! R(rollback) =  G(lambda)^T tau + c0
//! G(lambda)_i = (1 / lambda_i) / sum_j |1 / lambda_j|
//! ```
//!
//! Linear risks depend on the posterior mean only; the posterior covariance matters for
//! custom losses and joint success probabilities.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posterior::{JointProbability, PosteriorSummary};
use crate::sampling::{GaussianSampler, RunningMean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Rollback,
    Launch,
}

pub type LossFn = Arc<dyn Fn(Action, &[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum LossForm {
    Linear,
    /// Loss of an action given one draw of the true effects; risks are Monte Carlo averages.
    Custom(LossFn),
}

impl fmt::Debug for LossForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossForm::Linear => f.write_str("Linear"),
            LossForm::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Trade-offs between metrics plus the cost of each action.
///
/// `lambda_j` is the amount of metric `j` worth one reference unit of value; a negative
/// entry marks a metric where smaller is better, and 0 drops the metric from the loss.
#[derive(Debug, Clone)]
pub struct LossSpec {
    pub tradeoffs: Vec<f64>,
    /// Roll-back cost.
    pub c0: f64,
    /// Launch cost.
    pub c1: f64,
    pub form: LossForm,
}

impl LossSpec {
    pub fn linear(tradeoffs: Vec<f64>, c0: f64, c1: f64) -> Result<Self> {
        let spec = Self {
            tradeoffs,
            c0,
            c1,
            form: LossForm::Linear,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(tradeoffs: Vec<f64>, c0: f64, c1: f64, loss: LossFn) -> Result<Self> {
        let spec = Self {
            tradeoffs,
            c0,
            c1,
            form: LossForm::Custom(loss),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0.is_finite() && self.c1.is_finite()) {
            return Err(Error::InvalidArgument("costs must be finite".into()));
        }
        g_transform(&self.tradeoffs).map(|_| ())
    }

    pub fn weights(&self) -> Result<DVector<f64>> {
        g_transform(&self.tradeoffs)
    }
}

/// Reciprocal normalization of a trade-off vector; zero entries get zero weight.
///
/// The absolute values of the result sum to 1.
pub fn g_transform(lambda: &[f64]) -> Result<DVector<f64>> {
    if lambda.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("trade-offs must be finite".into()));
    }
    if lambda.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument(
            "trade-off vector is all zero".into(),
        ));
    }
    let recip: Vec<f64> = lambda
        .iter()
        .map(|&v| if v == 0.0 { 0.0 } else { 1.0 / v })
        .collect();
    let norm: f64 = recip.iter().map(|r| r.abs()).sum();
    Ok(DVector::from_iterator(
        lambda.len(),
        recip.iter().map(|r| r / norm),
    ))
}

/// Scales the valuation of `metric` up by `inflation`, raising its share of the weights.
///
/// Because weights are proportional to `1 / |lambda|`, this divides `lambda_metric` by
/// `inflation`.
pub fn guardrail(loss: &LossSpec, metric: usize, inflation: f64) -> Result<LossSpec> {
    if !(inflation > 0.0 && inflation.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "inflation must be positive, got {inflation}"
        )));
    }
    let lambda = *loss
        .tradeoffs
        .get(metric)
        .ok_or_else(|| Error::DimensionMismatch(format!("no metric {metric}")))?;
    if lambda == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "metric {metric} has zero trade-off"
        )));
    }
    let mut out = loss.clone();
    out.tradeoffs[metric] = lambda / inflation;
    Ok(out)
}

/// Absolute weight of `metric` after the G transform.
pub fn weight_share(loss: &LossSpec, metric: usize) -> Result<f64> {
    let w = loss.weights()?;
    w.get(metric)
        .map(|v| v.abs())
        .ok_or_else(|| Error::DimensionMismatch(format!("no metric {metric}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recommendation {
    Launch,
    Rollback,
}

impl Recommendation {
    /// Launch only on a strictly lower launch risk; ties roll back.
    pub fn from_risks(risk_launch: f64, risk_rollback: f64) -> Self {
        if risk_launch < risk_rollback {
            Recommendation::Launch
        } else {
            Recommendation::Rollback
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloDetail {
    pub samples: usize,
    pub seed: u64,
    pub se_launch: f64,
    pub se_rollback: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub risk_launch: f64,
    pub risk_rollback: f64,
    pub recommendation: Recommendation,
    pub tradeoffs: Vec<f64>,
    pub c0: f64,
    pub c1: f64,
    /// `G(lambda)`.
    pub weights: Vec<f64>,
    pub posterior: PosteriorSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloDetail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_success: Option<JointProbability>,
}

/// Closed-form `(R(launch), R(rollback))` for the linear loss.
pub fn linear_risks(tau: &DVector<f64>, weights: &DVector<f64>, c0: f64, c1: f64) -> (f64, f64) {
    let value = weights.dot(tau);
    (-value + c1, value + c0)
}

/// Posterior expected risks under `loss`.
///
/// `mc_samples` and `seed` are used only by custom losses.
pub fn expected_risks(
    post: &PosteriorSummary,
    loss: &LossSpec,
    mc_samples: usize,
    seed: u64,
) -> Result<DecisionReport> {
    let n = post.gaussian.dim();
    if loss.tradeoffs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} trade-offs for {n} metrics",
            loss.tradeoffs.len()
        )));
    }
    let weights = loss.weights()?;
    loss.validate()?;
    let (risk_launch, risk_rollback, monte_carlo) = match &loss.form {
        LossForm::Linear => {
            let (l, r) = linear_risks(&post.gaussian.mean, &weights, loss.c0, loss.c1);
            (l, r, None)
        }
        LossForm::Custom(f) => {
            if mc_samples < 2 {
                return Err(Error::InvalidArgument(
                    "custom losses need at least 2 samples".into(),
                ));
            }
            let mut sampler = GaussianSampler::new(&post.gaussian, seed);
            let mut w = vec![0.0; n];
            let (mut launch, mut rollback) = (RunningMean::default(), RunningMean::default());
            for draw in 0..mc_samples {
                sampler.draw_into(&mut w);
                let l = f(Action::Launch, &w);
                let r = f(Action::Rollback, &w);
                if !(l.is_finite() && r.is_finite()) {
                    return Err(Error::NonFiniteLoss { draw });
                }
                launch.push(l);
                rollback.push(r);
            }
            let detail = MonteCarloDetail {
                samples: mc_samples,
                seed,
                se_launch: launch.std_error(),
                se_rollback: rollback.std_error(),
            };
            (launch.mean(), rollback.mean(), Some(detail))
        }
    };
    Ok(DecisionReport {
        risk_launch,
        risk_rollback,
        recommendation: Recommendation::from_risks(risk_launch, risk_rollback),
        tradeoffs: loss.tradeoffs.clone(),
        c0: loss.c0,
        c1: loss.c1,
        weights: weights.iter().copied().collect(),
        posterior: post.clone(),
        monte_carlo,
        joint_success: None,
    })
}

/// The linear loss written as a per-draw callback, for use with [`LossForm::Custom`].
pub fn linear_loss_fn(weights: DVector<f64>, c0: f64, c1: f64) -> LossFn {
    Arc::new(move |action, w| {
        let value: f64 = weights.iter().zip(w).map(|(a, b)| a * b).sum();
        match action {
            Action::Launch => -value + c1,
            Action::Rollback => value + c0,
        }
    })
}

/// One trade-off axis of a decision space: a metric and the values its `lambda` takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub metric: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub axis1: Axis,
    pub axis2: Axis,
    /// Full trade-off vector; the two axis entries are overwritten per grid point.
    pub fixed: Vec<f64>,
    pub c0: f64,
    pub c1: f64,
}

impl SpaceSpec {
    pub fn len(&self) -> usize {
        self.axis1.values.len() * self.axis2.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridDecision {
    Launch,
    Rollback,
    /// All trade-offs were zero at this point.
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub lambda1: f64,
    pub lambda2: f64,
    pub risk_launch: Option<f64>,
    pub decision: GridDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionSpace {
    pub axis1_metric: usize,
    pub axis2_metric: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major: `axis1` values outer, `axis2` values inner.
    pub cells: Vec<GridCell>,
    pub skipped: usize,
}

impl DecisionSpace {
    pub fn to_csv(&self) -> Result<String> {
        cells_to_csv(&self.cells)
    }
}

/// Grid cells as CSV with header `lambda1,lambda2,risk_launch,decision`; skipped cells have an
/// empty risk.
pub fn cells_to_csv(cells: &[GridCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda1", "lambda2", "risk_launch", "decision"])?;
    for c in cells {
        let decision = match c.decision {
            GridDecision::Launch => "launch",
            GridDecision::Rollback => "rollback",
            GridDecision::Skipped => "skipped",
        };
        w.write_record([
            c.lambda1.to_string(),
            c.lambda2.to_string(),
            c.risk_launch.map(|r| r.to_string()).unwrap_or_default(),
            decision.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Launch/roll-back classification over a grid of trade-off pairs (linear loss).
///
/// Each point is classified exactly as [`expected_risks`] would for the assembled
/// trade-off vector, i.e. by `R(launch) < R(rollback)`; with `c0 = c1 = 0` that is the
/// sign of `R(launch)`.
pub fn decision_space(post: &PosteriorSummary, spec: &SpaceSpec) -> Result<DecisionSpace> {
    let n = post.gaussian.dim();
    if spec.fixed.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} fixed trade-offs for {n} metrics",
            spec.fixed.len()
        )));
    }
    if spec.axis1.metric >= n || spec.axis2.metric >= n {
        return Err(Error::DimensionMismatch("axis metric out of range".into()));
    }
    if spec.axis1.metric == spec.axis2.metric {
        return Err(Error::InvalidArgument(
            "axes must be distinct metrics".into(),
        ));
    }
    if spec.is_empty() {
        return Err(Error::InvalidArgument("grid is empty".into()));
    }
    if !(spec.c0.is_finite() && spec.c1.is_finite()) {
        return Err(Error::InvalidArgument("costs must be finite".into()));
    }
    let cols = spec.axis2.values.len();
    let cells: Vec<GridCell> = (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let lambda1 = spec.axis1.values[idx / cols];
            let lambda2 = spec.axis2.values[idx % cols];
            let mut lambda = spec.fixed.clone();
            lambda[spec.axis1.metric] = lambda1;
            lambda[spec.axis2.metric] = lambda2;
            match g_transform(&lambda) {
                Ok(weights) => {
                    let (rl, rr) = linear_risks(&post.gaussian.mean, &weights, spec.c0, spec.c1);
                    let decision = match Recommendation::from_risks(rl, rr) {
                        Recommendation::Launch => GridDecision::Launch,
                        Recommendation::Rollback => GridDecision::Rollback,
                    };
                    GridCell {
                        lambda1,
                        lambda2,
                        risk_launch: Some(rl),
                        decision,
                    }
                }
                Err(_) => GridCell {
                    lambda1,
                    lambda2,
                    risk_launch: None,
                    decision: GridDecision::Skipped,
                },
            }
        })
        .collect();
    let skipped = cells
        .iter()
        .filter(|c| c.decision == GridDecision::Skipped)
        .count();
    Ok(DecisionSpace {
        axis1_metric: spec.axis1.metric,
        axis2_metric: spec.axis2.metric,
        rows: spec.axis1.values.len(),
        cols,
        cells,
        skipped,
    })
}
