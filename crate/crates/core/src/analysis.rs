//! Registry-level computations shared by the command line and the HTTP service.
//!
//! Both front ends call these functions and render results with [`to_json`], so identical
//! inputs produce byte-identical output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::MetricSchema;
use crate::posterior::{
    joint_success_probability, posterior_update, summarize_at, Direction, PosteriorSummary,
    SuccessCondition, DEFAULT_LEVEL,
};
use crate::prior::{build_prior, MomentReport, Prior, ShrinkageLevel};
use crate::registry::Registry;
use crate::risk::{
    cells_to_csv, decision_space, expected_risks, Axis, DecisionReport, GridCell, LossSpec,
    SpaceSpec,
};
use crate::sim::posteriors_by_level;

/// Largest decision-space grid served in one request.
pub const MAX_GRID_POINTS: usize = 250_000;
pub const DEFAULT_JOINT_SAMPLES: usize = 10_000;

/// Pretty JSON used for every machine-readable output.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorOutput {
    pub k: ShrinkageLevel,
    pub before: Option<i64>,
    pub history_count: usize,
    pub metrics: Vec<String>,
    pub prior: Prior,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<MomentReport>,
}

/// Prior for an experiment finishing at `before` (`None` = after everything).
///
/// Without an explicit `schema` the history must share a single schema.
pub fn prior_for(
    reg: &Registry,
    before: Option<i64>,
    schema: Option<&MetricSchema>,
    k: ShrinkageLevel,
) -> Result<PriorOutput> {
    let schema = match schema {
        Some(s) => s.clone(),
        None => {
            let mut schemas = reg
                .records()
                .iter()
                .filter(|r| before.is_none_or(|b| r.timestamp < b))
                .map(|r| &r.schema);
            match schemas.next() {
                None => MetricSchema::default(),
                Some(first) => {
                    if schemas.any(|s| !s.matches(first)) {
                        return Err(Error::InvalidArgument(
                            "history mixes metric schemas; select one with --metrics".into(),
                        ));
                    }
                    first.clone()
                }
            }
        }
    };
    let history = reg.history(before, &schema);
    let prior = build_prior(&history, k)?;
    let report = prior
        .as_gaussian()
        .map(|g| MomentReport::new(&schema.names, g));
    Ok(PriorOutput {
        k,
        before,
        history_count: history.len(),
        metrics: schema.names,
        prior,
        report,
    })
}

/// Posterior of a registered experiment, with the prior built from strictly earlier records.
pub fn posterior_for(
    reg: &Registry,
    id: &str,
    k: ShrinkageLevel,
    level: f64,
) -> Result<PosteriorSummary> {
    let (rec, history) = reg.with_history(id)?;
    let prior = build_prior(&history, k)?;
    let post = posterior_update(&prior, &rec.x, &rec.sigma)?;
    Ok(summarize_at(&post, k, level)?.with_metrics(&rec.schema.names))
}

/// Posteriors of one experiment side by side across shrinkage levels.
pub fn compare_k(
    reg: &Registry,
    id: &str,
    levels: &[ShrinkageLevel],
    level: f64,
) -> Result<Vec<PosteriorSummary>> {
    let (rec, history) = reg.with_history(id)?;
    posteriors_by_level(&history, &rec, levels, level)
}

fn default_level() -> f64 {
    DEFAULT_LEVEL
}

fn default_k() -> ShrinkageLevel {
    ShrinkageLevel::ONE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecideRequest {
    pub experiment: String,
    #[serde(default = "default_k")]
    pub k: ShrinkageLevel,
    pub tradeoffs: Vec<f64>,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default = "default_level")]
    pub level: f64,
    /// Samples for the joint success probability; 0 skips it.
    #[serde(default = "default_joint_samples")]
    pub joint_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_joint_samples() -> usize {
    DEFAULT_JOINT_SAMPLES
}

/// Linear-loss decision for a registered experiment.
///
/// The joint success probability is `P(sign(lambda_j) * w_j > 0)` over metrics with a
/// nonzero trade-off.
pub fn decide(reg: &Registry, req: &DecideRequest) -> Result<DecisionReport> {
    let post = posterior_for(reg, &req.experiment, req.k, req.level)?;
    let loss = LossSpec::linear(req.tradeoffs.clone(), req.c0, req.c1)?;
    let mut report = expected_risks(&post, &loss, 0, req.seed)?;
    if req.joint_samples > 0 {
        let conditions: Vec<SuccessCondition> = req
            .tradeoffs
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != 0.0)
            .map(|(metric, l)| SuccessCondition {
                metric,
                direction: if *l > 0.0 {
                    Direction::Greater
                } else {
                    Direction::Less
                },
                threshold: 0.0,
            })
            .collect();
        report.joint_success = Some(joint_success_probability(
            &post.gaussian,
            &conditions,
            req.joint_samples,
            req.seed,
        )?);
    }
    Ok(report)
}

/// A grid axis addressed by metric name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAxis {
    pub metric: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceRequest {
    pub experiment: String,
    #[serde(default = "default_k")]
    pub k: ShrinkageLevel,
    pub axis1: NamedAxis,
    pub axis2: NamedAxis,
    /// Trade-offs for the non-axis metrics, in schema order over all metrics (axis entries
    /// are ignored). Missing means 0, i.e. only the axis metrics count.
    #[serde(default)]
    pub fixed: Option<Vec<f64>>,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default = "default_level")]
    pub level: f64,
}

impl SpaceRequest {
    pub fn points(&self) -> usize {
        self.axis1
            .values
            .len()
            .saturating_mul(self.axis2.values.len())
    }
}

/// A decision space over named axes; `grid` is row-major with `axis1` varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceResponse {
    pub experiment: String,
    pub k: ShrinkageLevel,
    pub axis1: String,
    pub axis2: String,
    pub rows: usize,
    pub cols: usize,
    /// Grid points where every trade-off was zero.
    pub skipped: usize,
    pub c0: f64,
    pub c1: f64,
    /// The posterior the grid was computed from.
    pub posterior: PosteriorSummary,
    pub grid: Vec<GridCell>,
}

impl SpaceResponse {
    pub fn to_csv(&self) -> Result<String> {
        cells_to_csv(&self.grid)
    }
}

pub fn space(reg: &Registry, req: &SpaceRequest) -> Result<SpaceResponse> {
    if req.points() > MAX_GRID_POINTS {
        return Err(Error::TooLarge {
            points: req.points(),
            limit: MAX_GRID_POINTS,
        });
    }
    let rec = reg
        .get(&req.experiment)
        .ok_or_else(|| Error::NotFound(req.experiment.clone()))?;
    let index = |name: &str| {
        rec.schema
            .index_of(name)
            .ok_or_else(|| Error::InvalidArgument(format!("experiment has no metric `{name}`")))
    };
    let (m1, m2) = (index(&req.axis1.metric)?, index(&req.axis2.metric)?);
    let fixed = req.fixed.clone().unwrap_or_else(|| vec![0.0; rec.dim()]);
    let post = posterior_for(reg, &req.experiment, req.k, req.level)?;
    let spec = SpaceSpec {
        axis1: Axis {
            metric: m1,
            values: req.axis1.values.clone(),
        },
        axis2: Axis {
            metric: m2,
            values: req.axis2.values.clone(),
        },
        fixed,
        c0: req.c0,
        c1: req.c1,
    };
    let space = decision_space(&post, &spec)?;
    Ok(SpaceResponse {
        experiment: req.experiment.clone(),
        k: req.k,
        axis1: req.axis1.metric.clone(),
        axis2: req.axis2.metric.clone(),
        rows: space.rows,
        cols: space.cols,
        skipped: space.skipped,
        c0: req.c0,
        c1: req.c1,
        posterior: post,
        grid: space.cells,
    })
}

/// Rounds to `digits` significant digits for display.
pub fn sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    if !(-4..6).contains(&magnitude) {
        format!("{:.*e}", digits - 1, v)
    } else {
        format!("{v:.decimals$}")
    }
}

/// Left-aligned plain-text table.
pub fn render_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(headers);
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// Prior means followed by the sd/correlation matrix.
pub fn prior_table(out: &PriorOutput) -> String {
    let Some(report) = &out.report else {
        return format!(
            "flat prior (k = {}, {} historical experiments): posterior equals the likelihood\n",
            out.k, out.history_count
        );
    };
    let mut s = format!(
        "prior (k = {}, {} historical experiments)\n\n",
        out.k, out.history_count
    );
    let rows: Vec<Vec<String>> = report
        .metrics
        .iter()
        .zip(&report.means)
        .map(|(m, v)| vec![m.clone(), sig(*v, 4)])
        .collect();
    s.push_str(&render_table(&["metric".into(), "mean".into()], &rows));
    s.push_str("\nsd on the diagonal, correlation off the diagonal\n");
    let mut headers = vec![String::new()];
    headers.extend(report.metrics.iter().cloned());
    let rows: Vec<Vec<String>> = report
        .metrics
        .iter()
        .zip(&report.transformed_cov)
        .map(|(m, row)| {
            std::iter::once(m.clone())
                .chain(row.iter().map(|v| sig(*v, 4)))
                .collect()
        })
        .collect();
    s.push_str(&render_table(&headers, &rows));
    s
}

/// Long-format rows `metric, k, est, low, high` for side-by-side comparisons.
pub fn compare_rows(posts: &[PosteriorSummary]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let Some(first) = posts.first() else {
        return rows;
    };
    for (j, metric) in first.metrics.iter().enumerate() {
        for p in posts {
            rows.push(vec![
                metric.clone(),
                p.k_used.to_string(),
                p.gaussian.mean[j].to_string(),
                p.intervals[j].low.to_string(),
                p.intervals[j].high.to_string(),
            ]);
        }
    }
    rows
}

pub const COMPARE_HEADERS: [&str; 5] = ["metric", "k", "est", "low", "high"];
