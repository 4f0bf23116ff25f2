//! Simulation studies: MSE, coverage and interval width of the posterior across shrinkage
//! levels, on permutation nulls and synthetic hierarchical data, plus significance flips.
//!
//! Every experiment is scored against a prior built only from experiments with earlier
//! timestamps.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_sigma, child_rng, estimate_effects, BootstrapConfig};
use crate::error::{Error, Result};
use crate::experiment::{Arm, ExperimentRecord, MetricSchema, Provenance, UnitOutcomes};
use crate::linalg;
use crate::posterior::{posterior_update, summarize_at, PosteriorSummary, DEFAULT_LEVEL};
use crate::prior::{build_prior, ShrinkageLevel};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Unit-level data with real effects whose treatment labels are then shuffled.
    PermutationNull,
    /// `mu ~ N(0, mean_sd^2 I)`, `w_i ~ N(mu, Gamma_true)`, `x_i ~ N(w_i, Sigma_i)`.
    HierarchicalSynthetic,
    /// `x_i ~ N(0, Sigma_i)`: a null with an exactly Gaussian likelihood.
    GaussianNull,
}

/// Knobs of the synthetic generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    /// Standard deviation of each coordinate of the common mean `mu`.
    pub mean_sd: f64,
    /// Scale of the true between-experiment covariance `Gamma_true`.
    pub gamma_scale: f64,
    /// Scale of the per-experiment sampling covariances `Sigma_i`.
    pub sigma_scale: f64,
    /// Off-diagonal correlation of `Gamma_true` and of unit-level outcomes.
    pub correlation: f64,
    /// Per-metric magnitude multipliers (missing entries are 1).
    pub metric_scales: Vec<f64>,
    /// Units per arm for generated unit-level data.
    pub units_per_arm: usize,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            mean_sd: 1.0,
            gamma_scale: 0.25,
            sigma_scale: 4.0,
            correlation: 0.3,
            metric_scales: Vec::new(),
            units_per_arm: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub n_experiments: usize,
    pub n_metrics: usize,
    pub k_values: Vec<ShrinkageLevel>,
    pub seed: u64,
    pub generator: Generator,
    pub credible_level: f64,
    /// Bootstrap replicates for permutation-null covariances.
    pub bootstrap_replicates: usize,
    pub synthetic: SyntheticParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_experiments: 20,
            n_metrics: 3,
            k_values: ShrinkageLevel::PRESETS.to_vec(),
            seed: 0,
            generator: Generator::PermutationNull,
            credible_level: DEFAULT_LEVEL,
            bootstrap_replicates: 200,
            synthetic: SyntheticParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_experiments < 2 {
            return Err(Error::InvalidArgument("n_experiments must be >= 2".into()));
        }
        if self.n_metrics == 0 {
            return Err(Error::InvalidArgument("n_metrics must be >= 1".into()));
        }
        if self.k_values.is_empty() {
            return Err(Error::InvalidArgument("k_values is empty".into()));
        }
        let s = &self.synthetic;
        if !(s.sigma_scale > 0.0 && s.gamma_scale >= 0.0 && s.mean_sd >= 0.0) {
            return Err(Error::InvalidArgument(
                "synthetic scales must be non-negative (sigma_scale > 0)".into(),
            ));
        }
        if !(s.correlation > -1.0 / (self.n_metrics.max(2) - 1) as f64 && s.correlation < 1.0) {
            return Err(Error::InvalidArgument(
                "correlation makes the covariance indefinite".into(),
            ));
        }
        if self.generator == Generator::PermutationNull && s.units_per_arm < 2 {
            return Err(Error::InvalidArgument("units_per_arm must be >= 2".into()));
        }
        Ok(())
    }

    fn schema(&self) -> MetricSchema {
        MetricSchema::new((1..=self.n_metrics).map(|i| format!("M{i}")))
    }

    fn scale(&self, j: usize) -> f64 {
        self.synthetic.metric_scales.get(j).copied().unwrap_or(1.0)
    }

    /// `diag(scale) * C * diag(scale)` with constant off-diagonal correlation `C`.
    fn scaled_correlation(&self, variance: f64) -> DMatrix<f64> {
        let n = self.n_metrics;
        DMatrix::from_fn(n, n, |i, j| {
            let c = if i == j {
                1.0
            } else {
                self.synthetic.correlation
            };
            variance * c * self.scale(i) * self.scale(j)
        })
    }
}

/// A generated experiment together with its true effect.
#[derive(Debug, Clone, PartialEq)]
pub struct SimExperiment {
    pub record: ExperimentRecord,
    pub truth: DVector<f64>,
}

/// Unit-level data for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitExperiment {
    pub id: String,
    pub timestamp: i64,
    pub schema: MetricSchema,
    pub units: Vec<UnitOutcomes>,
}

/// Seed for task `index` derived from a root seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    child_rng(seed, index).next_u64()
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

fn draw(rng: &mut ChaCha8Rng, mean: &DVector<f64>, cov: &DMatrix<f64>) -> DVector<f64> {
    mean + linalg::psd_factor(cov) * normal_vec(rng, mean.len())
}

/// Random PSD sampling covariance: `sigma_scale * u * D (A A^T / n + 0.25 I) D`, `u ~ U(0.5, 1.5)`.
fn random_sigma(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = cfg.n_metrics;
    let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let base: DMatrix<f64> = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.25;
    let u = rng.random_range(0.5..1.5);
    let scaled = DMatrix::from_fn(n, n, |i, j| base[(i, j)] * cfg.scale(i) * cfg.scale(j));
    linalg::symmetrize(&(scaled * (cfg.synthetic.sigma_scale * u)))
}

/// Replaces the arm labels of `units` in order.
pub fn relabel(units: &[UnitOutcomes], arms: &[Arm]) -> Result<Vec<UnitOutcomes>> {
    if units.len() != arms.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} units",
            arms.len(),
            units.len()
        )));
    }
    Ok(units
        .iter()
        .zip(arms)
        .map(|(u, &arm)| UnitOutcomes { arm, ..u.clone() })
        .collect())
}

/// Shuffles treatment labels within each experiment (preserving arm sizes) and re-estimates
/// `x` and its bootstrap covariance. The true effect of every returned record is zero.
pub fn permutation_null(
    data: &[UnitExperiment],
    seed: u64,
    replicates: usize,
) -> Result<Vec<ExperimentRecord>> {
    data.par_iter()
        .enumerate()
        .map(|(j, exp)| {
            let mut rng = child_rng(seed, 2 * j as u64);
            let mut arms: Vec<Arm> = exp.units.iter().map(|u| u.arm).collect();
            arms.shuffle(&mut rng);
            let units = relabel(&exp.units, &arms)?;
            let x = estimate_effects(&units)?;
            let cfg = BootstrapConfig {
                replicates,
                seed: derive_seed(seed, 2 * j as u64 + 1),
            };
            let sigma = bootstrap_sigma(&units, &cfg)?;
            let mut rec =
                ExperimentRecord::new(&exp.id, exp.timestamp, exp.schema.clone(), x, sigma);
            rec.provenance = Provenance::Bootstrapped;
            Ok(rec)
        })
        .collect()
}

/// Unit-level experiments with genuine (nonzero) effects, for shuffling into nulls.
pub fn synthetic_units(cfg: &SimConfig) -> Vec<UnitExperiment> {
    let schema = cfg.schema();
    let n = cfg.n_metrics;
    let outcome_cov = cfg
        .scaled_correlation(cfg.synthetic.sigma_scale * cfg.synthetic.units_per_arm as f64 / 2.0);
    let gamma = cfg.scaled_correlation(cfg.synthetic.gamma_scale);
    let mut root = child_rng(cfg.seed, u64::MAX);
    let mu = DVector::from_iterator(
        n,
        (0..n).map(|j| {
            let z: f64 = StandardNormal.sample(&mut root);
            z * cfg.synthetic.mean_sd * cfg.scale(j)
        }),
    );
    (0..cfg.n_experiments)
        .map(|i| {
            let mut rng = child_rng(cfg.seed, i as u64);
            let effect = draw(&mut rng, &mu, &gamma);
            let zero = DVector::zeros(n);
            let mut units = Vec::with_capacity(2 * cfg.synthetic.units_per_arm);
            for (arm, shift) in [(Arm::Treatment, &effect), (Arm::Control, &zero)] {
                for u in 0..cfg.synthetic.units_per_arm {
                    let y = draw(&mut rng, shift, &outcome_cov);
                    units.push(UnitOutcomes::new(
                        format!("{}{u}", &arm.as_str()[..1]),
                        arm,
                        y.iter().copied().collect(),
                    ));
                }
            }
            UnitExperiment {
                id: format!("sim-{i:04}"),
                timestamp: i as i64,
                schema: schema.clone(),
                units,
            }
        })
        .collect()
}

/// Draws the experiments for `cfg.generator`.
pub fn generate(cfg: &SimConfig) -> Result<Vec<SimExperiment>> {
    cfg.validate()?;
    let n = cfg.n_metrics;
    match cfg.generator {
        Generator::PermutationNull => {
            let data = synthetic_units(cfg);
            let records = permutation_null(
                &data,
                derive_seed(cfg.seed, u64::MAX - 1),
                cfg.bootstrap_replicates,
            )?;
            Ok(records
                .into_iter()
                .map(|record| SimExperiment {
                    record,
                    truth: DVector::zeros(n),
                })
                .collect())
        }
        Generator::HierarchicalSynthetic | Generator::GaussianNull => {
            let schema = cfg.schema();
            let gamma = cfg.scaled_correlation(cfg.synthetic.gamma_scale);
            let mut root = child_rng(cfg.seed, u64::MAX);
            let mu = DVector::from_iterator(
                n,
                (0..n).map(|j| {
                    let z: f64 = StandardNormal.sample(&mut root);
                    z * cfg.synthetic.mean_sd * cfg.scale(j)
                }),
            );
            Ok((0..cfg.n_experiments)
                .map(|i| {
                    let mut rng = child_rng(cfg.seed, i as u64);
                    let truth = match cfg.generator {
                        Generator::GaussianNull => DVector::zeros(n),
                        _ => draw(&mut rng, &mu, &gamma),
                    };
                    let sigma = random_sigma(cfg, &mut rng);
                    let x = draw(&mut rng, &truth, &sigma);
                    let record = ExperimentRecord::new(
                        format!("sim-{i:04}"),
                        i as i64,
                        schema.clone(),
                        x,
                        sigma,
                    );
                    SimExperiment { record, truth }
                })
                .collect())
        }
    }
}

/// Scores for one shrinkage level; vectors are indexed by metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScores {
    pub k: ShrinkageLevel,
    pub mse: Vec<f64>,
    pub coverage: Vec<f64>,
    pub interval_width: Vec<f64>,
    /// Fraction of intervals excluding zero.
    pub significance_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub generator: Option<Generator>,
    pub seed: u64,
    pub n_experiments: usize,
    pub metrics: Vec<String>,
    pub levels: Vec<LevelScores>,
}

impl SimReport {
    pub fn level(&self, k: ShrinkageLevel) -> Option<&LevelScores> {
        self.levels.iter().find(|l| l.k == k)
    }

    /// Long-format table: `k,metric,mse,coverage,interval_width,significance_rate`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "k",
            "metric",
            "mse",
            "coverage",
            "interval_width",
            "significance_rate",
        ])?;
        for l in &self.levels {
            for (j, m) in self.metrics.iter().enumerate() {
                w.write_record([
                    l.k.to_string(),
                    m.clone(),
                    l.mse[j].to_string(),
                    l.coverage[j].to_string(),
                    l.interval_width[j].to_string(),
                    l.significance_rate[j].to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Posterior of `current` for each level, with the prior pooled from `history`.
pub fn posteriors_by_level(
    history: &[ExperimentRecord],
    current: &ExperimentRecord,
    levels: &[ShrinkageLevel],
    credible_level: f64,
) -> Result<Vec<PosteriorSummary>> {
    levels
        .iter()
        .map(|&k| {
            let prior = build_prior(history, k)?;
            let post = posterior_update(&prior, &current.x, &current.sigma)?;
            Ok(summarize_at(&post, k, credible_level)?.with_metrics(&current.schema.names))
        })
        .collect()
}

/// Scores experiments (in timestamp order) against their known true effects.
pub fn evaluate(
    experiments: &[SimExperiment],
    levels: &[ShrinkageLevel],
    credible_level: f64,
) -> Result<SimReport> {
    let first = experiments.first().ok_or(Error::EmptyHistory)?;
    let schema = first.record.schema.clone();
    let n = schema.len();
    let mut sorted: Vec<&SimExperiment> = experiments.iter().collect();
    sorted.sort_by(|a, b| {
        (a.record.timestamp, &a.record.id).cmp(&(b.record.timestamp, &b.record.id))
    });
    let records: Vec<ExperimentRecord> = sorted.iter().map(|e| e.record.clone()).collect();

    let per_experiment: Vec<Vec<PosteriorSummary>> = sorted
        .par_iter()
        .map(|e| {
            let history: Vec<ExperimentRecord> = records
                .iter()
                .filter(|r| r.timestamp < e.record.timestamp && r.schema.matches(&e.record.schema))
                .cloned()
                .collect();
            posteriors_by_level(&history, &e.record, levels, credible_level)
        })
        .collect::<Result<_>>()?;

    let count = sorted.len() as f64;
    let levels_out = levels
        .iter()
        .enumerate()
        .map(|(li, &k)| {
            let mut s = LevelScores {
                k,
                mse: vec![0.0; n],
                coverage: vec![0.0; n],
                interval_width: vec![0.0; n],
                significance_rate: vec![0.0; n],
            };
            for (e, posts) in sorted.iter().zip(&per_experiment) {
                let p = &posts[li];
                for j in 0..n {
                    let err = p.gaussian.mean[j] - e.truth[j];
                    s.mse[j] += err * err;
                    s.coverage[j] += f64::from(u8::from(p.intervals[j].contains(e.truth[j])));
                    s.interval_width[j] += p.intervals[j].width();
                    s.significance_rate[j] += f64::from(u8::from(p.significant[j]));
                }
            }
            for v in [
                &mut s.mse,
                &mut s.coverage,
                &mut s.interval_width,
                &mut s.significance_rate,
            ] {
                v.iter_mut().for_each(|x| *x /= count);
            }
            s
        })
        .collect();
    Ok(SimReport {
        generator: None,
        seed: 0,
        n_experiments: sorted.len(),
        metrics: schema.names,
        levels: levels_out,
    })
}

/// Generates data for `cfg` and scores every requested shrinkage level.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimReport> {
    let experiments = generate(cfg)?;
    let mut report = evaluate(&experiments, &cfg.k_values, cfg.credible_level)?;
    report.generator = Some(cfg.generator);
    report.seed = cfg.seed;
    Ok(report)
}

/// Shuffles supplied unit-level experiments into nulls and scores them.
pub fn run_permutation_simulation(cfg: &SimConfig, data: &[UnitExperiment]) -> Result<SimReport> {
    let records = permutation_null(data, cfg.seed, cfg.bootstrap_replicates)?;
    let experiments: Vec<SimExperiment> = records
        .into_iter()
        .map(|record| {
            let n = record.dim();
            SimExperiment {
                record,
                truth: DVector::zeros(n),
            }
        })
        .collect();
    let mut report = evaluate(&experiments, &cfg.k_values, cfg.credible_level)?;
    report.generator = Some(Generator::PermutationNull);
    report.seed = cfg.seed;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipDirection {
    InsignificantToSignificant,
    SignificantToInsignificant,
}

/// Point estimate and interval in the `EST, CIL, CIR` layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub est: f64,
    pub low: f64,
    pub high: f64,
}

impl Estimate {
    fn of(p: &PosteriorSummary, j: usize) -> Self {
        Self {
            est: p.gaussian.mean[j],
            low: p.intervals[j].low,
            high: p.intervals[j].high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipRow {
    pub experiment: String,
    pub treatment_label: Option<String>,
    pub metric: String,
    pub direction: FlipDirection,
    pub k_a: ShrinkageLevel,
    pub k_b: ShrinkageLevel,
    pub a: Estimate,
    pub b: Estimate,
    pub summary_a: PosteriorSummary,
    pub summary_b: PosteriorSummary,
}

/// Every (experiment, metric) whose significance differs between `k_a` and `k_b`.
///
/// Direction is read from `k_a` to `k_b`.
pub fn flip_report(
    registry: &Registry,
    k_a: ShrinkageLevel,
    k_b: ShrinkageLevel,
    credible_level: f64,
) -> Result<Vec<FlipRow>> {
    if k_a == k_b {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for rec in registry.records() {
        let history = registry.history(Some(rec.timestamp), &rec.schema);
        let mut posts = posteriors_by_level(&history, rec, &[k_a, k_b], credible_level)?;
        let summary_b = posts.pop().expect("two levels");
        let summary_a = posts.pop().expect("two levels");
        for (j, metric) in rec.schema.names.iter().enumerate() {
            let (sa, sb) = (summary_a.significant[j], summary_b.significant[j]);
            if sa == sb {
                continue;
            }
            rows.push(FlipRow {
                experiment: rec.id.clone(),
                treatment_label: rec.treatment_label.clone(),
                metric: metric.clone(),
                direction: if sb {
                    FlipDirection::InsignificantToSignificant
                } else {
                    FlipDirection::SignificantToInsignificant
                },
                k_a,
                k_b,
                a: Estimate::of(&summary_a, j),
                b: Estimate::of(&summary_b, j),
                summary_a: summary_a.clone(),
                summary_b: summary_b.clone(),
            });
        }
    }
    Ok(rows)
}

/// Flip rows as CSV with one `est, cil, cir` block per shrinkage level.
pub fn flips_to_csv(rows: &[FlipRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "treatment",
        "metric",
        "direction",
        "k_a",
        "est_a",
        "cil_a",
        "cir_a",
        "k_b",
        "est_b",
        "cil_b",
        "cir_b",
    ])?;
    for r in rows {
        let dir = match r.direction {
            FlipDirection::InsignificantToSignificant => "insignificant_to_significant",
            FlipDirection::SignificantToInsignificant => "significant_to_insignificant",
        };
        w.write_record([
            r.experiment.clone(),
            r.treatment_label.clone().unwrap_or_default(),
            r.metric.clone(),
            dir.to_string(),
            r.k_a.to_string(),
            r.a.est.to_string(),
            r.a.low.to_string(),
            r.a.high.to_string(),
            r.k_b.to_string(),
            r.b.est.to_string(),
            r.b.low.to_string(),
            r.b.high.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
