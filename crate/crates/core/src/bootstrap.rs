//! Difference-in-means effect estimates and their stratified bootstrap covariance.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{Arm, ExperimentRecord, MetricSchema, Provenance, UnitOutcomes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            seed: 0,
        }
    }
}

/// Child RNG for replicate `index`: same root seed, stream selected by the index.
///
/// Replicate `r` draws the same indices no matter how many replicates are requested.
pub fn child_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Arms<'a> {
    treatment: Vec<&'a [f64]>,
    control: Vec<&'a [f64]>,
    dim: usize,
}

fn split_arms(units: &[UnitOutcomes], min_per_arm: usize) -> Result<Arms<'_>> {
    let dim = units.first().map_or(0, |u| u.outcomes.len());
    if dim == 0 {
        return Err(Error::InvalidArgument("units carry no outcomes".into()));
    }
    if let Some(u) = units.iter().find(|u| u.outcomes.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "unit `{}` has {} outcomes, expected {dim}",
            u.unit_id,
            u.outcomes.len()
        )));
    }
    let pick = |arm| -> Vec<&[f64]> {
        units
            .iter()
            .filter(|u| u.arm == arm)
            .map(|u| u.outcomes.as_slice())
            .collect()
    };
    let arms = Arms {
        treatment: pick(Arm::Treatment),
        control: pick(Arm::Control),
        dim,
    };
    if arms.treatment.len() < min_per_arm {
        return Err(Error::InsufficientArm("treatment", min_per_arm));
    }
    if arms.control.len() < min_per_arm {
        return Err(Error::InsufficientArm("control", min_per_arm));
    }
    Ok(arms)
}

fn mean_into<'a>(rows: impl Iterator<Item = &'a [f64]>, count: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|v| *v /= count as f64);
}

/// Per-metric `mean(treatment) - mean(control)`.
pub fn estimate_effects(units: &[UnitOutcomes]) -> Result<DVector<f64>> {
    let arms = split_arms(units, 1)?;
    let mut t = vec![0.0; arms.dim];
    let mut c = vec![0.0; arms.dim];
    mean_into(arms.treatment.iter().copied(), arms.treatment.len(), &mut t);
    mean_into(arms.control.iter().copied(), arms.control.len(), &mut c);
    Ok(DVector::from_iterator(
        arms.dim,
        t.iter().zip(&c).map(|(a, b)| a - b),
    ))
}

fn replicate(arms: &Arms<'_>, mut rng: ChaCha8Rng) -> Vec<f64> {
    let mut t = vec![0.0; arms.dim];
    let mut c = vec![0.0; arms.dim];
    let nt = arms.treatment.len();
    let nc = arms.control.len();
    let t_idx: Vec<usize> = (0..nt).map(|_| rng.random_range(0..nt)).collect();
    let c_idx: Vec<usize> = (0..nc).map(|_| rng.random_range(0..nc)).collect();
    mean_into(t_idx.iter().map(|&i| arms.treatment[i]), nt, &mut t);
    mean_into(c_idx.iter().map(|&i| arms.control[i]), nc, &mut c);
    t.iter().zip(&c).map(|(a, b)| a - b).collect()
}

/// Bootstrap replicates of the effect estimate, resampling units with replacement within each arm.
pub fn bootstrap_replicates(
    units: &[UnitOutcomes],
    cfg: &BootstrapConfig,
) -> Result<Vec<Vec<f64>>> {
    if cfg.replicates < 2 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 2 replicates, got {}",
            cfg.replicates
        )));
    }
    let arms = split_arms(units, 2)?;
    Ok((0..cfg.replicates)
        .into_par_iter()
        .map(|r| replicate(&arms, child_rng(cfg.seed, r as u64)))
        .collect())
}

/// Empirical covariance (denominator `B - 1`) of the bootstrap replicates.
pub fn bootstrap_sigma(units: &[UnitOutcomes], cfg: &BootstrapConfig) -> Result<DMatrix<f64>> {
    let reps = bootstrap_replicates(units, cfg)?;
    Ok(sample_covariance(&reps))
}

/// Sample covariance of equal-length rows, accumulated in row order.
pub fn sample_covariance(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.first().map_or(0, Vec::len);
    let b = rows.len();
    let mut mean = vec![0.0; n];
    mean_into(rows.iter().map(Vec::as_slice), b, &mut mean);
    let mut cov = DMatrix::zeros(n, n);
    for row in rows {
        for i in 0..n {
            let di = row[i] - mean[i];
            for j in i..n {
                cov[(i, j)] += di * (row[j] - mean[j]);
            }
        }
    }
    let denom = (b - 1) as f64;
    for i in 0..n {
        for j in i..n {
            cov[(i, j)] /= denom;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    cov
}

/// Builds a registry record from unit-level data.
pub fn bootstrap_record(
    id: impl Into<String>,
    timestamp: i64,
    schema: MetricSchema,
    units: &[UnitOutcomes],
    cfg: &BootstrapConfig,
) -> Result<ExperimentRecord> {
    let x = estimate_effects(units)?;
    if x.len() != schema.len() {
        return Err(Error::DimensionMismatch(format!(
            "schema has {} metrics but units carry {}",
            schema.len(),
            x.len()
        )));
    }
    let sigma = bootstrap_sigma(units, cfg)?;
    let mut rec = ExperimentRecord::new(id, timestamp, schema, x, sigma);
    rec.provenance = Provenance::Bootstrapped;
    Ok(rec)
}
