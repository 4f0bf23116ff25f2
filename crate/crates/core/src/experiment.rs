//! Experiment domain types and record validation.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, serde_dense};

/// Relative tolerance for covariance symmetry, scaled by the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Minimum eigenvalue may dip to `-PSD_TOL * trace / n` before a covariance is rejected.
pub const PSD_TOL: f64 = 1e-10;

/// Ordered metric identifiers (with optional free-text units) for one experiment.
///
/// Two schemas match when their names are identical and in the same order; units are
/// informational only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetricSchema {
    pub names: Vec<String>,
    pub units: Vec<String>,
}

impl MetricSchema {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let units = vec![String::new(); names.len()];
        Self { names, units }
    }

    pub fn with_units<I, S>(mut self, units: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.units = units.into_iter().map(Into::into).collect();
        self.units.resize(self.names.len(), String::new());
        self
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn matches(&self, other: &MetricSchema) -> bool {
        self.names == other.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.names.is_empty() {
            out.push(Violation::EmptySchema);
        }
        let mut seen = HashSet::new();
        for (index, name) in self.names.iter().enumerate() {
            if name.trim().is_empty() {
                out.push(Violation::EmptyMetricName { index });
            } else if !seen.insert(name.as_str()) {
                out.push(Violation::DuplicateMetricName { name: name.clone() });
            }
        }
        out
    }
}

// On the wire a metric is either a bare name or `{"name": .., "unit": ..}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MetricEntry {
    Name(String),
    Full {
        name: String,
        #[serde(default)]
        unit: String,
    },
}

impl Serialize for MetricSchema {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<MetricEntry> = self
            .names
            .iter()
            .enumerate()
            .map(
                |(i, name)| match self.units.get(i).filter(|u| !u.is_empty()) {
                    Some(unit) => MetricEntry::Full {
                        name: name.clone(),
                        unit: unit.clone(),
                    },
                    None => MetricEntry::Name(name.clone()),
                },
            )
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricSchema {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<MetricEntry>::deserialize(d)?;
        let mut schema = MetricSchema::default();
        for e in entries {
            let (name, unit) = match e {
                MetricEntry::Name(n) => (n, String::new()),
                MetricEntry::Full { name, unit } => (name, unit),
            };
            schema.names.push(name);
            schema.units.push(unit);
        }
        Ok(schema)
    }
}

/// How a record's covariance was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Supplied,
    Bootstrapped,
}

/// One completed experiment: effect estimate `x` with its sampling covariance `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: String,
    /// Completion time in epoch seconds; the registry orders history by it.
    pub timestamp: i64,
    #[serde(rename = "metrics")]
    pub schema: MetricSchema,
    #[serde(with = "serde_dense::vector")]
    pub x: DVector<f64>,
    #[serde(with = "serde_dense::matrix")]
    pub sigma: DMatrix<f64>,
    #[serde(default)]
    pub treatment_label: Option<String>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ExperimentRecord {
    pub fn new(
        id: impl Into<String>,
        timestamp: i64,
        schema: MetricSchema,
        x: DVector<f64>,
        sigma: DMatrix<f64>,
    ) -> Self {
        Self {
            id: id.into(),
            timestamp,
            schema,
            x,
            sigma,
            treatment_label: None,
            provenance: Provenance::Supplied,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.treatment_label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn likelihood(&self) -> Gaussian {
        Gaussian {
            mean: self.x.clone(),
            cov: self.sigma.clone(),
        }
    }
}

/// A multivariate normal distribution in moment form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    #[serde(with = "serde_dense::vector")]
    pub mean: DVector<f64>,
    #[serde(with = "serde_dense::matrix")]
    pub cov: DMatrix<f64>,
}

impl Gaussian {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        linalg::check_square(&cov, mean.len(), "covariance")?;
        let bad = covariance_violations(&cov);
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sd(&self) -> DVector<f64> {
        self.cov.diagonal().map(|v| v.max(0.0).sqrt())
    }

    /// Correlation matrix; entries involving a zero-variance coordinate are 0 (1 on the diagonal).
    pub fn correlation(&self) -> DMatrix<f64> {
        let sd = self.sd();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                1.0
            } else if sd[i] > 0.0 && sd[j] > 0.0 {
                self.cov[(i, j)] / (sd[i] * sd[j])
            } else {
                0.0
            }
        })
    }

    /// Density at `w` (univariate or multivariate); `None` for a singular covariance.
    pub fn density(&self, w: &DVector<f64>) -> Option<f64> {
        let chol = nalgebra::Cholesky::new(linalg::symmetrize(&self.cov))?;
        let diff = w - &self.mean;
        let z = chol.l().solve_lower_triangular(&diff)?;
        let log_det: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0;
        let n = self.dim() as f64;
        Some((-0.5 * (z.dot(&z) + log_det + n * (2.0 * std::f64::consts::PI).ln())).exp())
    }
}

/// Treatment or control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Treatment,
    Control,
}

impl Arm {
    pub fn as_str(self) -> &'static str {
        match self {
            Arm::Treatment => "treatment",
            Arm::Control => "control",
        }
    }
}

impl std::str::FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "treatment" => Ok(Arm::Treatment),
            "control" => Ok(Arm::Control),
            other => Err(Error::Parse(format!(
                "arm must be \"treatment\" or \"control\", got {other:?}"
            ))),
        }
    }
}

/// Outcomes of one experimental unit on every metric.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitOutcomes {
    pub unit_id: String,
    pub arm: Arm,
    pub outcomes: Vec<f64>,
}

impl UnitOutcomes {
    pub fn new(unit_id: impl Into<String>, arm: Arm, outcomes: Vec<f64>) -> Self {
        Self {
            unit_id: unit_id.into(),
            arm,
            outcomes,
        }
    }
}

/// A single problem found by [`validate_record`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyId,
    DuplicateId {
        id: String,
    },
    EmptySchema,
    EmptyMetricName {
        index: usize,
    },
    DuplicateMetricName {
        name: String,
    },
    DimensionMismatch {
        metrics: usize,
        x: usize,
        sigma_rows: usize,
        sigma_cols: usize,
    },
    NonFinite {
        field: String,
    },
    Asymmetric {
        row: usize,
        col: usize,
        difference: f64,
    },
    NotPsd {
        min_eigenvalue: f64,
        tolerance: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyId => write!(f, "empty id"),
            Violation::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            Violation::EmptySchema => write!(f, "schema has no metrics"),
            Violation::EmptyMetricName { index } => write!(f, "metric {index} has an empty name"),
            Violation::DuplicateMetricName { name } => write!(f, "metric `{name}` appears twice"),
            Violation::DimensionMismatch { metrics, x, sigma_rows, sigma_cols } => write!(
                f,
                "dimension mismatch: {metrics} metrics, x has {x} entries, sigma is {sigma_rows}x{sigma_cols}"
            ),
            Violation::NonFinite { field } => write!(f, "{field} contains non-finite values"),
            Violation::Asymmetric { row, col, difference } => {
                write!(f, "sigma not symmetric at ({row}, {col}): difference {difference:e}")
            }
            Violation::NotPsd { min_eigenvalue, tolerance } => write!(
                f,
                "not PSD: minimum eigenvalue {min_eigenvalue:e} below -{tolerance:e}"
            ),
        }
    }
}

/// Outcome of [`validate_record`]: violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(self.violations))
        }
    }
}

/// Symmetry and positive-semidefiniteness checks for a square covariance.
pub fn covariance_violations(sigma: &DMatrix<f64>) -> Vec<Violation> {
    let mut out = Vec::new();
    if sigma.iter().any(|v| !v.is_finite()) {
        out.push(Violation::NonFinite {
            field: "sigma".into(),
        });
        return out;
    }
    let n = sigma.nrows();
    let scale = sigma.abs().max();
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (sigma[(i, j)] - sigma[(j, i)]).abs();
            if d > SYMMETRY_TOL * scale && worst.is_none_or(|w| d > w.2) {
                worst = Some((i, j, d));
            }
        }
    }
    if let Some((row, col, difference)) = worst {
        out.push(Violation::Asymmetric {
            row,
            col,
            difference,
        });
    }
    if n > 0 {
        let tolerance = PSD_TOL * linalg::mean_diagonal(sigma).max(0.0);
        let min_eigenvalue = linalg::min_eigenvalue(sigma);
        if min_eigenvalue < -tolerance {
            out.push(Violation::NotPsd {
                min_eigenvalue,
                tolerance,
            });
        }
    }
    out
}

/// Checks the intrinsic invariants of a record (uniqueness is checked by the registry).
pub fn validate_record(rec: &ExperimentRecord) -> ValidationResult {
    let mut violations = Vec::new();
    if rec.id.trim().is_empty() {
        violations.push(Violation::EmptyId);
    }
    violations.extend(rec.schema.violations());
    let n = rec.schema.len();
    if rec.x.len() != n || rec.sigma.nrows() != n || rec.sigma.ncols() != n {
        violations.push(Violation::DimensionMismatch {
            metrics: n,
            x: rec.x.len(),
            sigma_rows: rec.sigma.nrows(),
            sigma_cols: rec.sigma.ncols(),
        });
    }
    if rec.x.iter().any(|v| !v.is_finite()) {
        violations.push(Violation::NonFinite { field: "x".into() });
    }
    if rec.sigma.is_square() {
        violations.extend(covariance_violations(&rec.sigma));
    }
    ValidationResult { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(x: &[f64], sigma: &[f64], n: usize) -> ExperimentRecord {
        let names: Vec<String> = (0..x.len().max(n)).map(|i| format!("M{}", i + 1)).collect();
        ExperimentRecord::new(
            "E1",
            0,
            MetricSchema::new(names.into_iter().take(n)),
            DVector::from_row_slice(x),
            DMatrix::from_row_slice(n, n, sigma),
        )
    }

    #[test]
    fn identity_sigma_is_ok() {
        assert!(validate_record(&rec(&[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], 2)).is_ok());
    }

    #[test]
    fn indefinite_sigma_is_not_psd() {
        let v = validate_record(&rec(&[0.0, 0.0], &[1.0, 2.0, 2.0, 1.0], 2));
        assert_eq!(v.violations.len(), 1);
        match &v.violations[0] {
            Violation::NotPsd { min_eigenvalue, .. } => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(v.violations[0].to_string().contains("not PSD"));
    }

    #[test]
    fn length_mismatch_is_flagged() {
        let v = validate_record(&rec(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], 2));
        assert!(matches!(
            v.violations[0],
            Violation::DimensionMismatch { x: 3, .. }
        ));
        assert!(v.violations[0]
            .to_string()
            .starts_with("dimension mismatch"));
    }

    #[test]
    fn asymmetry_and_schema_problems() {
        let mut r = rec(&[0.0, 0.0], &[1.0, 0.5, 0.4, 1.0], 2);
        r.schema = MetricSchema::new(["a", "a"]);
        let v = validate_record(&r);
        assert!(v
            .violations
            .iter()
            .any(|x| matches!(x, Violation::Asymmetric { .. })));
        assert!(v
            .violations
            .iter()
            .any(|x| matches!(x, Violation::DuplicateMetricName { .. })));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_tolerated() {
        // eigenvalues {2, -1e-12}: within -1e-10 * trace / n
        let a = 1.0 - 0.5e-12;
        let r = rec(&[0.0, 0.0], &[1.0 - 0.5e-12, a, a, 1.0 - 0.5e-12], 2);
        assert!(validate_record(&r).is_ok());
    }

    #[test]
    fn metrics_accept_names_or_objects() {
        let json = r#"{"id":"E","timestamp":1,"metrics":["rev",{"name":"cost","unit":"$"}],
            "x":[1,2],"sigma":[[1,0],[0,1]],"treatment_label":null,"provenance":"bootstrapped"}"#;
        let r: ExperimentRecord = serde_json::from_str(json).unwrap();
        assert_eq!(r.schema.names, ["rev", "cost"]);
        assert_eq!(r.schema.units, ["", "$"]);
        assert_eq!(r.provenance, Provenance::Bootstrapped);
        let back = serde_json::to_string(&r).unwrap();
        assert!(back.contains(r#""metrics":["rev",{"name":"cost","unit":"$"}]"#));
    }

    #[test]
    fn sigma_is_row_major_on_the_wire() {
        let r = rec(&[0.0, 0.0], &[1.0, 0.25, 0.25, 2.0], 2);
        let mut r = r;
        r.sigma[(0, 1)] = 0.5;
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""sigma":[[1.0,0.5],[0.25,2.0]]"#), "{s}");
    }
}
