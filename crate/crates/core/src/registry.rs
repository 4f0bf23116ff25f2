//! Time-ordered experiment registry persisted as JSON Lines.
//!
//! [`Registry`] is an immutable-by-convention snapshot ordered by `(timestamp, id)`.
//! [`RegistryStore`] wraps a snapshot behind an `Arc` so readers never block each other:
//! a writer validates, appends one line to the backing file, then publishes a new snapshot.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{Error, Result};
use crate::experiment::{
    validate_record, ExperimentRecord, MetricSchema, ValidationResult, Violation,
};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    records: Vec<ExperimentRecord>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<I: IntoIterator<Item = ExperimentRecord>>(records: I) -> Result<Self> {
        let mut reg = Self::new();
        for r in records {
            reg.insert(r)?;
        }
        Ok(reg)
    }

    /// All records ordered by `(timestamp, id)`.
    pub fn records(&self) -> &[ExperimentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ExperimentRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.id.as_str()).collect()
    }

    /// Record validation plus the registry-level uniqueness check.
    pub fn check(&self, rec: &ExperimentRecord) -> ValidationResult {
        let mut res = validate_record(rec);
        if self.get(&rec.id).is_some() {
            res.violations
                .push(Violation::DuplicateId { id: rec.id.clone() });
        }
        res
    }

    pub fn insert(&mut self, rec: ExperimentRecord) -> Result<()> {
        if self.get(&rec.id).is_some() {
            return Err(Error::DuplicateId(rec.id));
        }
        validate_record(&rec).into_result()?;
        let pos = self
            .records
            .partition_point(|r| (r.timestamp, r.id.as_str()) < (rec.timestamp, rec.id.as_str()));
        self.records.insert(pos, rec);
        Ok(())
    }

    /// Records with `timestamp < before` (all records when `before` is `None`) whose
    /// schema matches `schema` exactly, in registry order.
    pub fn history(&self, before: Option<i64>, schema: &MetricSchema) -> Vec<ExperimentRecord> {
        self.records
            .iter()
            .filter(|r| before.is_none_or(|b| r.timestamp < b) && r.schema.matches(schema))
            .cloned()
            .collect()
    }

    /// The named record together with its strictly earlier, schema-matching history.
    pub fn with_history(&self, id: &str) -> Result<(ExperimentRecord, Vec<ExperimentRecord>)> {
        let rec = self
            .get(id)
            .ok_or_else(|| Error::NotFound(id.to_string()))?;
        Ok((rec.clone(), self.history(Some(rec.timestamp), &rec.schema)))
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut reg = Self::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: ExperimentRecord = serde_json::from_str(line)
                .map_err(|e| Error::Parse(format!("registry line {}: {e}", lineno + 1)))?;
            reg.insert(rec)?;
        }
        Ok(reg)
    }
}

/// Shared registry handle: concurrent snapshot readers, one writer at a time.
#[derive(Debug)]
pub struct RegistryStore {
    path: Option<PathBuf>,
    snapshot: RwLock<Arc<Registry>>,
    writer: Mutex<()>,
}

impl RegistryStore {
    pub fn in_memory(registry: Registry) -> Self {
        Self {
            path: None,
            snapshot: RwLock::new(Arc::new(registry)),
            writer: Mutex::new(()),
        }
    }

    /// Opens a JSONL registry; a missing file is an empty registry.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let registry = match File::open(&path) {
            Ok(f) => {
                let mut reg = Registry::new();
                for (lineno, line) in BufReader::new(f).lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let rec: ExperimentRecord = serde_json::from_str(&line).map_err(|e| {
                        Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1))
                    })?;
                    reg.insert(rec)?;
                }
                reg
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Registry::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            path: Some(path),
            snapshot: RwLock::new(Arc::new(registry)),
            writer: Mutex::new(()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn snapshot(&self) -> Arc<Registry> {
        Arc::clone(&self.snapshot.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Validates and durably appends a record, then publishes the new snapshot.
    pub fn append(&self, rec: ExperimentRecord) -> Result<()> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = (*self.snapshot()).clone();
        next.insert(rec.clone())?;
        if let Some(path) = &self.path {
            let mut line = serde_json::to_string(&rec)?;
            line.push('\n');
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            f.write_all(line.as_bytes())?;
            f.sync_data()?;
        }
        *self.snapshot.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn rec(id: &str, t: i64) -> ExperimentRecord {
        ExperimentRecord::new(
            id,
            t,
            MetricSchema::new(["M1"]),
            DVector::from_element(1, 1.0),
            DMatrix::identity(1, 1),
        )
    }

    #[test]
    fn append_and_list() {
        let mut r = Registry::new();
        r.insert(rec("E1", 0)).unwrap();
        assert_eq!(r.ids(), ["E1"]);
    }

    #[test]
    fn ordered_by_timestamp_then_id() {
        let mut r = Registry::new();
        r.insert(rec("E2", 5)).unwrap();
        r.insert(rec("E1", 3)).unwrap();
        r.insert(rec("E0", 5)).unwrap();
        assert_eq!(r.ids(), ["E1", "E0", "E2"]);
    }

    #[test]
    fn duplicate_id_rejected() {
        let mut r = Registry::new();
        r.insert(rec("E1", 0)).unwrap();
        assert!(matches!(r.insert(rec("E1", 9)), Err(Error::DuplicateId(_))));
        assert!(matches!(
            r.check(&rec("E1", 9)).violations[..],
            [Violation::DuplicateId { .. }]
        ));
    }

    #[test]
    fn history_is_strict_and_schema_filtered() {
        let schema = MetricSchema::new(["M1"]);
        assert!(Registry::new().history(None, &schema).is_empty());

        let mut r = Registry::from_records([rec("a", 1), rec("b", 2), rec("c", 3)]).unwrap();
        let ids = |v: Vec<ExperimentRecord>| v.into_iter().map(|r| r.id).collect::<Vec<_>>();
        assert_eq!(ids(r.history(Some(3), &schema)), ["a", "b"]);

        let mut other = rec("d", 0);
        other.schema = MetricSchema::new(["M2"]);
        r.insert(other).unwrap();
        assert_eq!(ids(r.history(None, &schema)), ["a", "b", "c"]);
        // reordered names do not match either
        let two = MetricSchema::new(["M2", "M1"]);
        assert!(r.history(None, &two).is_empty());
    }

    #[test]
    fn store_persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reg.jsonl");
        let store = RegistryStore::open(&path).unwrap();
        store.append(rec("E2", 5)).unwrap();
        store.append(rec("E1", 3)).unwrap();
        assert!(store.append(rec("E1", 3)).is_err());
        let reopened = RegistryStore::open(&path).unwrap();
        assert_eq!(reopened.snapshot().ids(), ["E1", "E2"]);
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    }

    #[test]
    fn snapshot_is_unaffected_by_later_writes() {
        let store = RegistryStore::in_memory(Registry::new());
        store.append(rec("E1", 1)).unwrap();
        let snap = store.snapshot();
        store.append(rec("E2", 2)).unwrap();
        assert_eq!(snap.len(), 1);
        assert_eq!(store.snapshot().len(), 2);
    }
}
