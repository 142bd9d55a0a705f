//! Append-only JSON-lines run store: one [`RunRecord`] per line.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use thiserror::Error;
use uuid::Uuid;

use crate::record::RunRecord;

/// Environment variable that overrides the store location.
pub const STORE_ENV: &str = "QACCEL_STORE";

/// Store file used when neither a flag nor the environment names one.
pub const DEFAULT_STORE: &str = "qaccel-runs.jsonl";

static APPEND_LOCK: Mutex<()> = Mutex::new(());

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot serialize record: {0}")]
    Serialize(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filter {
    pub run_id: Option<Uuid>,
    pub circuit_hash: Option<String>,
    pub since: Option<DateTime<Utc>>,
    pub until: Option<DateTime<Utc>>,
}

impl Filter {
    pub fn matches(&self, r: &RunRecord) -> bool {
        self.run_id.is_none_or(|id| r.run_id == id)
            && self.circuit_hash.as_ref().is_none_or(|h| &r.circuit_hash == h)
            && self.since.is_none_or(|t| r.timestamp >= t)
            && self.until.is_none_or(|t| r.timestamp <= t)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryResult {
    pub records: Vec<RunRecord>,
    /// Lines that failed to parse and were skipped.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Store {
    path: PathBuf,
}

impl Store {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, source: io::Error) -> StoreError {
        StoreError::Io {
            path: self.path.clone(),
            source,
        }
    }

    pub fn append(&self, record: &RunRecord) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let _guard = APPEND_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| self.io(e))?;
        file.write_all(line.as_bytes()).map_err(|e| self.io(e))
    }

    /// Matching records in file order. A missing store reads as empty.
    pub fn query(&self, filter: &Filter) -> Result<QueryResult, StoreError> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(QueryResult::default()),
            Err(e) => return Err(self.io(e)),
        };
        let mut result = QueryResult::default();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| self.io(e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<RunRecord>(&line) {
                Ok(r) if filter.matches(&r) => result.records.push(r),
                Ok(_) => {}
                Err(_) => result.skipped += 1,
            }
        }
        Ok(result)
    }
}
