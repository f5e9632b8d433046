//! Line-delimited JSON feature records, one graph per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    SchemaError { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureRecord {
    pub graph_id: String,
    pub method: String,
    pub iterations: usize,
    pub dense: Vec<f64>,
    /// Class of the graph, when known; needed for classification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u32>,
}

pub fn write_records(mut w: impl Write, records: &[FeatureRecord]) -> Result<(), FeatureError> {
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(r: impl Read) -> Result<Vec<FeatureRecord>, FeatureError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| FeatureError::SchemaError {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_features(
    path: impl AsRef<Path>,
    records: &[FeatureRecord],
) -> Result<(), FeatureError> {
    write_records(BufWriter::new(File::create(path)?), records)
}

pub fn read_features(path: impl AsRef<Path>) -> Result<Vec<FeatureRecord>, FeatureError> {
    read_records(File::open(path)?)
}
