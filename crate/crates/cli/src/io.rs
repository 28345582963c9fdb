use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use nngfl::Graph;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Provenance attached to every JSON report.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub config: serde_json::Value,
    /// Input path to SHA-256 hex digest.
    pub inputs: BTreeMap<String, String>,
    pub version: &'static str,
    pub wall_time_s: f64,
}

/// Reads input files while recording their digests.
#[derive(Default)]
pub struct Inputs {
    digests: BTreeMap<String, String>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.digests
            .insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    fn rows(&mut self, path: &Path, header: bool) -> Result<Vec<Vec<f64>>, CliError> {
        let bytes = self.read(path)?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(header)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(bytes.as_slice());
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| {
                        CliError::Io(format!("{}: record {}: bad number {f:?}: {e}", path.display(), line + 1))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(row);
        }
        Ok(rows)
    }

    /// One value per line.
    pub fn vector(&mut self, path: &Path, header: bool) -> Result<Vec<f64>, CliError> {
        let rows = self.rows(path, header)?;
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != 1) {
            return Err(CliError::Io(format!(
                "{}: record {} has more than one value; vectors are one value per line",
                path.display(),
                i + 1
            )));
        }
        Ok(rows.into_iter().map(|r| r[0]).collect())
    }

    /// `d` rows of `N` comma-separated values.
    pub fn matrix(&mut self, path: &Path, header: bool) -> Result<Array2<f64>, CliError> {
        let rows = self.rows(path, header)?;
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || n == 0 {
            return Err(CliError::Io(format!("{}: empty matrix", path.display())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(CliError::Io(format!(
                "{}: record {} has {} columns, expected {n}",
                path.display(),
                i + 1,
                r.len()
            )));
        }
        let d = rows.len();
        Array2::from_shape_vec((d, n), rows.into_iter().flatten().collect())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn graph(&mut self, path: &Path) -> Result<Graph, CliError> {
        let bytes = self.read(path)?;
        let text = String::from_utf8(bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(Graph::parse_edge_list(&text)?)
    }

    pub fn finish(self) -> BTreeMap<String, String> {
        self.digests
    }
}

pub fn vector_csv(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn matrix_csv(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
