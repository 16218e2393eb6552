//! JSON serialization of a clustering result.
//!
//! One pretty-printed JSON object per file. `medoids` are 0-based row
//! indices into the feature table the clustering ran on; `assignment[i]` is
//! the 1-based rank of row i's medoid within `medoids`; `contributors`
//! repeats the table's keys so the artifact stands alone; `validation` is
//! the per-k diagnostic sweep behind the chosen k.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::KDiagnostic;
use crate::{Error, Result};

pub const CLUSTERING_SCHEMA: &str = "wikiprofiles/clustering";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringFile {
    pub schema: String,
    pub version: u32,
    pub k: usize,
    pub medoids: Vec<usize>,
    pub assignment: Vec<u32>,
    pub avg_silhouette: f64,
    pub within_ss: f64,
    pub validation: Vec<KDiagnostic>,
    pub contributors: Vec<String>,
}

impl ClusteringFile {
    fn check(&self, display: &str) -> Result<()> {
        let fail = |field: &str, message: String| Err(Error::schema(display, 0, field, message));
        if self.schema != CLUSTERING_SCHEMA || self.version != 1 {
            return fail(
                "schema",
                format!(
                    "expected {CLUSTERING_SCHEMA} v1, found {} v{}",
                    self.schema, self.version
                ),
            );
        }
        let n = self.contributors.len();
        if self.assignment.len() != n {
            return fail(
                "assignment",
                format!("{} entries for {n} contributors", self.assignment.len()),
            );
        }
        if self.medoids.len() != self.k {
            return fail(
                "medoids",
                format!("{} medoids for k = {}", self.medoids.len(), self.k),
            );
        }
        if !self.medoids.is_sorted() || self.medoids.iter().any(|&m| m >= n) {
            return fail(
                "medoids",
                "medoids must be ascending row indices below n".into(),
            );
        }
        if self
            .assignment
            .iter()
            .any(|&a| a == 0 || a as usize > self.k)
        {
            return fail("assignment", format!("labels must lie in 1..={}", self.k));
        }
        Ok(())
    }
}

pub fn write_clustering(path: &Path, file: &ClusteringFile) -> Result<()> {
    file.check(&path.display().to_string())?;
    let mut text = serde_json::to_string_pretty(file).expect("clustering file serializes");
    text.push('\n');
    super::write_bytes(path, text.as_bytes())
}

pub fn read_clustering(path: &Path) -> Result<ClusteringFile> {
    let text = super::read_to_string(path)?;
    let display = path.display().to_string();
    let deserializer = &mut serde_json::Deserializer::from_str(&text);
    let file: ClusteringFile = serde_path_to_error::deserialize(deserializer).map_err(|e| {
        Error::schema(
            &display,
            e.inner().line() as u64,
            e.path().to_string(),
            e.inner().to_string(),
        )
    })?;
    file.check(&display)?;
    Ok(file)
}
