//! File formats for the stage handoffs.
//!
//! Every artifact is self-describing (schema name + version up front) and
//! written in a canonical form — fixed ordering, fixed number formatting —
//! so re-running a stage on unchanged inputs reproduces the output byte for
//! byte. Formats:
//!
//! | artifact   | format       | schema                       |
//! |------------|--------------|------------------------------|
//! | histories  | JSON lines   | `wikiprofiles/histories` v1  |
//! | features   | CSV          | `wikiprofiles/features` v1   |
//! | labels     | CSV          | `wikiprofiles/labels` v1     |
//! | clustering | JSON         | `wikiprofiles/clustering` v1 |
//! | interpret  | JSON         | `wikiprofiles/interpret` v1  |
//! | dendrogram | CSV + Newick | export only                  |

mod clustering;
mod dendrogram;
mod features;
mod histories;
mod labels;

pub use clustering::{read_clustering, write_clustering, ClusteringFile, CLUSTERING_SCHEMA};
pub use dendrogram::{dendrogram_csv, dendrogram_newick};
pub use features::{read_features, write_features, FeatureRow};
pub use histories::{read_histories, write_histories, HISTORIES_SCHEMA};
pub use labels::{read_labels, write_labels};

use std::path::Path;

use crate::interpret::ProfileReport;
use crate::stats::PcaModel;
use crate::{Error, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// The `interpret` stage artifact: cluster profiles plus the PCA model and
/// the first three principal coordinates of every contributor.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InterpretFile {
    pub schema: String,
    pub version: u32,
    pub profile: ProfileReport,
    pub pca: PcaModel,
    /// Per contributor (feature-table row order), coordinates along the
    /// first three principal components.
    pub projections: Vec<Vec<f64>>,
}

pub const INTERPRET_SCHEMA: &str = "wikiprofiles/interpret";

pub fn write_interpret(path: &Path, file: &InterpretFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file).expect("interpret file serializes");
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_interpret(path: &Path) -> Result<InterpretFile> {
    let text = read_to_string(path)?;
    let deserializer = &mut serde_json::Deserializer::from_str(&text);
    let file: InterpretFile = serde_path_to_error::deserialize(deserializer).map_err(|e| {
        Error::schema(
            path.display().to_string(),
            e.inner().line() as u64,
            e.path().to_string(),
            e.inner().to_string(),
        )
    })?;
    if file.schema != INTERPRET_SCHEMA || file.version != 1 {
        return Err(Error::schema(
            path.display().to_string(),
            1,
            "schema",
            format!(
                "expected {INTERPRET_SCHEMA} v1, found {} v{}",
                file.schema, file.version
            ),
        ));
    }
    Ok(file)
}
