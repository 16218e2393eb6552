//! Column standardization of feature matrices.

use super::{FeatureVector, FEATURE_NAMES};
use crate::{Error, Result};

/// A row-major n×d matrix of z-scored features, together with the column
/// means and sample standard deviations needed to invert the scaling.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StandardizedMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl StandardizedMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Map one standardized row back to original units.
    pub fn inverse_row(&self, row: &[f64]) -> Vec<f64> {
        assert_eq!(row.len(), self.n_cols);
        row.iter()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(z, (m, s))| z * s + m)
            .collect()
    }

    /// Standardize raw rows with explicit column names for error reporting.
    pub fn from_rows(rows: &[Vec<f64>], names: &[&str]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Invalid(format!(
                "standardization requires at least 2 rows, got {n}"
            )));
        }
        let d = names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Invalid(format!(
                    "row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
        }
        let means: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let sds: Vec<f64> = (0..d)
            .map(|j| {
                let ss: f64 = rows
                    .iter()
                    .map(|r| (r[j] - means[j]) * (r[j] - means[j]))
                    .sum();
                (ss / (n as f64 - 1.0)).sqrt()
            })
            .collect();
        for (j, &sd) in sds.iter().enumerate() {
            if sd == 0.0 {
                return Err(Error::Invalid(format!(
                    "feature column '{}' is constant across all {n} contributors; \
                     cannot standardize",
                    names[j]
                )));
            }
            if !sd.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite standard deviation in feature column '{}'",
                    names[j]
                )));
            }
        }
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            for j in 0..d {
                data.push((row[j] - means[j]) / sds[j]);
            }
        }
        Ok(StandardizedMatrix {
            n_rows: n,
            n_cols: d,
            data,
            means,
            sds,
        })
    }

    /// Wrap rows that are already in z-score space (or any space where the
    /// values should be used verbatim): means are 0, scales are 1.
    pub fn from_z_scores(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if n == 0 || d == 0 {
            return Err(Error::Invalid("matrix must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Invalid(format!(
                    "row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
            for &x in row {
                if !x.is_finite() {
                    return Err(Error::Numeric(format!("non-finite value in row {i}")));
                }
                data.push(x);
            }
        }
        Ok(StandardizedMatrix {
            n_rows: n,
            n_cols: d,
            data,
            means: vec![0.0; d],
            sds: vec![1.0; d],
        })
    }
}

/// Z-score the core feature vectors column by column.
pub fn standardize(vectors: &[FeatureVector]) -> Result<StandardizedMatrix> {
    let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.to_array().to_vec()).collect();
    StandardizedMatrix::from_rows(&rows, &FEATURE_NAMES)
}
