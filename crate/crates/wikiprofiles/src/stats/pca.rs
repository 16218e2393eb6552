//! Principal component analysis of the standardized feature matrix.
//!
//! The correlation matrix C = XᵀX/(n−1) of the z-scored data is
//! diagonalized with cyclic Jacobi rotations, which are exact for the
//! small symmetric matrices that arise here (d ≤ 12) and carry no
//! convergence subtleties beyond the sweep budget.

use crate::features::StandardizedMatrix;
use crate::{Error, Result};

/// Off-diagonal magnitude below which the Jacobi iteration is converged.
const JACOBI_TOL: f64 = 1e-12;
/// Maximum number of full sweeps before giving up.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues of a correlation matrix are ≥ 0; rounding may produce tiny
/// negatives, which are clamped. Anything below this is a real failure.
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A fitted PCA basis, self-contained: `means`/`scales` reproduce the
/// standardization, `loadings` hold one eigenvector per column.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PcaModel {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// d×d; `loadings[r][c]` is the weight of feature r in component c.
    /// Columns are unit-norm, orthogonal, ordered by decreasing eigenvalue,
    /// and signed so the largest-magnitude entry of each is positive.
    pub loadings: Vec<Vec<f64>>,
    /// Variances along the components, descending; they sum to d.
    pub eigenvalues: Vec<f64>,
    /// Fraction of total variance per component.
    pub explained: Vec<f64>,
}

/// Diagonalize a symmetric matrix with cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, vectors)` with `vectors[r][c]` the r-th entry of
/// the c-th eigenvector, unsorted.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = a.len();
    let mut v = vec![vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a[p][q].abs());
            }
        }
        if off <= JACOBI_TOL {
            let eigenvalues = (0..d).map(|i| a[i][i]).collect();
            return Ok((eigenvalues, v));
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                // Smaller-angle root of t² + 2θt − 1 = 0, numerically stable
                // for large |θ|.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..d {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[p][i] = a[i][p];
                    a[i][q] = s * aip + c * aiq;
                    a[q][i] = a[i][q];
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    Err(Error::Numeric(format!(
        "Jacobi eigendecomposition did not converge in {JACOBI_MAX_SWEEPS} sweeps"
    )))
}

/// Fit PCA on z-scored data. Requires strictly more rows than columns.
pub fn pca_fit(data: &StandardizedMatrix) -> Result<PcaModel> {
    let n = data.n_rows();
    let d = data.n_cols();
    if n <= d {
        return Err(Error::Invalid(format!(
            "PCA requires more rows than features, got {n} rows for {d} features"
        )));
    }
    let mut corr = vec![vec![0.0; d]; d];
    for row in data.rows() {
        for i in 0..d {
            for j in i..d {
                corr[i][j] += row[i] * row[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            corr[i][j] /= denom;
            corr[j][i] = corr[i][j];
        }
    }

    let (raw_values, vectors) = jacobi_eigen(corr)?;
    for &lambda in &raw_values {
        if lambda < EIGENVALUE_FLOOR {
            return Err(Error::Numeric(format!(
                "correlation matrix has negative eigenvalue {lambda:e}"
            )));
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| raw_values[j].total_cmp(&raw_values[i]).then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw_values[i].max(0.0)).collect();
    let mut loadings = vec![vec![0.0; d]; d];
    for (c, &src) in order.iter().enumerate() {
        // Sign convention: largest-magnitude entry positive (ties: first).
        let mut peak = 0usize;
        for r in 1..d {
            if vectors[r][src].abs() > vectors[peak][src].abs() {
                peak = r;
            }
        }
        let flip = if vectors[peak][src] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..d {
            loadings[r][c] = flip * vectors[r][src];
        }
    }

    let total: f64 = eigenvalues.iter().sum();
    let explained = eigenvalues.iter().map(|&l| l / total).collect();
    Ok(PcaModel {
        means: data.means.clone(),
        scales: data.sds.clone(),
        loadings,
        eigenvalues,
        explained,
    })
}

/// Project z-scored rows onto the first `dims` components.
pub fn pca_project(
    model: &PcaModel,
    data: &StandardizedMatrix,
    dims: usize,
) -> Result<Vec<Vec<f64>>> {
    let d = model.loadings.len();
    if dims == 0 || dims > d {
        return Err(Error::Invalid(format!(
            "projection dimension {dims} out of range 1..={d}"
        )));
    }
    if data.n_cols() != d {
        return Err(Error::Invalid(format!(
            "data has {} columns but the model was fitted on {d}",
            data.n_cols()
        )));
    }
    Ok(data
        .rows()
        .map(|row| {
            (0..dims)
                .map(|c| row.iter().zip(&model.loadings).map(|(x, l)| x * l[c]).sum())
                .collect()
        })
        .collect())
}

/// Map component coordinates back to the standardized feature space.
pub fn pca_reconstruct(model: &PcaModel, coords: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = model.loadings.len();
    coords
        .iter()
        .map(|y| {
            (0..d)
                .map(|r| y.iter().enumerate().map(|(c, yc)| yc * model.loadings[r][c]).sum())
                .collect()
        })
        .collect()
}
