//! Partition quality measures and the choice of k.

use crate::cluster::{pam, DistanceMatrix};
use crate::features::StandardizedMatrix;
use crate::{Error, Result};

/// Check that `assignment` is a valid 1-based labeling of n points with
/// every cluster 1..=k non-empty; returns k.
pub(crate) fn validate_assignment(n: usize, assignment: &[u32]) -> Result<usize> {
    if assignment.len() != n {
        return Err(Error::Invalid(format!(
            "assignment covers {} points, expected {n}",
            assignment.len()
        )));
    }
    let k = assignment.iter().copied().max().unwrap_or(0) as usize;
    if k == 0 {
        return Err(Error::Invalid("assignment has no clusters".into()));
    }
    let mut seen = vec![false; k + 1];
    for &label in assignment {
        if label == 0 {
            return Err(Error::Invalid("cluster labels are 1-based".into()));
        }
        seen[label as usize] = true;
    }
    if let Some(gap) = (1..=k).find(|&c| !seen[c]) {
        return Err(Error::Invalid(format!(
            "cluster {gap} is empty (labels must be contiguous 1..=k)"
        )));
    }
    Ok(k)
}

/// Silhouette width of every point: s = (b − a) / max(a, b), where a is
/// the mean distance to the point's own cluster (excluding itself) and b
/// the smallest mean distance to any other cluster. Singletons score 0,
/// as does the degenerate a = b = 0 case.
pub fn silhouette(dist: &DistanceMatrix, assignment: &[u32]) -> Result<Vec<f64>> {
    let n = dist.n();
    let k = validate_assignment(n, assignment)?;
    if k < 2 {
        return Err(Error::Invalid(
            "silhouette requires at least 2 clusters".into(),
        ));
    }
    let mut cluster_size = vec![0usize; k + 1];
    for &label in assignment {
        cluster_size[label as usize] += 1;
    }
    let mut scores = Vec::with_capacity(n);
    for j in 0..n {
        let own = assignment[j] as usize;
        if cluster_size[own] == 1 {
            scores.push(0.0);
            continue;
        }
        // Mean distance from j to every cluster, own cluster excluding j.
        let mut sums = vec![0.0; k + 1];
        for (i, &label) in assignment.iter().enumerate() {
            if i != j {
                sums[label as usize] += dist.get(j, i);
            }
        }
        let a = sums[own] / (cluster_size[own] - 1) as f64;
        let b = (1..=k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / cluster_size[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        scores.push(if denom == 0.0 { 0.0 } else { (b - a) / denom });
    }
    Ok(scores)
}

/// Within-cluster sum of squared distances to cluster centroids,
/// in the (standardized) feature space.
pub fn within_ss(data: &StandardizedMatrix, assignment: &[u32]) -> Result<f64> {
    let n = data.n_rows();
    let d = data.n_cols();
    let k = validate_assignment(n, assignment)?;
    let mut centroids = vec![vec![0.0; d]; k + 1];
    let mut counts = vec![0usize; k + 1];
    for (row, &label) in data.rows().zip(assignment) {
        let c = label as usize;
        counts[c] += 1;
        for (acc, x) in centroids[c].iter_mut().zip(row) {
            *acc += x;
        }
    }
    for (centroid, &count) in centroids.iter_mut().zip(&counts).skip(1) {
        for x in centroid.iter_mut() {
            *x /= count as f64;
        }
    }
    let mut total = 0.0;
    for (row, &label) in data.rows().zip(assignment) {
        let centroid = &centroids[label as usize];
        total += row
            .iter()
            .zip(centroid)
            .map(|(x, c)| (x - c) * (x - c))
            .sum::<f64>();
    }
    Ok(total)
}

/// Quality scores of the PAM partition at one value of k.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KDiagnostic {
    pub k: usize,
    pub pam_cost: f64,
    pub avg_silhouette: f64,
    pub within_ss: f64,
}

/// Outcome of scanning a k range.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KSelection {
    /// The k with the highest average silhouette (ties to the smaller k).
    pub k: usize,
    pub diagnostics: Vec<KDiagnostic>,
}

/// Run PAM for every k in `[k_min, k_max]` and pick the silhouette winner.
///
/// `k_max` is clamped to n−1 (silhouette is meaningless with every point
/// its own cluster); the range must leave at least one candidate.
pub fn select_k(
    data: &StandardizedMatrix,
    dist: &DistanceMatrix,
    k_min: usize,
    k_max: usize,
) -> Result<KSelection> {
    let n = dist.n();
    if n != data.n_rows() {
        return Err(Error::Invalid(format!(
            "distance matrix covers {n} points but the feature matrix has {}",
            data.n_rows()
        )));
    }
    if k_min < 2 {
        return Err(Error::Invalid(format!(
            "k range must start at 2 or above, got {k_min}"
        )));
    }
    let k_cap = k_max.min(n.saturating_sub(1));
    if k_min > k_cap {
        return Err(Error::Invalid(format!(
            "k range [{k_min}, {k_max}] leaves no candidates for {n} points"
        )));
    }
    let mut diagnostics = Vec::with_capacity(k_cap - k_min + 1);
    let mut best_k = 0;
    let mut best_sil = f64::NEG_INFINITY;
    for k in k_min..=k_cap {
        let partition = pam(dist, k)?;
        let scores = silhouette(dist, &partition.assignment)?;
        let avg_silhouette = scores.iter().sum::<f64>() / scores.len() as f64;
        let within = within_ss(data, &partition.assignment)?;
        if avg_silhouette > best_sil {
            best_sil = avg_silhouette;
            best_k = k;
        }
        diagnostics.push(KDiagnostic {
            k,
            pam_cost: partition.cost,
            avg_silhouette,
            within_ss: within,
        });
    }
    Ok(KSelection {
        k: best_k,
        diagnostics,
    })
}
