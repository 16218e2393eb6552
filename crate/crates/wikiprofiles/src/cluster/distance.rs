//! Condensed pairwise Euclidean distance matrix.

use rayon::prelude::*;

use crate::features::StandardizedMatrix;
use crate::{Error, Result};

/// Pairwise Euclidean distances between n points, stored as the condensed
/// upper triangle: entry (i, j) with i < j lives at
/// `n·i − i(i+1)/2 + j − i − 1`, i.e. row-by-row above the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    n * i - i * (i + 1) / 2 + j - i - 1
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl DistanceMatrix {
    /// Number of points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between points i and j (0 on the diagonal).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.data[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => self.data[condensed_index(self.n, j, i)],
        }
    }

    /// The condensed entries, row-major above the diagonal.
    pub fn condensed(&self) -> &[f64] {
        &self.data
    }

    /// Euclidean distances between the rows of a feature matrix.
    ///
    /// Rows are computed in parallel; every entry lands in a fixed position
    /// independent of scheduling, so the result is identical at any thread
    /// count.
    pub fn from_rows(matrix: &StandardizedMatrix) -> Self {
        let n = matrix.n_rows();
        let len = n * (n - 1) / 2;
        let mut data = vec![0.0; len];
        let mut rows: Vec<(usize, &mut [f64])> = Vec::with_capacity(n.saturating_sub(1));
        let mut rest = data.as_mut_slice();
        for i in 0..n.saturating_sub(1) {
            let (row, tail) = rest.split_at_mut(n - 1 - i);
            rows.push((i, row));
            rest = tail;
        }
        rows.into_par_iter().for_each(|(i, row)| {
            let a = matrix.row(i);
            for (offset, slot) in row.iter_mut().enumerate() {
                let j = i + 1 + offset;
                *slot = euclidean(a, matrix.row(j));
            }
        });
        DistanceMatrix { n, data }
    }

    /// Build from an arbitrary symmetric distance function (tests, oracles).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                data.push(f(i, j));
            }
        }
        DistanceMatrix { n, data }
    }

    /// Wrap an existing condensed vector, validating length and entries.
    pub fn from_condensed(n: usize, data: Vec<f64>) -> Result<Self> {
        let expect = n * (n - 1) / 2;
        if data.len() != expect {
            return Err(Error::Invalid(format!(
                "condensed distance matrix for n={n} needs {expect} entries, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(Error::Invalid(format!(
                "distance matrix entries must be finite and non-negative, got {bad}"
            )));
        }
        Ok(DistanceMatrix { n, data })
    }
}
