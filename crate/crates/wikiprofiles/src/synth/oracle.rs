//! Brute-force oracles: exhaustive k-medoids and the adjusted Rand index.
//!
//! Both exist to judge the production algorithms, so they are written for
//! obviousness, not speed — full enumeration and direct pair counting.

use itertools::Itertools;

use crate::cluster::DistanceMatrix;
use crate::{Error, Result};

/// Enumeration budget for [`exhaustive_kmedoids`].
const MAX_SUBSETS: u128 = 1_000_000;

/// Globally optimal medoid set and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    /// Lexicographically smallest optimal k-subset, ascending.
    pub medoids: Vec<usize>,
    pub cost: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) as u128 / (i + 1) as u128;
    }
    result
}

/// Total distance-to-nearest-medoid over every point.
fn cost_of(dist: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..dist.n())
        .map(|j| {
            medoids
                .iter()
                .map(|&m| dist.get(j, m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// The global minimum of the k-medoids objective, by full enumeration of
/// all k-subsets (lexicographic order, so cost ties keep the smallest set).
pub fn exhaustive_kmedoids(dist: &DistanceMatrix, k: usize) -> Result<ExhaustiveResult> {
    let n = dist.n();
    if k == 0 || k > n {
        return Err(Error::Invalid(format!(
            "exhaustive k-medoids needs 1 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    let subsets = binomial(n, k);
    if subsets > MAX_SUBSETS {
        return Err(Error::Invalid(format!(
            "C({n}, {k}) = {subsets} subsets exceeds the enumeration budget \
             of {MAX_SUBSETS}"
        )));
    }
    let mut best: Option<ExhaustiveResult> = None;
    for medoids in (0..n).combinations(k) {
        let cost = cost_of(dist, &medoids);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(ExhaustiveResult { medoids, cost });
        }
    }
    Ok(best.expect("at least one subset was enumerated"))
}

fn pairs(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1) / 2
}

/// Adjusted Rand index between two labelings of the same points. Labels are
/// categorical; their values carry no meaning. Degenerate cases where the
/// expected and maximum index coincide (both partitions trivial) score 1.0.
///
/// ARI = (Σᵢⱼ C(nᵢⱼ,2) − E) / (½[Σᵢ C(aᵢ,2) + Σⱼ C(bⱼ,2)] − E) with
/// E = Σᵢ C(aᵢ,2)·Σⱼ C(bⱼ,2)/C(n,2); evaluated here after clearing the
/// denominators, so the arithmetic is exact in integers until one final
/// division.
pub fn adjusted_rand_index(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Invalid(format!(
            "label vectors differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut table: std::collections::BTreeMap<(u32, u32), u64> = std::collections::BTreeMap::new();
    let mut row: std::collections::BTreeMap<u32, u64> = std::collections::BTreeMap::new();
    let mut col: std::collections::BTreeMap<u32, u64> = std::collections::BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *row.entry(x).or_default() += 1;
        *col.entry(y).or_default() += 1;
    }
    let sum_cells: i128 = table.values().map(|&c| pairs(c)).sum();
    let sum_rows: i128 = row.values().map(|&c| pairs(c)).sum();
    let sum_cols: i128 = col.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u64);
    let numerator = 2 * (sum_cells * total - sum_rows * sum_cols);
    let denominator = total * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols;
    if denominator == 0 {
        return Ok(1.0);
    }
    Ok(numerator as f64 / denominator as f64)
}
