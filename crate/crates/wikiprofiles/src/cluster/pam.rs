//! PAM (partitioning around medoids) with the classic BUILD + SWAP phases.
//!
//! Fully deterministic: BUILD seeds greedily (ties to the lowest index),
//! SWAP is steepest descent over all (medoid, candidate) pairs scanned in
//! ascending index order, applying the single best strictly-improving swap
//! per iteration until none exists.

use crate::cluster::DistanceMatrix;
use crate::{Error, Result};

/// Safety bound on SWAP iterations; each applied swap strictly lowers the
/// cost, so this is never reached in practice.
const MAX_SWAP_ITERATIONS: usize = 10_000;

/// A PAM partition.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PamResult {
    /// Medoid point indices, ascending.
    pub medoids: Vec<usize>,
    /// Per point, the 1-based rank of its medoid within `medoids`.
    /// Equidistant points go to the lower-indexed medoid.
    pub assignment: Vec<u32>,
    /// Sum of distances from every point to its medoid.
    pub cost: f64,
}

/// Distance from every point to its nearest and second-nearest medoid;
/// `nearest_medoid[j]` is the medoid point index itself.
fn nearest_two(
    dist: &DistanceMatrix,
    medoids: &[usize],
) -> (Vec<f64>, Vec<usize>, Vec<f64>) {
    let n = dist.n();
    let mut d_near = vec![f64::INFINITY; n];
    let mut who = vec![usize::MAX; n];
    let mut d_second = vec![f64::INFINITY; n];
    for j in 0..n {
        for &m in medoids {
            let d = dist.get(j, m);
            if d < d_near[j] {
                d_second[j] = d_near[j];
                d_near[j] = d;
                who[j] = m;
            } else if d < d_second[j] {
                d_second[j] = d;
            }
        }
    }
    (d_near, who, d_second)
}

fn build(dist: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = dist.n();
    let mut first = 0;
    let mut first_total = f64::INFINITY;
    for i in 0..n {
        let total: f64 = (0..n).map(|j| dist.get(i, j)).sum();
        if total < first_total {
            first_total = total;
            first = i;
        }
    }
    let mut medoids = vec![first];
    let mut is_medoid = vec![false; n];
    is_medoid[first] = true;
    let mut d_near: Vec<f64> = (0..n).map(|j| dist.get(j, first)).collect();
    while medoids.len() < k {
        let mut best_gain = f64::NEG_INFINITY;
        let mut best = usize::MAX;
        for c in 0..n {
            if is_medoid[c] {
                continue;
            }
            // Kaufman–Rousseeuw gain: how much the candidate shortens the
            // other points' paths. The candidate's own distance is
            // deliberately left out — counting it rewards outliers and
            // measurably degrades the starting configuration.
            let gain: f64 = (0..n)
                .filter(|&j| j != c)
                .map(|j| (d_near[j] - dist.get(j, c)).max(0.0))
                .sum();
            if gain > best_gain {
                best_gain = gain;
                best = c;
            }
        }
        medoids.push(best);
        is_medoid[best] = true;
        for j in 0..n {
            d_near[j] = d_near[j].min(dist.get(j, best));
        }
    }
    medoids.sort_unstable();
    medoids
}

/// Run PAM with k medoids over a distance matrix.
pub fn pam(dist: &DistanceMatrix, k: usize) -> Result<PamResult> {
    let n = dist.n();
    if k < 2 || k >= n {
        return Err(Error::Invalid(format!(
            "PAM requires 2 ≤ k < n, got k={k} for n={n}"
        )));
    }
    let mut medoids = build(dist, k);
    let mut is_medoid = vec![false; n];
    for &m in &medoids {
        is_medoid[m] = true;
    }

    for _ in 0..MAX_SWAP_ITERATIONS {
        let (d_near, who, d_second) = nearest_two(dist, &medoids);
        let mut best_delta = 0.0;
        let mut best_swap: Option<(usize, usize)> = None;
        for &m in medoids.iter() {
            for h in 0..n {
                if is_medoid[h] {
                    continue;
                }
                let mut delta = 0.0;
                for j in 0..n {
                    let d_jh = dist.get(j, h);
                    if who[j] == m {
                        // j loses its medoid: runner-up or the new one.
                        delta += d_jh.min(d_second[j]) - d_near[j];
                    } else {
                        // j keeps its medoid unless h is closer.
                        delta += (d_jh - d_near[j]).min(0.0);
                    }
                }
                if delta < best_delta {
                    best_delta = delta;
                    best_swap = Some((m, h));
                }
            }
        }
        match best_swap {
            Some((m, h)) => {
                is_medoid[m] = false;
                is_medoid[h] = true;
                medoids.retain(|&x| x != m);
                medoids.push(h);
                medoids.sort_unstable();
            }
            None => break,
        }
    }

    let (d_near, who, _) = nearest_two(dist, &medoids);
    let rank_of: std::collections::BTreeMap<usize, u32> = medoids
        .iter()
        .enumerate()
        .map(|(rank, &m)| (m, rank as u32 + 1))
        .collect();
    let assignment = who.iter().map(|m| rank_of[m]).collect();
    Ok(PamResult {
        medoids,
        assignment,
        cost: d_near.iter().sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn line_points(coords: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(coords.len(), |i, j| (coords[i] - coords[j]).abs())
    }

    /// Cost of assigning every point to its nearest medoid in `set`.
    fn cost_of(dist: &DistanceMatrix, set: &[usize]) -> f64 {
        (0..dist.n())
            .map(|j| {
                set.iter()
                    .map(|&m| dist.get(j, m))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    fn exhaustive_best_cost(dist: &DistanceMatrix, k: usize) -> f64 {
        (0..dist.n())
            .combinations(k)
            .map(|set| cost_of(dist, &set))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn two_blobs_on_a_line() {
        let dist = line_points(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        let result = pam(&dist, 2).unwrap();
        assert_eq!(result.medoids, vec![1, 4]);
        assert_eq!(result.assignment, vec![1, 1, 1, 2, 2, 2]);
        assert_eq!(result.cost, 4.0);
    }

    #[test]
    fn k_one_short_of_n_leaves_the_closest_pair() {
        // With k = n − 1 every point but one becomes a medoid, so the cost
        // is forced down to the smallest pairwise distance.
        let coords = [3.0, 7.0, 1.0, 12.0, 6.5];
        let dist = line_points(&coords);
        let result = pam(&dist, 4).unwrap();
        let min_pair = (0..5)
            .combinations(2)
            .map(|pair| dist.get(pair[0], pair[1]))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(result.cost, min_pair);
        assert_eq!(min_pair, 0.5); // |7.0 − 6.5|
    }

    #[test]
    fn swap_never_worsens_the_build_seed() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for n in [6usize, 13, 30] {
            let coords: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
            let dist = line_points(&coords);
            for k in 2..n.min(6) {
                let seed_cost = cost_of(&dist, &build(&dist, k));
                let result = pam(&dist, k).unwrap();
                assert!(
                    result.cost <= seed_cost + 1e-12,
                    "n={n} k={k}: SWAP ended above its BUILD seed"
                );
            }
        }
    }

    #[test]
    fn never_beats_and_usually_matches_the_exhaustive_optimum() {
        // PAM is a local search: it may miss the global optimum on rare
        // instances but can never undercut it, must always end swap-optimal,
        // and BUILD+SWAP lands on the optimum for the large majority of
        // small random instances.
        use rand::{RngExt, SeedableRng};
        let mut matched = 0;
        let total = 20u64;
        for seed in 0..total {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coords: Vec<Vec<f64>> = (0..9)
                .map(|_| (0..3).map(|_| rng.random_range(0.0..10.0)).collect())
                .collect();
            let dist = DistanceMatrix::from_fn(9, |i, j| {
                coords[i]
                    .iter()
                    .zip(&coords[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            });
            let result = pam(&dist, 2).unwrap();
            let optimal = exhaustive_best_cost(&dist, 2);
            assert!(
                result.cost >= optimal - 1e-12,
                "seed {seed}: PAM cost {} below optimum {optimal}",
                result.cost
            );
            for (mi, _) in result.medoids.iter().enumerate() {
                for h in 0..dist.n() {
                    if result.medoids.contains(&h) {
                        continue;
                    }
                    let mut trial = result.medoids.clone();
                    trial[mi] = h;
                    assert!(
                        cost_of(&dist, &trial) >= result.cost - 1e-12,
                        "seed {seed}: converged result admits an improving swap"
                    );
                }
            }
            if (result.cost - optimal).abs() < 1e-9 {
                matched += 1;
            }
        }
        assert!(
            matched >= total - 2,
            "PAM matched the optimum on only {matched}/{total} instances"
        );
    }

    #[test]
    fn converged_result_is_swap_optimal() {
        let coords: Vec<f64> = (0..20).map(|i| ((i * 29) % 41) as f64 * 0.7).collect();
        let dist = line_points(&coords);
        let result = pam(&dist, 4).unwrap();
        let base = cost_of(&dist, &result.medoids);
        assert!((base - result.cost).abs() < 1e-12);
        for (mi, &m) in result.medoids.iter().enumerate() {
            for h in 0..20 {
                if result.medoids.contains(&h) {
                    continue;
                }
                let mut trial = result.medoids.clone();
                trial[mi] = h;
                assert!(
                    cost_of(&dist, &trial) >= base - 1e-12,
                    "swap {m}→{h} improves a converged PAM result"
                );
            }
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let coords: Vec<f64> = (0..30).map(|i| ((i * 17) % 53) as f64).collect();
        let dist = line_points(&coords);
        let a = pam(&dist, 5).unwrap();
        let b = pam(&dist, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn equidistant_point_goes_to_lower_medoid() {
        // Two tight triples centered at (0,0) and (10,0) — the unique
        // optimal medoids — plus an apex point at (5,4) exactly √41 from
        // both. The tie must resolve to the lower-indexed medoid.
        let coords: [(f64, f64); 7] = [
            (0.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (10.0, 0.0),
            (10.0, 1.0),
            (10.0, -1.0),
            (5.0, 4.0),
        ];
        let dist = DistanceMatrix::from_fn(coords.len(), |i, j| {
            let (xi, yi) = coords[i];
            let (xj, yj) = coords[j];
            ((xi - xj) * (xi - xj) + (yi - yj) * (yi - yj)).sqrt()
        });
        let result = pam(&dist, 2).unwrap();
        assert_eq!(result.medoids, vec![0, 3]);
        assert_eq!(dist.get(6, 0), dist.get(6, 3));
        assert_eq!(result.assignment[6], 1);
    }

    #[test]
    fn rejects_k_outside_two_to_n_exclusive() {
        let dist = line_points(&[0.0, 1.0, 5.0]);
        assert!(pam(&dist, 0).is_err());
        assert!(pam(&dist, 1).is_err());
        assert!(pam(&dist, 2).is_ok());
        assert!(pam(&dist, 3).is_err()); // k == n
        assert!(pam(&dist, 4).is_err());
    }
}
