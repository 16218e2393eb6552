//! The acceptance gate: one test — and one pass/fail line — per shipping
//! criterion. Every tolerance is pinned as a named constant next to the
//! criterion that owns it. Oracles here are deliberately naive
//! re-implementations (exhaustive scans, O(n³) rescans, double loops)
//! living entirely inside this test crate.

mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, FisherF};
use wikiprofiles::cluster::{
    pam, select_k, silhouette, ward_cluster, Dendrogram, DistanceMatrix, Merge,
};
use wikiprofiles::dump::{
    aggregate_histories, open_dump, parse_dump, ContributorKey, IngestConfig,
};
use wikiprofiles::features::{
    compute_features, filter_contributors, standardize, FeatureVector, StandardizedMatrix,
};
use wikiprofiles::interpret::{label_clusters, Archetype};
use wikiprofiles::stats::{
    anova_oneway, beta_inc, beta_inc_series, pca_fit, pca_project, srange_quantile,
};
use wikiprofiles::synth::{adjusted_rand_index, exhaustive_kmedoids, generate_cohort, SynthSpec};

use common::{
    distance_matrix, fixture_dump, fixture_expected_kept, unit_cube_points, FIXTURE_PAGES,
    FIXTURE_REVISIONS,
};

/// Bookkeeping allocator: criterion 9's streaming bound is checked against
/// the real peak of the whole process, so a buffering parser (≥ the 1 GiB
/// of dump text) cannot hide.
struct TrackingAllocator;

static ALLOCATED: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

fn on_alloc(size: usize) {
    let now = ALLOCATED.fetch_add(size, Ordering::Relaxed) + size;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

unsafe impl GlobalAlloc for TrackingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let ptr = unsafe { System.alloc(layout) };
        if !ptr.is_null() {
            on_alloc(layout.size());
        }
        ptr
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        ALLOCATED.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let new_ptr = unsafe { System.realloc(ptr, layout, new_size) };
        if !new_ptr.is_null() {
            ALLOCATED.fetch_sub(layout.size(), Ordering::Relaxed);
            on_alloc(new_size);
        }
        new_ptr
    }
}

#[global_allocator]
static GLOBAL: TrackingAllocator = TrackingAllocator;

/// Absolute slack for comparing two sums of ≤ 200 unit-cube distances.
const COST_EPS: f64 = 1e-9;

// --------------------------------------------------------------------
// Criterion 1 — reproducing the published cluster sizes requires the
// 2018-01-01 Romanian/Danish dump snapshots, which no longer exist to
// download; criteria 2–10 substitute as the property suite. Supplying a
// current dump via this env var runs the pipeline end-to-end and reports
// counts and sizes without asserting them (best-effort by design).
// --------------------------------------------------------------------

const DUMP_ENV: &str = "WIKIPROFILES_ACCEPTANCE_DUMP";

#[test]
fn criterion_01_paper_numbers_best_effort_only() {
    let Some(path) = std::env::var_os(DUMP_ENV) else {
        println!(
            "criterion 1: {DUMP_ENV} not set; historical dumps are unavailable, \
             property suite (criteria 2-10) substitutes"
        );
        return;
    };
    let path = PathBuf::from(path);
    let reader = open_dump(&path, wikiprofiles::dump::Compression::Auto).unwrap();
    let mut parser = parse_dump(reader, IngestConfig::default());
    let histories = aggregate_histories(parser.by_ref().map(|ev| ev.unwrap()));
    let stats = parser.stats();
    println!(
        "criterion 1: {} pages, {} revisions, {} contributors",
        stats.pages,
        stats.revisions,
        histories.len()
    );
    let kept = filter_contributors(&histories, 100);
    println!("criterion 1: {} contributors above 100 edits", kept.len());
    let vectors: Vec<FeatureVector> = kept
        .values()
        .map(compute_features)
        .collect::<wikiprofiles::Result<_>>()
        .unwrap();
    let matrix = standardize(&vectors).unwrap();
    let dist = DistanceMatrix::from_rows(&matrix);
    let selection = select_k(&matrix, &dist, 2, 10).unwrap();
    let clusters = pam(&dist, selection.k).unwrap();
    let mut sizes = vec![0usize; selection.k];
    for &a in &clusters.assignment {
        sizes[a as usize - 1] += 1;
    }
    println!(
        "criterion 1: selected k = {}, cluster sizes {:?} (reported, not asserted)",
        selection.k, sizes
    );
}

// --------------------------------------------------------------------
// Criterion 2 — PAM vs exhaustive oracle on 200 random instances
// (n ≤ 12, k ≤ 3, uniform 6-D unit cube): never better, equal ≥ 95%.
// --------------------------------------------------------------------

const PAM_ORACLE_INSTANCES: usize = 200;
const PAM_ORACLE_MIN_MATCHES: usize = 190;
const PAM_ORACLE_BUDGET: Duration = Duration::from_secs(10);

#[test]
fn criterion_02_pam_vs_exhaustive_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut matches = 0;
    for instance in 0..PAM_ORACLE_INSTANCES {
        let n = rng.random_range(4..=12);
        let k = rng.random_range(2..=3usize.min(n - 1));
        let dist = distance_matrix(&unit_cube_points(&mut rng, n));
        let result = pam(&dist, k).unwrap();
        let optimal = exhaustive_kmedoids(&dist, k).unwrap();
        assert!(
            result.cost >= optimal.cost - COST_EPS,
            "instance {instance} (n={n}, k={k}): PAM cost {} beats the exhaustive \
             optimum {}, so one of the two is wrong",
            result.cost,
            optimal.cost
        );
        if result.cost <= optimal.cost + COST_EPS {
            matches += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        matches >= PAM_ORACLE_MIN_MATCHES,
        "PAM reached the global optimum on only {matches}/{PAM_ORACLE_INSTANCES} instances \
         (need ≥ {PAM_ORACLE_MIN_MATCHES})"
    );
    assert!(elapsed < PAM_ORACLE_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 2: PAM optimal on {matches}/{PAM_ORACLE_INSTANCES} instances in {elapsed:?}"
    );
}

// --------------------------------------------------------------------
// Criterion 3 — PAM local optimality: exhaustive single-swap scan on
// 50 instances with n = 100, k = 4.
// --------------------------------------------------------------------

const SWAP_SCAN_INSTANCES: usize = 50;
const SWAP_SCAN_N: usize = 100;
const SWAP_SCAN_K: usize = 4;
const SWAP_SCAN_BUDGET: Duration = Duration::from_secs(30);

/// Cost of an arbitrary medoid set: Σ over points of the distance to the
/// nearest medoid (PAM's objective, recomputed from scratch).
fn medoid_set_cost(dist: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..dist.n())
        .map(|j| {
            medoids
                .iter()
                .map(|&m| dist.get(j, m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

#[test]
fn criterion_03_pam_single_swap_local_optimality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for instance in 0..SWAP_SCAN_INSTANCES {
        let dist = distance_matrix(&unit_cube_points(&mut rng, SWAP_SCAN_N));
        let result = pam(&dist, SWAP_SCAN_K).unwrap();
        assert!(
            (result.cost - medoid_set_cost(&dist, &result.medoids)).abs() <= COST_EPS,
            "instance {instance}: reported cost disagrees with the recomputed objective"
        );
        for (slot, &out) in result.medoids.iter().enumerate() {
            for replacement in 0..SWAP_SCAN_N {
                if result.medoids.contains(&replacement) {
                    continue;
                }
                let mut swapped = result.medoids.clone();
                swapped[slot] = replacement;
                let cost = medoid_set_cost(&dist, &swapped);
                assert!(
                    cost >= result.cost - COST_EPS,
                    "instance {instance}: swapping medoid {out} for point {replacement} \
                     drops the cost from {} to {cost}; the returned solution is not \
                     1-swap optimal",
                    result.cost
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < SWAP_SCAN_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 3: no improving swap over {SWAP_SCAN_INSTANCES} instances \
         (n={SWAP_SCAN_N}, k={SWAP_SCAN_K}) in {elapsed:?}"
    );
}

// --------------------------------------------------------------------
// Criterion 4 — Ward merge sequences match an independent naive O(n³)
// Lance–Williams implementation exactly; heights non-decreasing.
// --------------------------------------------------------------------

const WARD_INSTANCES: usize = 50;
const WARD_BUDGET: Duration = Duration::from_secs(10);

/// Naive Ward reference: keep the full dissimilarity matrix, rescan every
/// active pair at every step, pick the (height, left id, right id) minimum.
/// Uses the same Lance–Williams expression as production so agreement is
/// required to the bit, not merely within a tolerance.
fn naive_ward(dist: &DistanceMatrix) -> Dendrogram {
    let n = dist.n();
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<f64> = vec![1.0; n];
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let e = dist.get(i, j);
            d[i][j] = e * e;
        }
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut merges = Vec::new();
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for (ai, &sa) in alive.iter().enumerate() {
            for &sb in &alive[ai + 1..] {
                let (l, r) = if ids[sa] < ids[sb] { (sa, sb) } else { (sb, sa) };
                let cand = (d[l][r], ids[l], ids[r], l, r);
                let better = match &best {
                    None => true,
                    Some((bd, bl, br, _, _)) => (cand.0, cand.1, cand.2) < (*bd, *bl, *br),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (height, left, right, li, rj) = best.unwrap();
        merges.push(Merge {
            left,
            right,
            height,
            size: (sizes[li] + sizes[rj]) as usize,
        });
        let (ni, nj) = (sizes[li], sizes[rj]);
        let dij = d[li][rj];
        for &k in &alive {
            if k == li || k == rj {
                continue;
            }
            let nk = sizes[k];
            let merged =
                ((ni + nk) * d[li][k] + (nj + nk) * d[rj][k] - nk * dij) / (ni + nj + nk);
            d[li][k] = merged;
            d[k][li] = merged;
        }
        ids[li] = n + step;
        sizes[li] += sizes[rj];
        alive.retain(|&s| s != rj);
    }
    Dendrogram {
        n_leaves: n,
        merges,
    }
}

#[test]
fn criterion_04_ward_matches_naive_reference() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for instance in 0..WARD_INSTANCES {
        let n = rng.random_range(2..=40);
        let dist = distance_matrix(&unit_cube_points(&mut rng, n));
        let fast = ward_cluster(&dist);
        let slow = naive_ward(&dist);
        assert_eq!(fast.n_leaves, slow.n_leaves);
        assert_eq!(fast.merges.len(), slow.merges.len());
        for (step, (a, b)) in fast.merges.iter().zip(&slow.merges).enumerate() {
            assert_eq!(
                (a.left, a.right, a.size),
                (b.left, b.right, b.size),
                "instance {instance} (n={n}), step {step}: merge order diverges"
            );
            assert_eq!(
                a.height.to_bits(),
                b.height.to_bits(),
                "instance {instance} (n={n}), step {step}: heights differ \
                 ({} vs {})",
                a.height,
                b.height
            );
        }
        for (step, w) in fast.merges.windows(2).enumerate() {
            assert!(
                w[0].height <= w[1].height,
                "instance {instance} (n={n}): height decreases at step {}",
                step + 1
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < WARD_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 4: {WARD_INSTANCES} merge sequences bit-identical to the naive \
         reference in {elapsed:?}"
    );
}

// --------------------------------------------------------------------
// Criterion 5 — silhouette matches an independent naive double loop
// within 1e-12 on 50 random labeled instances (n ≤ 200).
// --------------------------------------------------------------------

const SILHOUETTE_INSTANCES: usize = 50;
const SILHOUETTE_EPS: f64 = 1e-12;
const SILHOUETTE_BUDGET: Duration = Duration::from_secs(10);

/// Textbook double loop, one cluster at a time: a(i) is the mean distance
/// to the rest of i's cluster, b(i) the smallest mean distance to any
/// other cluster; singletons and the all-zero case score 0.
fn naive_silhouette(dist: &DistanceMatrix, assignment: &[u32], k: usize) -> Vec<f64> {
    let n = dist.n();
    let members: Vec<Vec<usize>> = (1..=k)
        .map(|c| (0..n).filter(|&i| assignment[i] == c as u32).collect())
        .collect();
    (0..n)
        .map(|i| {
            let own = assignment[i] as usize - 1;
            if members[own].len() == 1 {
                return 0.0;
            }
            let mean_to = |cluster: &[usize], exclude_self: bool| {
                let sum: f64 = cluster
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| dist.get(i, j))
                    .sum();
                let count = cluster.len() - usize::from(exclude_self);
                sum / count as f64
            };
            let a = mean_to(&members[own], true);
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| mean_to(&members[c], false))
                .fold(f64::INFINITY, f64::min);
            if a.max(b) == 0.0 {
                0.0
            } else {
                (b - a) / a.max(b)
            }
        })
        .collect()
}

#[test]
fn criterion_05_silhouette_matches_naive_double_loop() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for instance in 0..SILHOUETTE_INSTANCES {
        let n = rng.random_range(5..=200);
        let k = rng.random_range(2..=5usize.min(n - 1));
        let dist = distance_matrix(&unit_cube_points(&mut rng, n));
        // First k points seed clusters 1..=k so every label is non-empty.
        let assignment: Vec<u32> = (0..n)
            .map(|i| {
                if i < k {
                    i as u32 + 1
                } else {
                    rng.random_range(1..=k as u32)
                }
            })
            .collect();
        let fast = silhouette(&dist, &assignment).unwrap();
        let slow = naive_silhouette(&dist, &assignment, k);
        for (i, (f, s)) in fast.iter().zip(&slow).enumerate() {
            assert!(
                (f - s).abs() <= SILHOUETTE_EPS,
                "instance {instance} (n={n}, k={k}), point {i}: {f} vs naive {s}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < SILHOUETTE_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 5: silhouettes within {SILHOUETTE_EPS:.0e} of the naive double \
         loop on {SILHOUETTE_INSTANCES} instances in {elapsed:?}"
    );
}

// --------------------------------------------------------------------
// Criterion 6 — PCA: orthonormal loadings, eigen-equation residual,
// eigenvalue sum, projected variances, and the rank-1 fixture.
// --------------------------------------------------------------------

const PCA_ORTHO_EPS: f64 = 1e-8;
const PCA_RESIDUAL_EPS: f64 = 1e-8;
const PCA_EIGSUM_EPS: f64 = 1e-8;
const PCA_VARIANCE_REL_EPS: f64 = 1e-6;
const PCA_RANK1_EPS: f64 = 1e-9;

/// Sample correlation matrix of the z-scored data (the matrix PCA
/// diagonalizes), built directly from the standardized rows.
fn correlation_of(matrix: &StandardizedMatrix) -> Vec<Vec<f64>> {
    let d = matrix.n_cols();
    let n = matrix.n_rows();
    let mut c = vec![vec![0.0; d]; d];
    for row in matrix.rows() {
        for p in 0..d {
            for q in 0..d {
                c[p][q] += row[p] * row[q];
            }
        }
    }
    for row in c.iter_mut() {
        for x in row.iter_mut() {
            *x /= (n - 1) as f64;
        }
    }
    c
}

fn check_pca_instance(vectors: &[FeatureVector], context: &str) {
    let d = 6;
    let matrix = standardize(vectors).unwrap();
    let model = pca_fit(&matrix).unwrap();

    for c1 in 0..d {
        for c2 in c1..d {
            let dot: f64 = (0..d).map(|r| model.loadings[r][c1] * model.loadings[r][c2]).sum();
            let expected = if c1 == c2 { 1.0 } else { 0.0 };
            assert!(
                (dot - expected).abs() <= PCA_ORTHO_EPS,
                "{context}: loadings {c1}·{c2} = {dot}, expected {expected}"
            );
        }
    }

    let corr = correlation_of(&matrix);
    for c in 0..d {
        for r in 0..d {
            let cl: f64 = (0..d).map(|s| corr[r][s] * model.loadings[s][c]).sum();
            let residual = cl - model.eigenvalues[c] * model.loadings[r][c];
            assert!(
                residual.abs() <= PCA_RESIDUAL_EPS,
                "{context}: eigen-equation residual {residual} at component {c}, row {r}"
            );
        }
    }

    let eigensum: f64 = model.eigenvalues.iter().sum();
    assert!(
        (eigensum - d as f64).abs() <= PCA_EIGSUM_EPS,
        "{context}: eigenvalues sum to {eigensum}"
    );

    let projections = pca_project(&model, &matrix, d).unwrap();
    let n = projections.len();
    for c in 0..d {
        let lambda = model.eigenvalues[c];
        if lambda <= PCA_VARIANCE_REL_EPS {
            continue; // relative comparison is meaningless at rank deficiency
        }
        let mean: f64 = projections.iter().map(|p| p[c]).sum::<f64>() / n as f64;
        let variance: f64 = projections
            .iter()
            .map(|p| (p[c] - mean) * (p[c] - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        assert!(
            (variance - lambda).abs() <= PCA_VARIANCE_REL_EPS * lambda,
            "{context}: projected variance {variance} vs eigenvalue {lambda} \
             at component {c}"
        );
    }
}

#[test]
fn criterion_06_pca_invariants_and_rank1_fixture() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    for instance in 0..20 {
        let n = rng.random_range(30..=120);
        let vectors: Vec<FeatureVector> = (0..n)
            .map(|_| FeatureVector {
                ratio: rng.random_range(0.01..10.0),
                mean_gap: rng.random_range(1.0..12.0),
                max_gap: rng.random_range(1..=24),
                num_cons: rng.random_range(0..=36),
                mean_month: rng.random_range(1.0..300.0),
                sd: rng.random_range(0.0..100.0),
            })
            .collect();
        check_pca_instance(&vectors, &format!("instance {instance} (n={n})"));
    }

    // Every feature an increasing affine map of the same index: the
    // correlation matrix has rank 1, so PC1 must explain everything.
    let rank1: Vec<FeatureVector> = (0..40)
        .map(|i| {
            let x = i as f64;
            FeatureVector {
                ratio: 0.5 + 0.25 * x,
                mean_gap: 1.0 + x,
                max_gap: 1 + 2 * i,
                num_cons: 3 * i,
                mean_month: 10.0 + 5.0 * x,
                sd: 2.0 + 0.5 * x,
            }
        })
        .collect();
    check_pca_instance(&rank1, "rank-1 fixture");
    let model = pca_fit(&standardize(&rank1).unwrap()).unwrap();
    assert!(
        model.explained[0] >= 1.0 - PCA_RANK1_EPS,
        "rank-1 fixture: PC1 explains {} of the variance, expected 100%",
        model.explained[0]
    );
    println!(
        "criterion 6: PCA invariants hold on 20 random instances; rank-1 PC1 \
         explains {:.12}",
        model.explained[0]
    );
}

// --------------------------------------------------------------------
// Criterion 7 — ANOVA fixture F = 13.5 exactly, p within ±0.003 of a
// 10⁶-sample Monte Carlo oracle; studentized-range q(k=2, df=10⁶) within
// 1e-3 of 2.7718; incomplete beta series vs continued fraction ≤ 1e-10.
// --------------------------------------------------------------------

const MC_SAMPLES: usize = 1_000_000;
const MC_EPS: f64 = 0.003;
const SRANGE_EXPECTED: f64 = 2.7718;
const SRANGE_EPS: f64 = 1e-3;
const BETA_CROSS_EPS: f64 = 1e-10;

#[test]
fn criterion_07_statistics_against_oracles() {
    let groups = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
    let result = anova_oneway(&groups).unwrap();
    assert_eq!(result.f, 13.5, "ANOVA fixture must yield F = 13.5 exactly");
    assert_eq!((result.df_between, result.df_within), (1, 4));

    // Monte Carlo oracle for the p-value: share of F(1,4) draws ≥ 13.5.
    let f_dist = FisherF::new(1.0, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let hits = (0..MC_SAMPLES)
        .filter(|_| f_dist.sample(&mut rng) >= 13.5)
        .count();
    let p_mc = hits as f64 / MC_SAMPLES as f64;
    assert!(
        (result.p - p_mc).abs() <= MC_EPS,
        "ANOVA p = {} vs Monte Carlo {} (|Δ| > {MC_EPS})",
        result.p,
        p_mc
    );

    let q = srange_quantile(0.95, 2, 1e6);
    assert!(
        (q - SRANGE_EXPECTED).abs() <= SRANGE_EPS,
        "q(0.95; k=2, df=10⁶) = {q}, expected {SRANGE_EXPECTED} ± {SRANGE_EPS}"
    );

    // The continued-fraction evaluator and the hypergeometric power series
    // are independent algorithms; they must agree to 1e-10 relative error
    // across a grid spanning small/large shapes and both tail regimes.
    let shapes = [0.5, 1.0, 2.5, 7.0, 30.0];
    let xs = [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99];
    let mut worst: f64 = 0.0;
    for &a in &shapes {
        for &b in &shapes {
            for &x in &xs {
                let cf = beta_inc(a, b, x);
                let series = beta_inc_series(a, b, x);
                let rel = (cf - series).abs() / series.abs().max(f64::MIN_POSITIVE);
                assert!(
                    rel <= BETA_CROSS_EPS,
                    "I_{x}({a},{b}): continued fraction {cf} vs series {series} \
                     (rel err {rel:.3e})"
                );
                worst = worst.max(rel);
            }
        }
    }
    println!(
        "criterion 7: F = 13.5, p = {:.6} vs MC {:.6}; q = {q:.6}; worst beta \
         cross-check rel err {worst:.2e}",
        result.p, p_mc
    );
}

// --------------------------------------------------------------------
// Criterion 8 — end-to-end recovery on the default 4-archetype cohort:
// select_k chooses 4 and ARI ≥ 0.9 in ≥ 18/20 seeds; labels match the
// planted archetypes (cluster majority) whenever ARI ≥ 0.9.
// --------------------------------------------------------------------

const RECOVERY_SEEDS: std::ops::RangeInclusive<u64> = 1..=20;
const RECOVERY_MIN_JOINT: usize = 18;
const RECOVERY_ARI: f64 = 0.9;
const RECOVERY_BUDGET: Duration = Duration::from_secs(60);

#[test]
fn criterion_08_archetype_recovery_across_seeds() {
    let start = Instant::now();
    let mut joint = 0;
    let mut qualifying = 0;
    for seed in RECOVERY_SEEDS {
        let spec = SynthSpec {
            seed,
            ..SynthSpec::default()
        };
        let cohort = generate_cohort(&spec).unwrap();
        let mut histories = BTreeMap::new();
        let mut planted: BTreeMap<ContributorKey, Archetype> = BTreeMap::new();
        for member in &cohort.members {
            let key = member.history.key();
            planted.insert(key.clone(), member.label);
            histories.insert(key, member.history.clone());
        }
        let kept = filter_contributors(&histories, 100);
        assert_eq!(kept.len(), 185, "seed {seed}: generator must survive its own filter");

        let keys: Vec<ContributorKey> = kept.keys().cloned().collect();
        let vectors: Vec<FeatureVector> = kept
            .values()
            .map(compute_features)
            .collect::<wikiprofiles::Result<_>>()
            .unwrap();
        let matrix = standardize(&vectors).unwrap();
        let dist = DistanceMatrix::from_rows(&matrix);

        let selection = select_k(&matrix, &dist, 2, 10).unwrap();
        // The archetype count is 4; ARI and labels are judged on the k = 4
        // partition, which is the selected one whenever selection.k == 4.
        let four = pam(&dist, 4).unwrap();
        let truth: Vec<u32> = keys
            .iter()
            .map(|k| planted[k] as u32 + 1)
            .collect();
        let ari = adjusted_rand_index(&four.assignment, &truth).unwrap();
        if selection.k == 4 && ari >= RECOVERY_ARI {
            joint += 1;
        }

        if ari >= RECOVERY_ARI {
            qualifying += 1;
            let profile = label_clusters(&vectors, &four.assignment).unwrap();
            for cluster in &profile.clusters {
                let mut counts: BTreeMap<Archetype, usize> = BTreeMap::new();
                for (i, &a) in four.assignment.iter().enumerate() {
                    if a == cluster.id {
                        *counts.entry(planted[&keys[i]]).or_default() += 1;
                    }
                }
                let majority = counts
                    .iter()
                    .max_by_key(|(_, &count)| count)
                    .map(|(&archetype, _)| archetype)
                    .unwrap();
                assert_eq!(
                    cluster.label,
                    Some(majority),
                    "seed {seed}: cluster {} labeled {:?} but its majority planted \
                     archetype is {majority:?}",
                    cluster.id,
                    cluster.label
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        joint >= RECOVERY_MIN_JOINT,
        "select_k = 4 with ARI ≥ {RECOVERY_ARI} on only {joint}/20 seeds \
         (need ≥ {RECOVERY_MIN_JOINT})"
    );
    assert!(elapsed < RECOVERY_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 8: joint success on {joint}/20 seeds, labels verified on \
         {qualifying} qualifying seeds, in {elapsed:?}"
    );
}

// --------------------------------------------------------------------
// Criterion 9 — ingestion: the hand-crafted fixture produces exactly the
// expected filtered set; the streaming bound holds on a dump carrying
// 1 GiB of revision text.
// --------------------------------------------------------------------

/// Peak resident allocation allowed while streaming the 1 GiB dump. The
/// text alone is four times this, so a parser that buffers pages or
/// revisions in memory cannot pass.
const STREAM_PEAK_LIMIT: usize = 256 * 1024 * 1024;

const BIG_TEXT_LEN: usize = 64 * 1024;
const BIG_REVS_PER_PAGE: usize = 16;
const BIG_PAGES: usize = 1024; // 1024 × 16 × 64 KiB = 1 GiB of text
const BIG_WRITERS: usize = 8;

/// Streaming generator for the 1 GiB dump: emits XML chunk by chunk, so
/// the test itself never materializes the document either.
struct BigDump {
    chunk: Vec<u8>,
    pos: usize,
    page: usize,
    rev: usize,
    text: Vec<u8>,
    state: BigDumpState,
}

#[derive(PartialEq)]
enum BigDumpState {
    Header,
    PageOpen,
    Revision,
    PageClose,
    Footer,
    Done,
}

impl BigDump {
    fn new() -> Self {
        let mut text = b"streaming bound fixture text ".repeat(BIG_TEXT_LEN / 16);
        text.truncate(BIG_TEXT_LEN);
        BigDump {
            chunk: Vec::new(),
            pos: 0,
            page: 0,
            rev: 0,
            text,
            state: BigDumpState::Header,
        }
    }

    fn refill(&mut self) {
        use std::io::Write as _;
        self.chunk.clear();
        self.pos = 0;
        match self.state {
            BigDumpState::Header => {
                self.chunk.extend_from_slice(
                    b"<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\">\n",
                );
                self.state = BigDumpState::PageOpen;
            }
            BigDumpState::PageOpen => {
                write!(
                    self.chunk,
                    "<page><title>Page {p}</title><ns>0</ns><id>{id}</id>\n",
                    p = self.page,
                    id = self.page + 1
                )
                .unwrap();
                self.rev = 0;
                self.state = BigDumpState::Revision;
            }
            BigDumpState::Revision => {
                let global = self.page * BIG_REVS_PER_PAGE + self.rev;
                let writer = global % BIG_WRITERS;
                let month = (global / BIG_WRITERS) % 60;
                write!(
                    self.chunk,
                    "<revision><id>{id}</id>\
                     <timestamp>{y:04}-{m:02}-01T00:00:00Z</timestamp>\
                     <contributor><username>Writer{writer}</username>\
                     <id>{wid}</id></contributor>\
                     <text xml:space=\"preserve\">",
                    id = global + 1,
                    y = 2004 + month / 12,
                    m = month % 12 + 1,
                    wid = 9001 + writer,
                )
                .unwrap();
                self.chunk.extend_from_slice(&self.text);
                self.chunk.extend_from_slice(b"</text></revision>\n");
                self.rev += 1;
                if self.rev == BIG_REVS_PER_PAGE {
                    self.state = BigDumpState::PageClose;
                }
            }
            BigDumpState::PageClose => {
                self.chunk.extend_from_slice(b"</page>\n");
                self.page += 1;
                self.state = if self.page == BIG_PAGES {
                    BigDumpState::Footer
                } else {
                    BigDumpState::PageOpen
                };
            }
            BigDumpState::Footer => {
                self.chunk.extend_from_slice(b"</mediawiki>\n");
                self.state = BigDumpState::Done;
            }
            BigDumpState::Done => {}
        }
    }
}

impl Read for BigDump {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        while self.pos == self.chunk.len() {
            if self.state == BigDumpState::Done {
                return Ok(0);
            }
            self.refill();
        }
        let take = buf.len().min(self.chunk.len() - self.pos);
        buf[..take].copy_from_slice(&self.chunk[self.pos..self.pos + take]);
        self.pos += take;
        Ok(take)
    }
}

#[test]
fn criterion_09_ingestion_filters_and_streaming_bound() {
    // Part 1: the fixture roster — registered prolific, anonymous,
    // bot-named, single-month, exactly-100, and 101-edit contributors —
    // must filter to exactly {Prolific, JustOver}.
    let xml = fixture_dump();
    let mut parser = parse_dump(xml.as_bytes(), IngestConfig::default());
    let histories = aggregate_histories(parser.by_ref().map(|ev| ev.unwrap()));
    let stats = parser.stats();
    assert_eq!(stats.pages, FIXTURE_PAGES);
    assert_eq!(stats.revisions, FIXTURE_REVISIONS);
    assert_eq!(stats.skipped_total(), 0, "the fixture has no malformed revisions");
    assert_eq!(histories.len(), 6, "six distinct contributors in the fixture");
    assert!(
        histories[&ContributorKey::Id(2)].contributor.bot,
        "TidyBot must be flagged by the name heuristic"
    );
    let kept = filter_contributors(&histories, 100);
    let kept_keys: Vec<ContributorKey> = kept.keys().cloned().collect();
    assert_eq!(
        kept_keys,
        fixture_expected_kept(),
        "filter must keep exactly the registered non-bots with > 100 edits \
         across ≥ 2 months"
    );
    for history in kept.values() {
        compute_features(history).unwrap();
    }

    // Part 2: stream a dump carrying 1 GiB of revision text. The whole
    // process must stay far below the text volume; the generator and the
    // parser both run chunk by chunk.
    let before = PEAK.load(Ordering::Relaxed);
    let mut parser = parse_dump(
        std::io::BufReader::new(BigDump::new()),
        IngestConfig::default(),
    );
    let histories = aggregate_histories(parser.by_ref().map(|ev| ev.unwrap()));
    let stats = parser.stats();
    assert_eq!(stats.pages, BIG_PAGES as u64);
    assert_eq!(stats.revisions, (BIG_PAGES * BIG_REVS_PER_PAGE) as u64);
    assert_eq!(histories.len(), BIG_WRITERS);
    for history in histories.values() {
        assert_eq!(
            history.total_edits() as usize,
            BIG_PAGES * BIG_REVS_PER_PAGE / BIG_WRITERS
        );
        assert_eq!(history.active_months(), 60);
    }
    let peak = PEAK.load(Ordering::Relaxed);
    assert!(
        peak < STREAM_PEAK_LIMIT,
        "peak allocation {} MiB while streaming a 1 GiB-text dump (limit {} MiB)",
        peak >> 20,
        STREAM_PEAK_LIMIT >> 20
    );
    println!(
        "criterion 9: filtered set exact; peak allocation {} MiB (was {} MiB \
         before the stream) against 1024 MiB of text",
        peak >> 20,
        before >> 20
    );
}

// --------------------------------------------------------------------
// Criterion 10 — every stage, re-run with the same inputs and any thread
// count, produces byte-identical outputs. Exercised through the real
// binary: ingest on the fixture dump, then the full synthetic chain.
// --------------------------------------------------------------------

fn run_stage(root: &Path, out_dir: &Path, threads: usize, args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_wikiprofiles"))
        .current_dir(root)
        .arg("--out-dir")
        .arg(out_dir)
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .expect("failed to launch the pipeline binary");
    assert!(
        output.status.success(),
        "stage {args:?} failed:\n{}{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Run ingest on the fixture dump plus the full synthetic chain, all under
/// `root`, with every stage pinned to `threads` workers.
fn run_pipeline(root: &Path, threads: usize) {
    let dump = root.join("dump.xml");
    std::fs::write(&dump, fixture_dump()).unwrap();
    let fixture = root.join("fixture");
    let cohort = root.join("cohort");
    run_stage(root, &fixture, threads, &["ingest", dump.to_str().unwrap()]);
    run_stage(root, &cohort, threads, &["synth"]);
    run_stage(root, &cohort, threads, &["features", "cohort/histories.jsonl"]);
    run_stage(
        root,
        &cohort,
        threads,
        &["cluster", "cohort/features.csv", "--k-range", "2..6"],
    );
    run_stage(
        root,
        &cohort,
        threads,
        &[
            "interpret",
            "cohort/clustering.json",
            "--features",
            "cohort/features.csv",
        ],
    );
    run_stage(
        root,
        &cohort,
        threads,
        &[
            "report",
            "--features",
            "cohort/features.csv",
            "--clustering",
            "cohort/clustering.json",
            "--interpret",
            "cohort/interpret.json",
            "--svg",
        ],
    );
}

/// Every produced artifact under `root`, keyed by relative path.
fn collect_artifacts(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path.strip_prefix(root).unwrap();
                out.insert(
                    rel.to_str().unwrap().to_string(),
                    std::fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn criterion_10_byte_identical_across_reruns_and_threads() {
    let base = tempfile::tempdir().unwrap();
    let single = base.path().join("threads-1");
    let pooled = base.path().join("threads-4");
    std::fs::create_dir_all(&single).unwrap();
    std::fs::create_dir_all(&pooled).unwrap();

    run_pipeline(&single, 1);
    run_pipeline(&pooled, 4);

    let first = collect_artifacts(&single);
    let other = collect_artifacts(&pooled);
    assert_eq!(
        first.keys().collect::<Vec<_>>(),
        other.keys().collect::<Vec<_>>(),
        "the two runs must produce the same artifact set"
    );
    for (name, bytes) in &first {
        assert_eq!(
            bytes, &other[name],
            "{name} differs between --threads 1 and --threads 4"
        );
    }

    // Re-run every stage in place: outputs must be overwritten with
    // byte-identical content.
    run_pipeline(&single, 1);
    let rerun = collect_artifacts(&single);
    assert_eq!(first.len(), rerun.len());
    for (name, bytes) in &first {
        assert_eq!(bytes, &rerun[name], "{name} changed on re-run");
    }
    println!(
        "criterion 10: {} artifacts byte-identical across thread counts and re-runs",
        first.len()
    );
}
