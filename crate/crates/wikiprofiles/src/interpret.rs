//! Interpretation of a chosen partition: per-cluster feature profiles,
//! one-way ANOVA and Tukey HSD per feature, and — for four-cluster
//! partitions — a deterministic mapping onto the behavioral archetypes.
//!
//! The archetype rule works on cluster medians only: "top" contributors
//! show the highest edit ratio; among the rest, "on-a-mission" contributors
//! have the longest maximum gap (they leave for long stretches); of the
//! remaining two, "regular" contributors string together more consecutive
//! active months; the last cluster is "casual". Exact median ties abort
//! with an error demanding manual labeling rather than guessing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cluster::validate::validate_assignment;
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::stats::{anova_oneway, tukey_hsd, AnovaResult, TukeyResult};
use crate::{Error, Result};

/// Significance level for the ANOVA-backed evidence lists and Tukey HSD.
pub const ALPHA: f64 = 0.05;

/// Feature-column indices the labeling rule reads.
const RATIO: usize = 0;
const MAX_GAP: usize = 2;
const NUM_CONS: usize = 3;

/// The four behavioral archetypes of a k = 4 partition.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    /// Intense bursts separated by long absences.
    OnAMission,
    /// Sporadic, low-volume editing.
    Casual,
    /// Sustained presence: many consecutive active months.
    Regular,
    /// Very high activity ratio; the heavy lifters.
    Top,
}

impl Archetype {
    pub fn as_str(self) -> &'static str {
        match self {
            Archetype::OnAMission => "on-a-mission",
            Archetype::Casual => "casual",
            Archetype::Regular => "regular",
            Archetype::Top => "top",
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Five-number summary of one feature within one cluster (boxplot data).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNum {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Whether a cluster median sits above or below the global median.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

/// One evidence entry: a feature whose between-cluster differences are
/// significant (ANOVA p ≤ α) and on which this cluster's median departs
/// from the global median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub feature: String,
    pub direction: Direction,
    /// ANOVA p-value of the feature (not of this cluster specifically).
    pub p: f64,
}

/// Profile of a single cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    /// 1-based cluster id as used in the assignment vector.
    pub id: u32,
    pub size: usize,
    /// Archetype name; present only for k = 4 partitions.
    pub label: Option<Archetype>,
    /// Per-feature medians, in [`FEATURE_NAMES`] order.
    pub medians: Vec<f64>,
    /// Per-feature five-number summaries, in [`FEATURE_NAMES`] order.
    pub summary: Vec<FiveNum>,
    pub evidence: Vec<Evidence>,
}

/// ANOVA and Tukey tables for one feature across clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub feature: String,
    pub anova: AnovaResult,
    pub tukey: TukeyResult,
}

/// Full interpretation of one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    /// Global per-feature medians, in [`FEATURE_NAMES`] order.
    pub global_medians: Vec<f64>,
    pub clusters: Vec<ClusterProfile>,
    /// Per-feature ANOVA/Tukey tables; absent when any cluster has fewer
    /// than two members (the tests' preconditions fail).
    pub stats: Option<Vec<FeatureStat>>,
}

/// Quantile of an unsorted sample by linear interpolation between order
/// statistics (the R type-7 / NumPy default convention).
fn quantile(values: &[f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty() && (0.0..=1.0).contains(&p));
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn five_num(values: &[f64]) -> FiveNum {
    FiveNum {
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        q1: quantile(values, 0.25),
        median: quantile(values, 0.5),
        q3: quantile(values, 0.75),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Among `candidates`, the cluster with the strictly largest median of
/// feature `col`. An exact tie for the maximum is refused.
fn pick_max(candidates: &[usize], medians: &[Vec<f64>], col: usize) -> Result<usize> {
    let best = *candidates
        .iter()
        .max_by(|&&a, &&b| medians[a][col].total_cmp(&medians[b][col]))
        .expect("candidate list is non-empty");
    let tied: Vec<u32> = candidates
        .iter()
        .filter(|&&c| medians[c][col] == medians[best][col])
        .map(|&c| c as u32 + 1)
        .collect();
    if tied.len() > 1 {
        return Err(Error::Invalid(format!(
            "clusters {tied:?} tie on median {}; archetype labeling requires \
             manual resolution",
            FEATURE_NAMES[col]
        )));
    }
    Ok(best)
}

/// The §4 archetype rule over k = 4 cluster medians. Returns one label per
/// cluster, in cluster order.
fn assign_archetypes(medians: &[Vec<f64>]) -> Result<Vec<Archetype>> {
    debug_assert_eq!(medians.len(), 4);
    let mut remaining: Vec<usize> = (0..4).collect();
    let top = pick_max(&remaining, medians, RATIO)?;
    remaining.retain(|&c| c != top);
    let mission = pick_max(&remaining, medians, MAX_GAP)?;
    remaining.retain(|&c| c != mission);
    let regular = pick_max(&remaining, medians, NUM_CONS)?;
    remaining.retain(|&c| c != regular);
    let casual = remaining[0];

    let mut labels = vec![Archetype::Casual; 4];
    labels[top] = Archetype::Top;
    labels[mission] = Archetype::OnAMission;
    labels[regular] = Archetype::Regular;
    labels[casual] = Archetype::Casual;
    Ok(labels)
}

/// Build the full interpretation of a partition: per-cluster boxplot
/// summaries and medians, per-feature ANOVA + Tukey tables (when every
/// cluster has ≥ 2 members), significance-backed evidence lists, and — for
/// k = 4 — archetype labels.
pub fn label_clusters(
    features: &[FeatureVector],
    assignment: &[u32],
) -> Result<ProfileReport> {
    let n = features.len();
    let k = validate_assignment(n, assignment)?;

    // values[c][f] = feature f of every member of cluster c.
    let mut values: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); FEATURE_NAMES.len()]; k];
    for (v, &a) in features.iter().zip(assignment) {
        let row = v.to_array();
        for (f, &x) in row.iter().enumerate() {
            values[a as usize - 1][f].push(x);
        }
    }

    let global_medians: Vec<f64> = (0..FEATURE_NAMES.len())
        .map(|f| {
            let col: Vec<f64> = features.iter().map(|v| v.to_array()[f]).collect();
            quantile(&col, 0.5)
        })
        .collect();

    let medians: Vec<Vec<f64>> = values
        .iter()
        .map(|cluster| cluster.iter().map(|col| quantile(col, 0.5)).collect())
        .collect();

    let stats = if values.iter().all(|cluster| cluster[0].len() >= 2) {
        let mut per_feature = Vec::with_capacity(FEATURE_NAMES.len());
        for (f, name) in FEATURE_NAMES.iter().enumerate() {
            let groups: Vec<Vec<f64>> =
                values.iter().map(|cluster| cluster[f].clone()).collect();
            per_feature.push(FeatureStat {
                feature: name.to_string(),
                anova: anova_oneway(&groups)?,
                tukey: tukey_hsd(&groups, ALPHA)?,
            });
        }
        Some(per_feature)
    } else {
        None
    };

    let labels = if k == 4 {
        assign_archetypes(&medians)?.into_iter().map(Some).collect()
    } else {
        vec![None; k]
    };

    let clusters = (0..k)
        .map(|c| {
            let evidence = match &stats {
                Some(table) => table
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.anova.p <= ALPHA)
                    .filter_map(|(f, s)| {
                        let direction = if medians[c][f] > global_medians[f] {
                            Direction::Above
                        } else if medians[c][f] < global_medians[f] {
                            Direction::Below
                        } else {
                            return None;
                        };
                        Some(Evidence {
                            feature: s.feature.clone(),
                            direction,
                            p: s.anova.p,
                        })
                    })
                    .collect(),
                None => Vec::new(),
            };
            ClusterProfile {
                id: c as u32 + 1,
                size: values[c][0].len(),
                label: labels[c],
                medians: medians[c].clone(),
                summary: values[c].iter().map(|col| five_num(col)).collect(),
                evidence,
            }
        })
        .collect();

    Ok(ProfileReport {
        n,
        k,
        alpha: ALPHA,
        global_medians,
        clusters,
        stats,
    })
}
