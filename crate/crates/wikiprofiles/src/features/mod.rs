//! Contributor filtering and the edit-timing feature set.
//!
//! All timing features run on a month-granular clock: a contributor's
//! "active months" are the calendar months containing at least one edit,
//! and gaps are differences between consecutive active month indices.
//! The edit ratio is the one day-granular quantity: total edits divided by
//! the inclusive day span from first to last edit.

mod matrix;

pub use matrix::{standardize, StandardizedMatrix};

use std::collections::BTreeMap;

use crate::dump::{ContributorHistory, ContributorKey};
use crate::{Error, Result};

/// Column names of the core feature set, in canonical order.
pub const FEATURE_NAMES: [&str; 6] = ["ratio", "mean_gap", "max_gap", "num_cons", "mean_month", "sd"];

/// Column names of the extended feature set: the six core features plus the
/// six that the correlation analysis drops as redundant.
pub const EXTENDED_FEATURE_NAMES: [&str; 12] = [
    "ratio",
    "mean_gap",
    "max_gap",
    "num_cons",
    "mean_month",
    "sd",
    "total_edits",
    "days_active",
    "min_gap",
    "median_gap",
    "median_month",
    "num_active_months",
];

/// The six core edit-timing features of one contributor.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureVector {
    /// Total edits divided by the inclusive day span of activity.
    pub ratio: f64,
    /// Mean gap (months) between consecutive active months; ≥ 1.
    pub mean_gap: f64,
    /// Largest gap (months) between consecutive active months; ≥ 1.
    pub max_gap: u32,
    /// Number of consecutive active-month pairs (gap exactly 1).
    pub num_cons: u32,
    /// Mean edits per active month.
    pub mean_month: f64,
    /// Sample standard deviation (T−1 divisor) of the monthly counts.
    pub sd: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.ratio,
            self.mean_gap,
            self.max_gap as f64,
            self.num_cons as f64,
            self.mean_month,
            self.sd,
        ]
    }
}

/// The twelve-feature extended set: the core six plus the droppable six.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExtendedFeatureVector {
    #[serde(flatten)]
    pub base: FeatureVector,
    pub total_edits: u64,
    /// Inclusive day span between first and last edit.
    pub days_active: u32,
    pub min_gap: u32,
    pub median_gap: f64,
    pub median_month: f64,
    pub num_active_months: u32,
}

impl ExtendedFeatureVector {
    pub fn to_array(&self) -> [f64; 12] {
        let b = self.base.to_array();
        [
            b[0],
            b[1],
            b[2],
            b[3],
            b[4],
            b[5],
            self.total_edits as f64,
            self.days_active as f64,
            self.min_gap as f64,
            self.median_gap,
            self.median_month,
            self.num_active_months as f64,
        ]
    }
}

/// Retain registered, non-bot contributors with more than `min_edits`
/// total edits and at least two distinct active months.
pub fn filter_contributors(
    histories: &BTreeMap<ContributorKey, ContributorHistory>,
    min_edits: u64,
) -> BTreeMap<ContributorKey, ContributorHistory> {
    histories
        .iter()
        .filter(|(_, h)| {
            h.contributor.is_registered()
                && !h.contributor.bot
                && h.total_edits() > min_edits
                && h.active_months() >= 2
        })
        .map(|(k, h)| (k.clone(), h.clone()))
        .collect()
}

/// Median of already-sorted values (mean of the two middles when even).
fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    assert!(n > 0);
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Inclusive day span between two instants (whole calendar days, both
/// endpoints' days counted; same day → 1).
fn inclusive_day_span(history: &ContributorHistory) -> i64 {
    (history.last_edit.date_naive() - history.first_edit.date_naive()).num_days() + 1
}

struct MonthProfile {
    counts: Vec<f64>,
    gaps: Vec<u32>,
    total: u64,
}

fn month_profile(history: &ContributorHistory) -> Result<MonthProfile> {
    if history.active_months() < 2 {
        return Err(Error::Invalid(format!(
            "contributor {} has {} active month(s); features require at least 2",
            history.key(),
            history.active_months()
        )));
    }
    let months: Vec<i32> = history.monthly_counts.keys().copied().collect();
    let counts: Vec<f64> = history.monthly_counts.values().map(|&c| c as f64).collect();
    let gaps: Vec<u32> = months.windows(2).map(|w| (w[1] - w[0]) as u32).collect();
    Ok(MonthProfile {
        counts,
        gaps,
        total: history.total_edits(),
    })
}

/// Compute the six core features. Requires ≥ 2 active months.
pub fn compute_features(history: &ContributorHistory) -> Result<FeatureVector> {
    let MonthProfile { counts, gaps, total } = month_profile(history)?;
    let t = counts.len() as f64;
    let mean_month = total as f64 / t;
    let variance = counts
        .iter()
        .map(|c| (c - mean_month) * (c - mean_month))
        .sum::<f64>()
        / (t - 1.0);
    let mean_gap = gaps.iter().map(|&g| g as f64).sum::<f64>() / gaps.len() as f64;
    let days = inclusive_day_span(history);
    Ok(FeatureVector {
        ratio: total as f64 / days as f64,
        mean_gap,
        max_gap: *gaps.iter().max().unwrap(),
        num_cons: gaps.iter().filter(|&&g| g == 1).count() as u32,
        mean_month,
        sd: variance.sqrt(),
    })
}

/// Compute the twelve-feature extended set. Requires ≥ 2 active months.
pub fn compute_extended_features(history: &ContributorHistory) -> Result<ExtendedFeatureVector> {
    let base = compute_features(history)?;
    let MonthProfile { counts, gaps, total } = month_profile(history)?;
    let mut sorted_gaps: Vec<f64> = gaps.iter().map(|&g| g as f64).collect();
    sorted_gaps.sort_by(f64::total_cmp);
    let mut sorted_counts = counts;
    sorted_counts.sort_by(f64::total_cmp);
    Ok(ExtendedFeatureVector {
        base,
        total_edits: total,
        days_active: inclusive_day_span(history) as u32,
        min_gap: *gaps.iter().min().unwrap(),
        median_gap: median_sorted(&sorted_gaps),
        median_month: median_sorted(&sorted_counts),
        num_active_months: gaps.len() as u32 + 1,
    })
}

/// Pearson correlation matrix of the extended feature columns.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorrelationMatrix {
    /// 12×12; entries touching an undefined column are NaN.
    pub values: Vec<Vec<f64>>,
    /// Per column: false when the column has zero variance, which makes its
    /// correlations undefined (flagged here rather than silently NaN).
    pub defined: Vec<bool>,
}

/// Correlation matrix over extended feature vectors. Requires ≥ 3 vectors.
pub fn correlation_matrix(vectors: &[ExtendedFeatureVector]) -> Result<CorrelationMatrix> {
    let n = vectors.len();
    if n < 3 {
        return Err(Error::Invalid(format!(
            "correlation matrix requires at least 3 vectors, got {n}"
        )));
    }
    let d = EXTENDED_FEATURE_NAMES.len();
    let rows: Vec<[f64; 12]> = vectors.iter().map(ExtendedFeatureVector::to_array).collect();
    let means: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let sum_sq: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| (r[j] - means[j]) * (r[j] - means[j])).sum())
        .collect();
    let defined: Vec<bool> = sum_sq.iter().map(|&s| s > 0.0).collect();
    let mut values = vec![vec![f64::NAN; d]; d];
    for i in 0..d {
        if !defined[i] {
            continue;
        }
        values[i][i] = 1.0;
        for j in (i + 1)..d {
            if !defined[j] {
                continue;
            }
            let cov: f64 = rows
                .iter()
                .map(|r| (r[i] - means[i]) * (r[j] - means[j]))
                .sum();
            let r = (cov / (sum_sq[i] * sum_sq[j]).sqrt()).clamp(-1.0, 1.0);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { values, defined })
}
