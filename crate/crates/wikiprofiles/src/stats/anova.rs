//! One-way ANOVA and the Tukey–Kramer HSD post-hoc test.

use crate::{Error, Result};

use super::special::f_sf;
use super::srange::srange_cdf;

/// Within-group variance this many orders of magnitude below the
/// between-group variance is treated as exactly zero (degenerate input).
const DEGENERACY_RATIO: f64 = 1e-12;

/// Result of a one-way ANOVA for a single feature.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnovaResult {
    pub ss_between: f64,
    pub ss_within: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub f: f64,
    pub p: f64,
    /// Set when the within-group variance is zero while group means differ;
    /// `f` is reported as infinity and `p` as 0.
    pub degenerate: bool,
}

/// One pairwise comparison from a Tukey HSD test. `i` and `j` are 0-based
/// indices into the input group list with `i < j`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TukeyPair {
    pub i: usize,
    pub j: usize,
    /// Mean difference, mean(i) − mean(j).
    pub diff: f64,
    /// Tukey–Kramer standard error √((MS_within/2)(1/nᵢ + 1/nⱼ)).
    pub se: f64,
    pub q: f64,
    pub p_adj: f64,
    pub reject: bool,
}

/// All-pairs Tukey–Kramer comparisons for one feature.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TukeyResult {
    pub alpha: f64,
    pub ms_within: f64,
    pub df_within: usize,
    pub pairs: Vec<TukeyPair>,
    pub degenerate: bool,
}

fn validate_groups(groups: &[Vec<f64>]) -> Result<()> {
    if groups.len() < 2 {
        return Err(Error::Invalid(format!(
            "ANOVA requires at least 2 groups, got {}",
            groups.len()
        )));
    }
    for (g, values) in groups.iter().enumerate() {
        if values.len() < 2 {
            return Err(Error::Invalid(format!(
                "ANOVA requires at least 2 members per group; group {g} has {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "ANOVA group {g} contains a non-finite value"
            )));
        }
    }
    Ok(())
}

fn group_means(groups: &[Vec<f64>]) -> (Vec<f64>, f64, usize) {
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let n_total: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n_total as f64;
    (means, grand, n_total)
}

/// One-way ANOVA over `groups` (each group a list of one feature's values).
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<AnovaResult> {
    validate_groups(groups)?;
    let (means, grand, n_total) = group_means(groups);
    let k = groups.len();

    let ss_between: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.len() as f64 * (m - grand) * (m - grand))
        .sum();
    let ss_within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|v| (v - m) * (v - m)).sum::<f64>())
        .sum();

    let df_between = k - 1;
    let df_within = n_total - k;
    let (f, p, degenerate) = if ss_within <= DEGENERACY_RATIO * ss_between {
        if ss_between == 0.0 {
            // All values identical everywhere: no variance to explain.
            (0.0, 1.0, false)
        } else {
            (f64::INFINITY, 0.0, true)
        }
    } else {
        let ms_b = ss_between / df_between as f64;
        let ms_w = ss_within / df_within as f64;
        let f = ms_b / ms_w;
        (f, f_sf(f, df_between as f64, df_within as f64), false)
    };

    Ok(AnovaResult {
        ss_between,
        ss_within,
        df_between,
        df_within,
        f,
        p,
        degenerate,
    })
}

/// Tukey–Kramer HSD over all group pairs at significance level `alpha`.
pub fn tukey_hsd(groups: &[Vec<f64>], alpha: f64) -> Result<TukeyResult> {
    validate_groups(groups)?;
    if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
        return Err(Error::Invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let (means, _, n_total) = group_means(groups);
    let k = groups.len();
    let df_within = n_total - k;
    let ss_within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|v| (v - m) * (v - m)).sum::<f64>())
        .sum();
    let ms_within = ss_within / df_within as f64;

    let mut degenerate = false;
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = means[i] - means[j];
            let se = (ms_within / 2.0 * (1.0 / groups[i].len() as f64 + 1.0 / groups[j].len() as f64))
                .sqrt();
            let (q, p_adj) = if se == 0.0 {
                if diff == 0.0 {
                    (0.0, 1.0)
                } else {
                    degenerate = true;
                    (f64::INFINITY, 0.0)
                }
            } else {
                let q = diff.abs() / se;
                (q, (1.0 - srange_cdf(q, k, df_within as f64)).clamp(0.0, 1.0))
            };
            pairs.push(TukeyPair {
                i,
                j,
                diff,
                se,
                q,
                p_adj,
                reject: p_adj < alpha,
            });
        }
    }

    Ok(TukeyResult {
        alpha,
        ms_within,
        df_within,
        pairs,
        degenerate,
    })
}
