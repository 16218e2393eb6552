//! Final report assembly: one JSON document, a Markdown rendering, and
//! optional SVG plots (PCA scatters, validation curves, feature boxplots).
//!
//! The report is assembled from the three upstream artifacts — the feature
//! table, the clustering file, and the interpretation file — after checking
//! that they describe the same contributors in the same order. Rendering is
//! pure string formatting, so identical inputs give byte-identical output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::KDiagnostic;
use crate::features::FEATURE_NAMES;
use crate::interpret::{Archetype, ClusterProfile, ProfileReport};
use crate::io::{ClusteringFile, FeatureRow, InterpretFile};
use crate::stats::PcaModel;
use crate::{Error, Result};

pub const REPORT_SCHEMA: &str = "wikiprofiles/report";
pub const REPORT_VERSION: u32 = 1;

/// Okabe–Ito palette: distinguishable under the common color-vision
/// deficiencies, cycled when k > 8.
const PALETTE: [&str; 8] = [
    "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9",
    "#f0e442", "#999999",
];

/// One row of the cluster overview table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    /// 1-based cluster id, matching the assignment vector.
    pub id: u32,
    pub size: usize,
    /// Fraction of all contributors in this cluster.
    pub share: f64,
    pub label: Option<Archetype>,
    /// Contributor key of the cluster's medoid.
    pub medoid: String,
}

/// The machine-readable final report (`report.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub avg_silhouette: f64,
    pub within_ss: f64,
    pub clusters: Vec<ClusterSummary>,
    /// Medians, quartiles, evidence, and ANOVA/Tukey tables per feature.
    pub profile: ProfileReport,
    pub pca: PcaModel,
    /// Diagnostics for every k scanned during model selection.
    pub validation: Vec<KDiagnostic>,
}

/// Combine the three stage artifacts into a [`Report`].
///
/// Fails with [`Error::Invalid`] when the artifacts disagree about the
/// cohort (different lengths, orders, or cluster counts).
pub fn build_report(
    features: &[FeatureRow],
    clustering: &ClusteringFile,
    interpret: &InterpretFile,
) -> Result<Report> {
    let n = clustering.contributors.len();
    if features.len() != n {
        return Err(Error::Invalid(format!(
            "feature table has {} rows but the clustering describes {n} contributors",
            features.len()
        )));
    }
    for (row, name) in features.iter().zip(&clustering.contributors) {
        let key = row.key.to_string();
        if key != *name {
            return Err(Error::Invalid(format!(
                "artifact mismatch: feature row {key} vs clustering row {name}"
            )));
        }
    }
    let profile = &interpret.profile;
    if profile.n != n || profile.k != clustering.k {
        return Err(Error::Invalid(format!(
            "interpretation covers n = {}, k = {} but the clustering has n = {n}, k = {}",
            profile.n, profile.k, clustering.k
        )));
    }
    if interpret.projections.len() != n {
        return Err(Error::Invalid(format!(
            "{} PCA projections for {n} contributors",
            interpret.projections.len()
        )));
    }

    let clusters = profile
        .clusters
        .iter()
        .map(|c| {
            let medoid_row = clustering.medoids[c.id as usize - 1];
            ClusterSummary {
                id: c.id,
                size: c.size,
                share: c.size as f64 / n as f64,
                label: c.label,
                medoid: clustering.contributors[medoid_row].clone(),
            }
        })
        .collect();

    Ok(Report {
        schema: REPORT_SCHEMA.into(),
        version: REPORT_VERSION,
        n,
        k: clustering.k,
        avg_silhouette: clustering.avg_silhouette,
        within_ss: clustering.within_ss,
        clusters,
        profile: profile.clone(),
        pca: interpret.pca.clone(),
        validation: clustering.validation.clone(),
    })
}

pub fn write_report(path: &Path, report: &Report) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Invalid(format!("serializing report: {e}")))?;
    text.push('\n');
    crate::io::write_bytes(path, text.as_bytes())
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = crate::io::read_to_string(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let report: Report = serde_path_to_error::deserialize(de).map_err(|e| {
        Error::schema(
            path.display().to_string(),
            e.inner().line() as u64,
            e.path().to_string(),
            e.inner().to_string(),
        )
    })?;
    if report.schema != REPORT_SCHEMA || report.version != REPORT_VERSION {
        return Err(Error::schema(
            path.display().to_string(),
            1,
            "schema",
            format!("expected {REPORT_SCHEMA} v{REPORT_VERSION}"),
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Markdown
// ---------------------------------------------------------------------------

/// Format a number for prose/tables: fixed notation in a readable range,
/// scientific outside it.
fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (0.001..100_000.0).contains(&a) {
        let s = format!("{x:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.3e}")
    }
}

fn fmt_pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn cluster_heading(c: &ClusterProfile) -> String {
    match c.label {
        Some(label) => format!("{} ({label})", c.id),
        None => format!("{}", c.id),
    }
}

/// Render the human-readable Markdown twin of the JSON report.
pub fn render_markdown(report: &Report) -> String {
    let mut md = String::new();
    let profile = &report.profile;

    let _ = writeln!(md, "# Contributor profiles\n");
    let _ = writeln!(
        md,
        "{} contributors in {} clusters; average silhouette width {}, \
         within-cluster sum of squares {}.\n",
        report.n,
        report.k,
        fmt_num(report.avg_silhouette),
        fmt_num(report.within_ss),
    );

    let _ = writeln!(md, "## Clusters\n");
    let _ = writeln!(md, "| cluster | label | size | share | medoid |");
    let _ = writeln!(md, "|--------:|-------|-----:|------:|--------|");
    for c in &report.clusters {
        let label = c.label.map_or("—".to_string(), |l| l.to_string());
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | `{}` |",
            c.id,
            label,
            c.size,
            fmt_pct(c.share),
            c.medoid
        );
    }

    let _ = writeln!(md, "\n## Feature medians\n");
    let mut header = String::from("| feature | global |");
    let mut rule = String::from("|---------|-------:|");
    for c in &profile.clusters {
        let _ = write!(header, " {} |", cluster_heading(c));
        rule.push_str("------:|");
    }
    let _ = writeln!(md, "{header}");
    let _ = writeln!(md, "{rule}");
    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        let mut row = format!("| {name} | {} |", fmt_num(profile.global_medians[f]));
        for c in &profile.clusters {
            let _ = write!(row, " {} |", fmt_num(c.medians[f]));
        }
        let _ = writeln!(md, "{row}");
    }

    let _ = writeln!(md, "\n## Quartiles\n");
    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        let _ = writeln!(md, "### {name}\n");
        let _ = writeln!(md, "| cluster | min | q1 | median | q3 | max |");
        let _ = writeln!(md, "|--------:|----:|---:|-------:|---:|----:|");
        for c in &profile.clusters {
            let s = &c.summary[f];
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {} |",
                cluster_heading(c),
                fmt_num(s.min),
                fmt_num(s.q1),
                fmt_num(s.median),
                fmt_num(s.q3),
                fmt_num(s.max)
            );
        }
        md.push('\n');
    }

    let _ = writeln!(md, "## Evidence\n");
    let _ = writeln!(
        md,
        "Features with significant between-cluster differences (ANOVA p ≤ {}) \
         on which a cluster's median departs from the global median.\n",
        fmt_num(profile.alpha)
    );
    for c in &profile.clusters {
        if c.evidence.is_empty() {
            let _ = writeln!(md, "- cluster {}: none", cluster_heading(c));
            continue;
        }
        let items: Vec<String> = c
            .evidence
            .iter()
            .map(|e| {
                let dir = match e.direction {
                    crate::interpret::Direction::Above => "above",
                    crate::interpret::Direction::Below => "below",
                };
                format!("{} {} global (p = {})", e.feature, dir, fmt_num(e.p))
            })
            .collect();
        let _ = writeln!(md, "- cluster {}: {}", cluster_heading(c), items.join("; "));
    }

    let _ = writeln!(md, "\n## Principal components\n");
    let _ = writeln!(md, "| component | eigenvalue | explained | cumulative |");
    let _ = writeln!(md, "|-----------|-----------:|----------:|-----------:|");
    let mut cumulative = 0.0;
    for (i, (lambda, share)) in report
        .pca
        .eigenvalues
        .iter()
        .zip(&report.pca.explained)
        .enumerate()
    {
        cumulative += share;
        let _ = writeln!(
            md,
            "| PC{} | {} | {} | {} |",
            i + 1,
            fmt_num(*lambda),
            fmt_pct(*share),
            fmt_pct(cumulative)
        );
    }

    let _ = writeln!(md, "\n### Loadings\n");
    let d = report.pca.eigenvalues.len();
    let mut header = String::from("| feature |");
    let mut rule = String::from("|---------|");
    for i in 0..d {
        let _ = write!(header, " PC{} |", i + 1);
        rule.push_str("----:|");
    }
    let _ = writeln!(md, "{header}");
    let _ = writeln!(md, "{rule}");
    for (f, name) in FEATURE_NAMES.iter().enumerate().take(report.pca.loadings.len()) {
        let mut row = format!("| {name} |");
        for c in 0..d {
            let _ = write!(row, " {} |", fmt_num(report.pca.loadings[f][c]));
        }
        let _ = writeln!(md, "{row}");
    }

    match &profile.stats {
        Some(stats) => {
            let _ = writeln!(md, "\n## ANOVA\n");
            let _ = writeln!(md, "| feature | F | df | p | significant |");
            let _ = writeln!(md, "|---------|--:|---:|--:|:-----------:|");
            for s in stats {
                let sig = if s.anova.p <= profile.alpha { "yes" } else { "no" };
                let flag = if s.anova.degenerate { " (degenerate)" } else { "" };
                let _ = writeln!(
                    md,
                    "| {} | {} | {}, {} | {}{flag} | {sig} |",
                    s.feature,
                    fmt_num(s.anova.f),
                    s.anova.df_between,
                    s.anova.df_within,
                    fmt_num(s.anova.p)
                );
            }

            let _ = writeln!(md, "\n## Tukey HSD\n");
            for s in stats {
                let _ = writeln!(md, "### {}\n", s.feature);
                let _ = writeln!(md, "| pair | diff | se | q | p adj | reject |");
                let _ = writeln!(md, "|------|-----:|---:|--:|------:|:------:|");
                for p in &s.tukey.pairs {
                    let _ = writeln!(
                        md,
                        "| {}–{} | {} | {} | {} | {} | {} |",
                        p.i + 1,
                        p.j + 1,
                        fmt_num(p.diff),
                        fmt_num(p.se),
                        fmt_num(p.q),
                        fmt_num(p.p_adj),
                        if p.reject { "yes" } else { "no" }
                    );
                }
                md.push('\n');
            }
        }
        None => {
            let _ = writeln!(
                md,
                "\n## ANOVA\n\nSkipped: at least one cluster has fewer than two \
                 members.\n"
            );
        }
    }

    let _ = writeln!(md, "## Model selection\n");
    let _ = writeln!(md, "| k | PAM cost | avg silhouette | within-SS |");
    let _ = writeln!(md, "|--:|---------:|---------------:|----------:|");
    for diag in &report.validation {
        let marker = if diag.k == report.k { " ←" } else { "" };
        let _ = writeln!(
            md,
            "| {}{marker} | {} | {} | {} |",
            diag.k,
            fmt_num(diag.pam_cost),
            fmt_num(diag.avg_silhouette),
            fmt_num(diag.within_ss)
        );
    }

    md
}

pub fn write_markdown(path: &Path, report: &Report) -> Result<()> {
    crate::io::write_bytes(path, render_markdown(report).as_bytes())
}

// ---------------------------------------------------------------------------
// SVG plots
// ---------------------------------------------------------------------------

/// Linear map of `v` from data range `(lo, hi)` to pixel range `(p0, p1)`.
fn scale(v: f64, lo: f64, hi: f64, p0: f64, p1: f64) -> f64 {
    if hi == lo {
        return f64::midpoint(p0, p1);
    }
    p0 + (v - lo) / (hi - lo) * (p1 - p0)
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(0.01..10_000.0).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.2}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

/// Pad a data range by 5% on both sides (and handle degenerate ranges).
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn color(cluster_id: u32) -> &'static str {
    PALETTE[(cluster_id as usize - 1) % PALETTE.len()]
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

/// Emit the axis frame plus 5 ticks per axis; returns closures' inputs only,
/// the caller keeps mapping with [`scale`].
fn draw_axes(
    svg: &mut String,
    frame: &Frame,
    (xlo, xhi): (f64, f64),
    (ylo, yhi): (f64, f64),
    x_label: &str,
    y_label: &str,
) {
    let _ = writeln!(
        svg,
        r##"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333" stroke-width="1"/>"##,
        frame.x0,
        frame.y1,
        frame.x1 - frame.x0,
        frame.y0 - frame.y1
    );
    for i in 0..5 {
        let t = i as f64 / 4.0;
        let xv = xlo + t * (xhi - xlo);
        let yv = ylo + t * (yhi - ylo);
        let xp = scale(xv, xlo, xhi, frame.x0, frame.x1);
        let yp = scale(yv, ylo, yhi, frame.y0, frame.y1);
        let _ = writeln!(
            svg,
            r##"  <line x1="{xp:.2}" y1="{:.2}" x2="{xp:.2}" y2="{:.2}" stroke="#333"/>"##,
            frame.y0,
            frame.y0 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{xp:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            frame.y0 + 16.0,
            fmt_tick(xv)
        );
        let _ = writeln!(
            svg,
            r##"  <line x1="{:.2}" y1="{yp:.2}" x2="{:.2}" y2="{yp:.2}" stroke="#333"/>"##,
            frame.x0 - 4.0,
            frame.x0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            frame.x0 - 7.0,
            yp + 3.5,
            fmt_tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{x_label}</text>"#,
        f64::midpoint(frame.x0, frame.x1),
        frame.y0 + 34.0
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{y_label}</text>"#,
        frame.x0 - 42.0,
        f64::midpoint(frame.y0, frame.y1),
        frame.x0 - 42.0,
        f64::midpoint(frame.y0, frame.y1)
    );
}

fn svg_open(width: u32, height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n  \
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

/// Scatter of two PCA components, one point per contributor, colored by
/// cluster. `dims` are 0-based component indices into the projection rows.
pub fn svg_pca_scatter(
    projections: &[Vec<f64>],
    assignment: &[u32],
    dims: (usize, usize),
    report: &Report,
) -> String {
    let (dx, dy) = dims;
    let xs: Vec<f64> = projections.iter().map(|p| p[dx]).collect();
    let ys: Vec<f64> = projections.iter().map(|p| p[dy]).collect();
    let (xlo, xhi) = padded(
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let (ylo, yhi) = padded(
        ys.iter().copied().fold(f64::INFINITY, f64::min),
        ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );

    let frame = Frame { x0: 60.0, x1: 430.0, y0: 400.0, y1: 30.0 };
    let mut svg = svg_open(580, 450);
    let x_label = format!("PC{} ({})", dx + 1, fmt_pct(report.pca.explained[dx]));
    let y_label = format!("PC{} ({})", dy + 1, fmt_pct(report.pca.explained[dy]));
    draw_axes(&mut svg, &frame, (xlo, xhi), (ylo, yhi), &x_label, &y_label);

    for ((x, y), &cluster) in xs.iter().zip(&ys).zip(assignment) {
        let _ = writeln!(
            svg,
            r#"  <circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.65"/>"#,
            scale(*x, xlo, xhi, frame.x0, frame.x1),
            scale(*y, ylo, yhi, frame.y0, frame.y1),
            color(cluster)
        );
    }

    for (i, c) in report.clusters.iter().enumerate() {
        let y = 40.0 + 18.0 * i as f64;
        let name = c.label.map_or_else(
            || format!("cluster {}", c.id),
            |l| format!("cluster {} ({l})", c.id),
        );
        let _ = writeln!(
            svg,
            r#"  <circle cx="445" cy="{:.2}" r="4" fill="{}"/>"#,
            y - 3.5,
            color(c.id)
        );
        let _ = writeln!(
            svg,
            r#"  <text x="454" y="{y:.2}" font-size="11">{name}</text>"#
        );
    }

    svg.push_str("</svg>\n");
    svg
}

/// Model-selection curves: average silhouette (left axis) and within-cluster
/// sum of squares (right axis) against k.
pub fn svg_validation_curves(validation: &[KDiagnostic], chosen_k: usize) -> String {
    let ks: Vec<f64> = validation.iter().map(|d| d.k as f64).collect();
    let sil: Vec<f64> = validation.iter().map(|d| d.avg_silhouette).collect();
    let wss: Vec<f64> = validation.iter().map(|d| d.within_ss).collect();
    let (xlo, xhi) = padded(ks[0], ks[ks.len() - 1]);
    let (slo, shi) = padded(
        sil.iter().copied().fold(f64::INFINITY, f64::min),
        sil.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let (wlo, whi) = padded(
        wss.iter().copied().fold(f64::INFINITY, f64::min),
        wss.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );

    let frame = Frame { x0: 60.0, x1: 480.0, y0: 320.0, y1: 40.0 };
    let mut svg = svg_open(580, 370);
    draw_axes(
        &mut svg,
        &frame,
        (xlo, xhi),
        (slo, shi),
        "k",
        "average silhouette",
    );
    // Right axis for within-SS.
    for i in 0..5 {
        let t = i as f64 / 4.0;
        let wv = wlo + t * (whi - wlo);
        let yp = scale(wv, wlo, whi, frame.y0, frame.y1);
        let _ = writeln!(
            svg,
            r##"  <line x1="{:.2}" y1="{yp:.2}" x2="{:.2}" y2="{yp:.2}" stroke="#333"/>"##,
            frame.x1,
            frame.x1 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="10" text-anchor="start">{}</text>"#,
            frame.x1 + 7.0,
            yp + 3.5,
            fmt_tick(wv)
        );
    }
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(90 {:.2} {:.2})">within-cluster SS</text>"#,
        frame.x1 + 48.0,
        f64::midpoint(frame.y0, frame.y1),
        frame.x1 + 48.0,
        f64::midpoint(frame.y0, frame.y1)
    );

    let polyline = |svg: &mut String, ys: &[f64], lo: f64, hi: f64, stroke: &str, dash: &str| {
        let points: Vec<String> = ks
            .iter()
            .zip(ys)
            .map(|(k, y)| {
                format!(
                    "{:.2},{:.2}",
                    scale(*k, xlo, xhi, frame.x0, frame.x1),
                    scale(*y, lo, hi, frame.y0, frame.y1)
                )
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"  <polyline points="{}" fill="none" stroke="{stroke}" stroke-width="2"{dash}/>"#,
            points.join(" ")
        );
        for point in &points {
            let (x, y) = point.split_once(',').unwrap();
            let _ = writeln!(
                svg,
                r#"  <circle cx="{x}" cy="{y}" r="3" fill="{stroke}"/>"#
            );
        }
    };
    polyline(&mut svg, &sil, slo, shi, PALETTE[0], "");
    polyline(&mut svg, &wss, wlo, whi, PALETTE[1], r#" stroke-dasharray="6 3""#);

    // Mark the chosen k.
    let xk = scale(chosen_k as f64, xlo, xhi, frame.x0, frame.x1);
    let _ = writeln!(
        svg,
        r##"  <line x1="{xk:.2}" y1="{:.2}" x2="{xk:.2}" y2="{:.2}" stroke="#333" stroke-dasharray="2 3"/>"##,
        frame.y0,
        frame.y1
    );

    let _ = writeln!(
        svg,
        r#"  <circle cx="70" cy="22" r="4" fill="{}"/><text x="79" y="26" font-size="11">avg silhouette</text>"#,
        PALETTE[0]
    );
    let _ = writeln!(
        svg,
        r#"  <circle cx="190" cy="22" r="4" fill="{}"/><text x="199" y="26" font-size="11">within-SS</text>"#,
        PALETTE[1]
    );

    svg.push_str("</svg>\n");
    svg
}

/// One feature's per-cluster boxplot, drawn from the five-number summaries
/// already in the profile (no raw data needed).
pub fn svg_feature_boxplot(report: &Report, feature: usize) -> String {
    let clusters = &report.profile.clusters;
    let lo = clusters
        .iter()
        .map(|c| c.summary[feature].min)
        .fold(f64::INFINITY, f64::min);
    let hi = clusters
        .iter()
        .map(|c| c.summary[feature].max)
        .fold(f64::NEG_INFINITY, f64::max);
    let (ylo, yhi) = padded(lo, hi);

    let frame = Frame { x0: 60.0, x1: 480.0, y0: 320.0, y1: 30.0 };
    let mut svg = svg_open(560, 370);
    draw_axes(
        &mut svg,
        &frame,
        (0.0, clusters.len() as f64),
        (ylo, yhi),
        "",
        FEATURE_NAMES[feature],
    );

    let slot = (frame.x1 - frame.x0) / clusters.len() as f64;
    let half_box = (slot * 0.3).min(40.0);
    for (i, c) in clusters.iter().enumerate() {
        let s = &c.summary[feature];
        let cx = frame.x0 + slot * (i as f64 + 0.5);
        let y = |v: f64| scale(v, ylo, yhi, frame.y0, frame.y1);
        let stroke = color(c.id);
        // Whiskers with end caps, then the interquartile box and median bar.
        for (a, b) in [(s.min, s.q1), (s.q3, s.max)] {
            let _ = writeln!(
                svg,
                r#"  <line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{stroke}"/>"#,
                y(a),
                y(b)
            );
        }
        for v in [s.min, s.max] {
            let _ = writeln!(
                svg,
                r#"  <line x1="{:.2}" y1="{2:.2}" x2="{:.2}" y2="{2:.2}" stroke="{stroke}"/>"#,
                cx - half_box / 2.0,
                cx + half_box / 2.0,
                y(v)
            );
        }
        let _ = writeln!(
            svg,
            r#"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{stroke}" fill-opacity="0.25" stroke="{stroke}"/>"#,
            cx - half_box,
            y(s.q3),
            2.0 * half_box,
            (y(s.q1) - y(s.q3)).max(0.5)
        );
        let _ = writeln!(
            svg,
            r#"  <line x1="{:.2}" y1="{2:.2}" x2="{:.2}" y2="{2:.2}" stroke="{stroke}" stroke-width="2"/>"#,
            cx - half_box,
            cx + half_box,
            y(s.median)
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{cx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            frame.y0 + 16.0,
            cluster_heading(c)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

/// All plots for one run: PCA scatters for every component pair kept in the
/// projections, the validation curves, and one boxplot per feature.
/// Returns `(file name, svg document)` pairs.
pub fn render_svgs(
    report: &Report,
    interpret: &InterpretFile,
    clustering: &ClusteringFile,
) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let dims = interpret.projections.first().map_or(0, Vec::len);
    for a in 0..dims {
        for b in (a + 1)..dims {
            files.push((
                format!("pca_pc{}_pc{}.svg", a + 1, b + 1),
                svg_pca_scatter(
                    &interpret.projections,
                    &clustering.assignment,
                    (a, b),
                    report,
                ),
            ));
        }
    }
    if !report.validation.is_empty() {
        files.push((
            "validation.svg".into(),
            svg_validation_curves(&report.validation, report.k),
        ));
    }
    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        files.push((format!("box_{name}.svg"), svg_feature_boxplot(report, f)));
    }
    files
}
