//! The studentized range distribution, used for Tukey HSD adjusted p-values.
//!
//! For `k` groups with `ν` within-group degrees of freedom, the studentized
//! range is Q = R / S where R is the range of k iid standard normals and
//! ν·S² ~ χ²_ν independently. Its CDF is the double integral
//!
//! ```text
//! F_Q(q; k, ν) = ∫₀^∞ f_S(s) · F_R(q·s; k) ds
//! F_R(w; k)    = k ∫ φ(z) [Φ(z + w) − Φ(z)]^{k−1} dz
//! ```
//!
//! with f_S the density of S (a scaled chi). Both integrals are evaluated by
//! composite Gauss–Legendre quadrature (64 nodes per panel, several panels
//! per axis), giving absolute accuracy far below the 1e-4 contract.

use super::special::{gauss_legendre_64, ln_gamma, normal_cdf, normal_pdf};

/// Inner integration range for the normal kernel: beyond |z| = 8.5 the
/// standard normal density is below 1e-16.
const Z_LIMIT: f64 = 8.5;
const INNER_PANELS: usize = 6;
const OUTER_PANELS: usize = 12;

/// CDF of the range of `k` iid standard normals.
pub fn range_cdf(w: f64, k: usize) -> f64 {
    assert!(k >= 2, "range_cdf requires k >= 2 groups");
    if w <= 0.0 {
        return 0.0;
    }
    if !w.is_finite() {
        return 1.0;
    }
    let (nodes, weights) = gauss_legendre_64();
    let mut total = 0.0;
    let panel_width = 2.0 * Z_LIMIT / INNER_PANELS as f64;
    for panel in 0..INNER_PANELS {
        let a = -Z_LIMIT + panel as f64 * panel_width;
        let half = panel_width / 2.0;
        let mid = a + half;
        for (x, wt) in nodes.iter().zip(weights) {
            let z = mid + half * x;
            let span = normal_cdf(z + w) - normal_cdf(z);
            total += wt * half * normal_pdf(z) * span.powi(k as i32 - 1);
        }
    }
    (k as f64 * total).clamp(0.0, 1.0)
}

/// CDF of the studentized range with `k` groups and `df` degrees of freedom.
pub fn srange_cdf(q: f64, k: usize, df: f64) -> f64 {
    assert!(k >= 2, "srange_cdf requires k >= 2 groups");
    assert!(df > 0.0, "srange_cdf requires positive df");
    if q <= 0.0 {
        return 0.0;
    }
    if !q.is_finite() {
        return 1.0;
    }
    if df > 1e8 {
        // S is concentrated at 1 beyond any representable difference.
        return range_cdf(q, k);
    }
    // S has density f_S(s) = C · s^{ν−1} e^{−νs²/2} with
    // ln C = ln 2 + (ν/2) ln(ν/2) − lnΓ(ν/2); mean ≈ 1, sd ≈ 1/√(2ν).
    let ln_norm = std::f64::consts::LN_2 + (df / 2.0) * (df / 2.0).ln() - ln_gamma(df / 2.0);
    let spread = 12.0 / (2.0 * df).sqrt();
    let (lo, hi) = if df > 400.0 {
        ((1.0 - spread).max(0.0), 1.0 + spread)
    } else {
        (0.0, 1.0 + spread)
    };
    let (nodes, weights) = gauss_legendre_64();
    let mut total = 0.0;
    let panel_width = (hi - lo) / OUTER_PANELS as f64;
    for panel in 0..OUTER_PANELS {
        let a = lo + panel as f64 * panel_width;
        let half = panel_width / 2.0;
        let mid = a + half;
        for (x, wt) in nodes.iter().zip(weights) {
            let s = mid + half * x;
            if s <= 0.0 {
                continue;
            }
            let ln_density = ln_norm + (df - 1.0) * s.ln() - df * s * s / 2.0;
            total += wt * half * ln_density.exp() * range_cdf(q * s, k);
        }
    }
    total.clamp(0.0, 1.0)
}

/// Quantile of the studentized range: smallest q with F_Q(q) ≥ p,
/// located by bracketing and bisection.
pub fn srange_quantile(p: f64, k: usize, df: f64) -> f64 {
    assert!((0.0..1.0).contains(&p), "srange_quantile requires p in [0, 1)");
    if p == 0.0 {
        return 0.0;
    }
    let mut hi = 10.0;
    while srange_cdf(hi, k, df) < p {
        hi *= 2.0;
        assert!(hi < 1e7, "srange_quantile failed to bracket p = {p}");
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if srange_cdf(mid, k, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    0.5 * (lo + hi)
}
