//! Statistical machinery: special functions, the studentized range
//! distribution, one-way ANOVA + Tukey HSD, and PCA by Jacobi
//! eigendecomposition.

pub mod anova;
pub mod pca;
pub mod special;
pub mod srange;

pub use anova::{anova_oneway, tukey_hsd, AnovaResult, TukeyPair, TukeyResult};
pub use pca::{pca_fit, pca_project, pca_reconstruct, PcaModel};
pub use special::{beta_inc, beta_inc_series, erf, erfc, f_sf, ln_gamma, normal_cdf, normal_pdf};
pub use srange::{range_cdf, srange_cdf, srange_quantile};
