//! Behavioral profiling of MediaWiki contributors from revision-history dumps.
//!
//! The crate implements a five-stage pipeline:
//!
//! 1. **Ingest** ([`dump`]): stream-parse a `pages-meta-history` XML export
//!    (plain, gzip, or bzip2) into per-revision events and aggregate them
//!    into per-contributor monthly edit histories. Revision text is skipped,
//!    never buffered, so memory stays flat regardless of dump size.
//! 2. **Features** ([`features`]): filter contributors (registered, non-bot,
//!    more than a minimum number of edits, at least two active months) and
//!    compute six edit-timing features per contributor — edit ratio, mean and
//!    maximum gap between active months, number of consecutive month pairs,
//!    mean edits per active month, and the standard deviation of monthly
//!    counts — plus a twelve-feature extended set with its correlation matrix.
//! 3. **Cluster** ([`cluster`]): Ward hierarchical clustering over the
//!    standardized features to survey the merge structure, then PAM
//!    (k-medoids) for the final partition, with silhouette widths and
//!    within-cluster sum of squares for validation and model selection.
//! 4. **Interpret** ([`stats`], [`interpret`]): PCA loadings and projections,
//!    one-way ANOVA and Tukey HSD per feature, and a deterministic mapping of
//!    a four-cluster partition onto behavioral archetypes
//!    (on-a-mission, casual, regular, top).
//! 5. **Report** ([`report`]): machine-readable JSON plus a Markdown summary
//!    and optional SVG plots.
//!
//! [`synth`] generates labeled synthetic cohorts for the four archetypes and
//! provides brute-force oracles (exhaustive k-medoids, adjusted Rand index)
//! used by the acceptance tests. All pipeline stages are deterministic:
//! identical inputs produce byte-identical outputs at any thread count.

pub mod cli;
pub mod cluster;
pub mod config;
pub mod dump;
mod error;
pub mod features;
pub mod interpret;
pub mod io;
pub mod report;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
