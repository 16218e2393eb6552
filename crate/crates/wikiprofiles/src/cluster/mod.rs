//! Clustering of contributors in feature space.
//!
//! Two complementary algorithms over the same pairwise Euclidean distances:
//! Ward agglomeration (for the dendrogram and its cuts) and PAM k-medoids
//! (for the partition the rest of the pipeline consumes). Model selection
//! runs PAM across a range of k and scores each partition with the average
//! silhouette width and within-cluster sum of squares.

mod distance;
mod pam;
pub(crate) mod validate;
mod ward;

pub use distance::DistanceMatrix;
pub use pam::{pam, PamResult};
pub use validate::{select_k, silhouette, within_ss, KDiagnostic, KSelection};
pub use ward::{cut_dendrogram, ward_cluster, Dendrogram, Merge};
