//! Ward agglomerative clustering via the Lance–Williams recurrence.
//!
//! Dissimilarities are squared Euclidean distances, so merge heights are in
//! squared units. When clusters i and j (sizes nᵢ, nⱼ) merge, the distance
//! from the union to any other cluster k follows
//!
//! ```text
//! d(i∪j, k) = ((nᵢ+nₖ)·d(i,k) + (nⱼ+nₖ)·d(j,k) − nₖ·d(i,j)) / (nᵢ+nⱼ+nₖ)
//! ```
//!
//! with i the child carrying the smaller node id. Ward's criterion is
//! reducible, so merge heights are non-decreasing and cutting after the
//! first n−k merges yields exactly k clusters.

use crate::cluster::DistanceMatrix;
use crate::{Error, Result};

/// One agglomeration step. Leaves are nodes 0..n−1; the merge recorded at
/// step s creates node n+s. `left < right` always holds.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Ward dissimilarity between the children (squared-distance units).
    pub height: f64,
    /// Leaf count of the newly created node.
    pub size: usize,
}

/// The full merge tree of one Ward run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

/// Candidate merge, ordered by (dissimilarity, left id, right id) so that
/// ties resolve to the lexicographically smallest pair of node ids.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PairKey {
    d: f64,
    left: usize,
    right: usize,
}

impl PairKey {
    fn cmp(&self, other: &PairKey) -> std::cmp::Ordering {
        self.d
            .total_cmp(&other.d)
            .then(self.left.cmp(&other.left))
            .then(self.right.cmp(&other.right))
    }
}

struct WardState {
    /// Squared dissimilarities between active slots (full square).
    d: Vec<Vec<f64>>,
    active: Vec<bool>,
    /// Node id currently held by each slot.
    id: Vec<usize>,
    size: Vec<usize>,
    /// Per slot: best merge partner, kept current lazily (Anderberg).
    nearest: Vec<Option<(PairKey, usize)>>,
}

impl WardState {
    fn key(&self, i: usize, j: usize) -> PairKey {
        let (left, right) = if self.id[i] < self.id[j] {
            (self.id[i], self.id[j])
        } else {
            (self.id[j], self.id[i])
        };
        PairKey {
            d: self.d[i][j],
            left,
            right,
        }
    }

    fn row_min(&self, i: usize) -> Option<(PairKey, usize)> {
        let mut best: Option<(PairKey, usize)> = None;
        for j in 0..self.d.len() {
            if j == i || !self.active[j] {
                continue;
            }
            let key = self.key(i, j);
            if best.is_none_or(|(b, _)| key.cmp(&b).is_lt()) {
                best = Some((key, j));
            }
        }
        best
    }
}

/// Run Ward clustering over a (plain Euclidean) distance matrix.
pub fn ward_cluster(dist: &DistanceMatrix) -> Dendrogram {
    let n = dist.n();
    let mut state = WardState {
        d: vec![vec![0.0; n]; n],
        active: vec![true; n],
        id: (0..n).collect(),
        size: vec![1; n],
        nearest: vec![None; n],
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let e = dist.get(i, j);
            let sq = e * e;
            state.d[i][j] = sq;
            state.d[j][i] = sq;
        }
    }
    for i in 0..n {
        state.nearest[i] = state.row_min(i);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        // Global best merge = best of the per-slot caches (each unordered
        // pair is cached from both sides with an identical key).
        let mut best: Option<(PairKey, usize, usize)> = None;
        for i in 0..n {
            if !state.active[i] {
                continue;
            }
            if let Some((key, j)) = state.nearest[i] {
                if best.is_none_or(|(b, _, _)| key.cmp(&b).is_lt()) {
                    best = Some((key, i, j));
                }
            }
        }
        let (key, a, b) = best.expect("at least two active slots remain");
        // The slot holding the smaller node id is child i of the recurrence.
        let (li, rj) = if state.id[a] < state.id[b] { (a, b) } else { (b, a) };
        let (ni, nj) = (state.size[li] as f64, state.size[rj] as f64);
        let dij = state.d[li][rj];

        merges.push(Merge {
            left: key.left,
            right: key.right,
            height: key.d,
            size: state.size[li] + state.size[rj],
        });

        // Fold slot rj into slot li, which becomes node n+step.
        for k in 0..n {
            if !state.active[k] || k == li || k == rj {
                continue;
            }
            let nk = state.size[k] as f64;
            let dik = state.d[li][k];
            let djk = state.d[rj][k];
            let merged = ((ni + nk) * dik + (nj + nk) * djk - nk * dij) / (ni + nj + nk);
            state.d[li][k] = merged;
            state.d[k][li] = merged;
        }
        state.active[rj] = false;
        state.nearest[rj] = None;
        state.id[li] = n + step;
        state.size[li] += state.size[rj];

        // Repair caches: entries pointing at either merged slot are stale;
        // everything else can only be improved by the new cluster.
        for k in 0..n {
            if !state.active[k] || k == li {
                continue;
            }
            match state.nearest[k] {
                Some((_, p)) if p == li || p == rj => state.nearest[k] = state.row_min(k),
                Some((cached, _)) => {
                    let candidate = state.key(k, li);
                    if candidate.cmp(&cached).is_lt() {
                        state.nearest[k] = Some((candidate, li));
                    }
                }
                None => unreachable!("active slots always have a cached nearest"),
            }
        }
        state.nearest[li] = state.row_min(li);
    }
    Dendrogram {
        n_leaves: n,
        merges,
    }
}

/// Cut a dendrogram into k clusters by undoing the last k−1 merges.
///
/// Returns a 1-based assignment; clusters are numbered in order of their
/// smallest member index.
pub fn cut_dendrogram(dendrogram: &Dendrogram, k: usize) -> Result<Vec<u32>> {
    let n = dendrogram.n_leaves;
    if k == 0 || k > n {
        return Err(Error::Invalid(format!(
            "cannot cut a dendrogram over {n} leaves into {k} clusters"
        )));
    }
    let take = n - k;
    let mut parent: Vec<usize> = (0..n + take).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, merge) in dendrogram.merges[..take].iter().enumerate() {
        let target = n + step;
        let l = find(&mut parent, merge.left);
        let r = find(&mut parent, merge.right);
        parent[l] = target;
        parent[r] = target;
    }
    let mut label_of_root: std::collections::BTreeMap<usize, u32> = Default::default();
    let mut assignment = Vec::with_capacity(n);
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let next = label_of_root.len() as u32 + 1;
        let label = *label_of_root.entry(root).or_insert(next);
        assignment.push(label);
    }
    debug_assert_eq!(label_of_root.len(), k);
    Ok(assignment)
}
