//! Dendrogram export: merge-table CSV and Newick text.
//!
//! Node ids follow the usual agglomerative convention: leaves are
//! `0..n_leaves`, and merge step `s` (0-based) creates node `n_leaves + s`.
//! Newick branch lengths are the height drop from parent to child (leaves
//! sit at height 0), so the tree is ultrametric in Ward height units.

use crate::cluster::Dendrogram;

/// Merge table as CSV with header `step,left,right,height,size`. Heights
/// use 17-significant-digit scientific notation, like the feature table.
pub fn dendrogram_csv(dendrogram: &Dendrogram) -> String {
    let mut out = String::from("step,left,right,height,size\n");
    for (step, merge) in dendrogram.merges.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{:.16e},{}\n",
            step, merge.left, merge.right, merge.height, merge.size
        ));
    }
    out
}

/// Quote a Newick label when it contains structural characters; embedded
/// single quotes are doubled, per the format's convention.
fn newick_label(label: &str) -> String {
    if !label.is_empty()
        && label
            .chars()
            .all(|c| !c.is_whitespace() && !"()[]':;,".contains(c))
    {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Newick serialization with branch lengths. `labels` names the leaves;
/// missing names fall back to the leaf index.
pub fn dendrogram_newick(dendrogram: &Dendrogram, labels: &[String]) -> String {
    let n = dendrogram.n_leaves;
    fn node_height(dendrogram: &Dendrogram, id: usize) -> f64 {
        if id < dendrogram.n_leaves {
            0.0
        } else {
            dendrogram.merges[id - dendrogram.n_leaves].height
        }
    }
    fn write_node(
        dendrogram: &Dendrogram,
        labels: &[String],
        id: usize,
        parent_height: f64,
        out: &mut String,
    ) {
        let n = dendrogram.n_leaves;
        if id < n {
            let fallback = id.to_string();
            let label = labels.get(id).map_or(fallback.as_str(), String::as_str);
            out.push_str(&newick_label(label));
        } else {
            let merge = &dendrogram.merges[id - n];
            out.push('(');
            write_node(dendrogram, labels, merge.left, merge.height, out);
            out.push(',');
            write_node(dendrogram, labels, merge.right, merge.height, out);
            out.push(')');
        }
        let length = parent_height - node_height(dendrogram, id);
        out.push_str(&format!(":{length}"));
    }

    let mut out = String::new();
    if n == 1 {
        let fallback = String::from("0");
        let label = labels.first().unwrap_or(&fallback);
        out.push_str(&newick_label(label));
    } else if n > 1 {
        let root = n + dendrogram.merges.len() - 1;
        let root_height = node_height(dendrogram, root);
        let merge = &dendrogram.merges[root - n];
        out.push('(');
        write_node(dendrogram, labels, merge.left, root_height, &mut out);
        out.push(',');
        write_node(dendrogram, labels, merge.right, root_height, &mut out);
        out.push(')');
    }
    out.push_str(";\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{ward_cluster, DistanceMatrix};

    fn three_point_dendrogram() -> Dendrogram {
        // Points {0, 1, 10}: merge (0,1) at 1, then (2, 3) at 361/3.
        let x = [0.0_f64, 1.0, 10.0];
        let dist = DistanceMatrix::from_fn(3, |i, j| (x[i] - x[j]).abs());
        ward_cluster(&dist)
    }

    #[test]
    fn csv_has_header_and_one_row_per_merge() {
        let csv = dendrogram_csv(&three_point_dendrogram());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,left,right,height,size");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0,0,1,1.0000000000000000e0,2");
        assert!(lines[2].starts_with("1,2,3,1.2033333333333333e2,3"));
    }

    #[test]
    fn newick_encodes_ultrametric_branch_lengths() {
        let labels = vec!["a".to_string(), "b".to_string(), "far away".to_string()];
        let newick = dendrogram_newick(&three_point_dendrogram(), &labels);
        // Root height 361/3; leaves a,b sit under the height-1 internal node.
        let h = 361.0 / 3.0;
        assert!(newick.starts_with("('far away':"));
        assert!(newick.contains("(a:1,b:1):"));
        assert!(newick.ends_with(";\n"));
        let root_len: f64 = newick["('far away':".len()..]
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(root_len, h);
    }

    #[test]
    fn quoting_covers_awkward_labels() {
        assert_eq!(newick_label("plain"), "plain");
        assert_eq!(newick_label("has space"), "'has space'");
        assert_eq!(newick_label("semi;colon"), "'semi;colon'");
        assert_eq!(newick_label("it's"), "'it''s'");
        assert_eq!(newick_label(""), "''");
    }

    #[test]
    fn single_leaf_degenerates_gracefully() {
        let dist = DistanceMatrix::from_fn(1, |_, _| 0.0);
        let dendrogram = ward_cluster(&dist);
        assert_eq!(dendrogram_csv(&dendrogram), "step,left,right,height,size\n");
        assert_eq!(
            dendrogram_newick(&dendrogram, &["only".to_string()]),
            "only;\n"
        );
    }
}
