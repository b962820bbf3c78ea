//! Node overlap trees: maximum spanning forests of Jaccard-weighted overlap
//! graphs, hung under a synthetic root.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::jaccard;
use crate::model::Structure;

use super::matching::overlap_edges;
use super::Matching;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTree {
    /// Number of non-root vertices.
    pub vertices: usize,
    /// Forest edges `(i, j, weight)` with `i < j`, heaviest first.
    pub edges: Vec<(usize, usize, f64)>,
    /// One vertex per forest component, joined to the root.
    pub root_children: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl OverlapTree {
    /// Maximum spanning forest of the weighted graph on `vertices` vertices
    /// (Kruskal; equal weights in ascending `(i, j)` order). Non-positive
    /// weights are ignored. Each component hangs under the root by its vertex
    /// of highest forest degree, lowest index on ties.
    pub fn from_weighted(vertices: usize, mut edges: Vec<(usize, usize, f64)>) -> OverlapTree {
        edges.retain(|e| e.2 > 0.0 && e.0 != e.1);
        for e in &mut edges {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        let mut parent: Vec<usize> = (0..vertices).collect();
        let mut degree = vec![0usize; vertices];
        let mut kept = Vec::new();
        for (i, j, w) in edges {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
                degree[i] += 1;
                degree[j] += 1;
                kept.push((i, j, w));
            }
        }
        let mut best: Vec<Option<usize>> = vec![None; vertices];
        for v in 0..vertices {
            let r = find(&mut parent, v);
            if best[r].is_none_or(|b| degree[v] > degree[b]) {
                best[r] = Some(v);
            }
        }
        let mut root_children: Vec<usize> = best.into_iter().flatten().collect();
        root_children.sort_unstable();
        OverlapTree {
            vertices,
            edges: kept,
            root_children,
        }
    }

    /// Sum of the forest edge weights.
    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Graphviz rendering. Vertex `i` is labelled `labels[i]`; edge pen
    /// widths scale with the weights.
    pub fn to_dot(&self, labels: &[String]) -> String {
        let mut out = String::from("graph overlap {\n  root [shape=point];\n");
        for v in 0..self.vertices {
            let label = labels.get(v).map(String::as_str).unwrap_or("");
            let _ = writeln!(out, "  s{v} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for &c in &self.root_children {
            let _ = writeln!(out, "  root -- s{c} [style=dashed];");
        }
        for &(i, j, w) in &self.edges {
            let _ = writeln!(
                out,
                "  s{i} -- s{j} [weight={w:.4}, penwidth={:.3}, label=\"{w:.2}\"];",
                0.5 + 4.5 * w
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Overlap tree of one structure list.
pub fn overlap_tree(structures: &[Structure]) -> OverlapTree {
    OverlapTree::from_weighted(structures.len(), overlap_edges(structures))
}

/// Overlap tree over the matched pairs: the weight between two pairs is the
/// product of their side-wise node Jaccard similarities.
pub fn common_overlap_tree(matching: &Matching, s1: &[Structure], s2: &[Structure]) -> OverlapTree {
    let nodes1: Vec<_> = matching.pairs.iter().map(|p| s1[p.0].nodes()).collect();
    let nodes2: Vec<_> = matching.pairs.iter().map(|p| s2[p.1].nodes()).collect();
    let mut edges = Vec::new();
    for i in 0..matching.len() {
        for j in i + 1..matching.len() {
            let w = jaccard(&nodes1[i], &nodes1[j]) * jaccard(&nodes2[i], &nodes2[j]);
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    OverlapTree::from_weighted(matching.len(), edges)
}

/// Short labels such as `clique 12` for DOT output.
pub fn structure_labels(structures: &[Structure]) -> Vec<String> {
    structures
        .iter()
        .map(|s| format!("{} {}", s.kind(), s.node_count()))
        .collect()
}
