//! Simple undirected graphs, edge-list I/O and node alignments.
//!
//! Nodes are dense `u32` indices in order of first appearance; external
//! labels are only consulted at the I/O boundary.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Immutable simple graph in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

/// Counters collected while parsing an edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
    pub reciprocal: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes labelled `"0".."n-1"`. Loops and repeated
    /// pairs are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Graph::with_labels(labels, edges)
    }

    /// Builds a graph with the given labels (index `i` gets `labels[i]`).
    pub fn with_labels<I>(labels: Vec<String>, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Invariant(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                continue;
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as NodeId).is_some() {
                return Err(Error::Invariant(format!("duplicate label {l:?}")));
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Ok(Graph {
            offsets,
            targets,
            labels,
            index,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Number of node pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> u64 {
        let n = self.node_count() as u64;
        n * n.saturating_sub(1) / 2
    }

    /// Sorted neighbor list. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn try_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.neighbors(v))
    }

    pub fn try_degree(&self, v: NodeId) -> Result<usize> {
        self.check(v)?;
        Ok(self.degree(v))
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "node {v} out of range for {} nodes",
                self.node_count()
            )))
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Number of edges with both endpoints in `members` (a membership mask).
    pub fn edges_within(&self, nodes: &[NodeId], members: &[bool]) -> u64 {
        let twice: usize = nodes
            .iter()
            .map(|&u| {
                self.neighbors(u)
                    .iter()
                    .filter(|&&w| members[w as usize])
                    .count()
            })
            .sum();
        (twice / 2) as u64
    }

    /// Number of edges between `a` and the nodes flagged in `b_members`.
    pub fn edges_between(&self, a: &[NodeId], b_members: &[bool]) -> u64 {
        a.iter()
            .map(|&u| {
                self.neighbors(u)
                    .iter()
                    .filter(|&&w| b_members[w as usize])
                    .count() as u64
            })
            .sum()
    }

    /// Writes the graph as a `label label` edge list. Isolated nodes are
    /// written as self-loop lines, which the loader keeps as nodes.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", self.label(u), self.label(v))?;
        }
        for v in 0..self.node_count() as NodeId {
            if self.degree(v) == 0 {
                writeln!(w, "{0} {0}", self.label(v))?;
            }
        }
        Ok(())
    }

    pub fn save_edge_list<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_edge_list(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Bytes of the canonical edge-list rendering, used for content hashing.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_edge_list(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }
}

/// Loads a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments. The resulting graph is always undirected; with
/// `directed_collapse` the reciprocal pairs of a directed input are counted
/// in the report as they are merged.
pub fn load_edge_list<P: AsRef<Path>>(path: P, directed_collapse: bool) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let (g, report) = parse_edge_list(BufReader::new(file), path, directed_collapse)?;
    log::debug!(
        "loaded {}: n={} m={} ({} loops, {} duplicates, {} reciprocal)",
        path.display(),
        g.node_count(),
        g.edge_count(),
        report.self_loops,
        report.duplicates,
        report.reciprocal
    );
    Ok(g)
}

pub fn parse_edge_list<R: BufRead>(
    reader: R,
    path: &Path,
    directed_collapse: bool,
) -> Result<(Graph, LoadReport)> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut seen: std::collections::HashSet<(NodeId, NodeId)> = Default::default();
    let mut directed: std::collections::HashSet<(NodeId, NodeId)> = Default::default();
    let mut edges = Vec::new();
    let mut report = LoadReport::default();

    let mut intern = |s: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&i) = index.get(s) {
            return i;
        }
        let i = labels.len() as NodeId;
        labels.push(s.to_string());
        index.insert(s.to_string(), i);
        i
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        report.lines += 1;
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg: format!("expected two tokens, got {trimmed:?}"),
                })
            }
        };
        let u = intern(a, &mut labels);
        let v = intern(b, &mut labels);
        if u == v {
            report.self_loops += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        let fresh_direction = directed_collapse && directed.insert((u, v));
        if !seen.insert(key) {
            if fresh_direction {
                report.reciprocal += 1;
            } else {
                report.duplicates += 1;
            }
            continue;
        }
        edges.push(key);
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    // all-integer labels are indexed in numeric order so that a file written
    // with labels 0..n-1 loads with index == label, whatever its line order
    let numeric: Option<Vec<u64>> = labels.iter().map(|l| l.parse().ok()).collect();
    if let Some(values) = numeric {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| values[i]);
        let mut rank = vec![0 as NodeId; labels.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as NodeId;
        }
        let mut old = std::mem::take(&mut labels);
        labels = order.iter().map(|&i| std::mem::take(&mut old[i])).collect();
        for e in &mut edges {
            let (u, v) = (rank[e.0 as usize], rank[e.1 as usize]);
            *e = (u.min(v), u.max(v));
        }
    }
    let g = Graph::with_labels(labels, edges)?;
    Ok((g, report))
}

/// Partial injective map from nodes of one graph to nodes of another.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeAlignment {
    forward: HashMap<NodeId, NodeId>,
    backward: HashMap<NodeId, NodeId>,
}

impl NodeAlignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut a = NodeAlignment::new();
        for (u, v) in pairs {
            a.insert(u, v)?;
        }
        Ok(a)
    }

    pub fn insert(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        if self.forward.contains_key(&u) {
            return Err(Error::Alignment(format!("source node {u} mapped twice")));
        }
        if self.backward.contains_key(&v) {
            return Err(Error::Alignment(format!("target node {v} mapped twice")));
        }
        self.forward.insert(u, v);
        self.backward.insert(v, u);
        Ok(())
    }

    pub fn get(&self, u: NodeId) -> Option<NodeId> {
        self.forward.get(&u).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// The same alignment read in the other direction.
    pub fn inverse(&self) -> NodeAlignment {
        NodeAlignment {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// Pairs sorted by source index.
    pub fn pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut p: Vec<_> = self.forward.iter().map(|(&a, &b)| (a, b)).collect();
        p.sort_unstable();
        p
    }
}

/// Reads a `label1 label2` alignment file resolved against `g1` and `g2`.
pub fn load_alignment<P: AsRef<Path>>(path: P, g1: &Graph, g2: &Graph) -> Result<NodeAlignment> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    parse_alignment(reader, path, g1, g2)
}

pub fn parse_alignment<R: BufRead>(
    reader: R,
    path: &Path,
    g1: &Graph,
    g2: &Graph,
) -> Result<NodeAlignment> {
    let mut alignment = NodeAlignment::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse_err(format!("expected two labels, got {trimmed:?}"))),
        };
        let u = g1
            .index_of(a)
            .ok_or_else(|| Error::Alignment(format!("line {}: unknown label {a:?} in first graph", lineno + 1)))?;
        let v = g2
            .index_of(b)
            .ok_or_else(|| Error::Alignment(format!("line {}: unknown label {b:?} in second graph", lineno + 1)))?;
        alignment
            .insert(u, v)
            .map_err(|e| Error::Alignment(format!("line {}: {e}", lineno + 1)))?;
    }
    Ok(alignment)
}

/// Jaccard similarity of two sorted, deduplicated node lists.
/// `jaccard(∅, ∅)` is 0.
pub fn jaccard(a: &[NodeId], b: &[NodeId]) -> f64 {
    let inter = intersection_size(a, b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Size of the intersection of two sorted lists.
pub fn intersection_size(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Sorted union of two sorted lists.
pub fn union_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
