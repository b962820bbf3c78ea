//! Structures, individual models, common models and transformations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{union_sorted, Graph, NodeId};

/// The four structure kinds of the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Clique,
    Star,
    Biclique,
    Starclique,
}

impl StructureKind {
    pub const ALL: [StructureKind; 4] = [
        StructureKind::Clique,
        StructureKind::Star,
        StructureKind::Biclique,
        StructureKind::Starclique,
    ];

    /// Size of the vocabulary.
    pub const VOCABULARY: u64 = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Clique => "clique",
            StructureKind::Star => "star",
            StructureKind::Biclique => "biclique",
            StructureKind::Starclique => "starclique",
        }
    }

    /// Number of adjacency regions a structure of this kind constrains.
    pub fn region_count(self) -> usize {
        match self {
            StructureKind::Clique => 1,
            StructureKind::Star => 2,
            StructureKind::Biclique | StructureKind::Starclique => 3,
        }
    }

    /// Number of node-count slots (fractions) and edge-count slots (densities).
    pub fn slot_arity(self) -> (usize, usize) {
        match self {
            StructureKind::Clique | StructureKind::Star => (1, 1),
            StructureKind::Biclique | StructureKind::Starclique => (2, 3),
        }
    }

    /// Maximum edge count of every edge slot given the node-slot counts.
    pub fn edge_maxima(self, nodes: &[u64]) -> Vec<u64> {
        let pairs = |k: u64| k * k.saturating_sub(1) / 2;
        match self {
            StructureKind::Clique => vec![pairs(nodes[0])],
            // the node slot of a star counts its spokes
            StructureKind::Star => vec![pairs(nodes[0])],
            StructureKind::Biclique | StructureKind::Starclique => {
                vec![pairs(nodes[0]), pairs(nodes[1]), nodes[0] * nodes[1]]
            }
        }
    }
}

impl std::fmt::Display for StructureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Node sets and within/across edge counts of a two-sided structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSided {
    pub left: Vec<NodeId>,
    pub right: Vec<NodeId>,
    pub left_edges: u64,
    pub right_edges: u64,
    pub cross_edges: u64,
}

/// A concrete structure with node IDs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StructureRecord", into = "StructureRecord")]
pub enum Structure {
    Clique { nodes: Vec<NodeId>, edges: u64 },
    Star {
        hub: NodeId,
        spokes: Vec<NodeId>,
        spoke_edges: u64,
    },
    Biclique(TwoSided),
    Starclique(TwoSided),
}

/// The ID-free counts of a structure, in slot order.
///
/// Clique: nodes `[n_s]`, edges `[m_s]`. Star: nodes `[n_s - 1]`, edges
/// `[x_s]`. Biclique/starclique: nodes `[n_L, n_R]`, edges `[m_L, m_R, m_A]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub kind: StructureKind,
    pub nodes: Vec<u64>,
    pub edges: Vec<u64>,
}

impl Shape {
    pub fn new(kind: StructureKind, nodes: Vec<u64>, edges: Vec<u64>) -> Result<Shape> {
        let s = Shape { kind, nodes, edges };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (na, ea) = self.kind.slot_arity();
        if self.nodes.len() != na || self.edges.len() != ea {
            return Err(Error::Invariant(format!(
                "{} shape needs {na} node slots and {ea} edge slots",
                self.kind
            )));
        }
        if self.nodes.contains(&0) {
            return Err(Error::Invariant(format!("{} with an empty node slot", self.kind)));
        }
        for (e, max) in self.edges.iter().zip(self.kind.edge_maxima(&self.nodes)) {
            if *e > max {
                return Err(Error::Invariant(format!(
                    "{} edge count {e} exceeds slot maximum {max}",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    /// Total number of nodes `n_s`.
    pub fn node_total(&self) -> u64 {
        match self.kind {
            StructureKind::Star => self.nodes[0] + 1,
            _ => self.nodes.iter().sum(),
        }
    }

    /// Total number of edges `m_s` within the structure.
    pub fn edge_total(&self) -> u64 {
        match self.kind {
            StructureKind::Star => self.nodes[0] + self.edges[0],
            _ => self.edges.iter().sum(),
        }
    }
}

fn sorted(mut v: Vec<NodeId>) -> Vec<NodeId> {
    v.sort_unstable();
    v.dedup();
    v
}

impl Structure {
    /// Clique over `nodes`, counting its edges in `g`.
    pub fn clique_in(g: &Graph, nodes: Vec<NodeId>) -> Structure {
        let nodes = sorted(nodes);
        let mask = membership(g.node_count(), &nodes);
        let edges = g.edges_within(&nodes, &mask);
        Structure::Clique { nodes, edges }
    }

    /// Star with the given hub; spokes not adjacent to the hub are dropped.
    pub fn star_in(g: &Graph, hub: NodeId, spokes: Vec<NodeId>) -> Structure {
        let spokes: Vec<NodeId> = sorted(spokes)
            .into_iter()
            .filter(|&s| s != hub && g.has_edge(hub, s))
            .collect();
        let mask = membership(g.node_count(), &spokes);
        let spoke_edges = g.edges_within(&spokes, &mask);
        Structure::Star {
            hub,
            spokes,
            spoke_edges,
        }
    }

    /// Biclique or starclique over disjoint `left` and `right`.
    pub fn two_sided_in(
        g: &Graph,
        kind: StructureKind,
        left: Vec<NodeId>,
        right: Vec<NodeId>,
    ) -> Structure {
        let left = sorted(left);
        let lmask = membership(g.node_count(), &left);
        let right: Vec<NodeId> = sorted(right)
            .into_iter()
            .filter(|&r| !lmask[r as usize])
            .collect();
        let rmask = membership(g.node_count(), &right);
        let body = TwoSided {
            left_edges: g.edges_within(&left, &lmask),
            right_edges: g.edges_within(&right, &rmask),
            cross_edges: g.edges_between(&left, &rmask),
            left,
            right,
        };
        match kind {
            StructureKind::Starclique => Structure::Starclique(body),
            _ => Structure::Biclique(body),
        }
    }

    pub fn kind(&self) -> StructureKind {
        match self {
            Structure::Clique { .. } => StructureKind::Clique,
            Structure::Star { .. } => StructureKind::Star,
            Structure::Biclique(_) => StructureKind::Biclique,
            Structure::Starclique(_) => StructureKind::Starclique,
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            Structure::Clique { nodes, edges } => Shape {
                kind: StructureKind::Clique,
                nodes: vec![nodes.len() as u64],
                edges: vec![*edges],
            },
            Structure::Star {
                spokes,
                spoke_edges,
                ..
            } => Shape {
                kind: StructureKind::Star,
                nodes: vec![spokes.len() as u64],
                edges: vec![*spoke_edges],
            },
            Structure::Biclique(b) | Structure::Starclique(b) => Shape {
                kind: self.kind(),
                nodes: vec![b.left.len() as u64, b.right.len() as u64],
                edges: vec![b.left_edges, b.right_edges, b.cross_edges],
            },
        }
    }

    /// `n_s`.
    pub fn node_count(&self) -> usize {
        match self {
            Structure::Clique { nodes, .. } => nodes.len(),
            Structure::Star { spokes, .. } => spokes.len() + 1,
            Structure::Biclique(b) | Structure::Starclique(b) => b.left.len() + b.right.len(),
        }
    }

    /// `m_s`, all edges among the structure's nodes.
    pub fn edge_count(&self) -> u64 {
        self.shape().edge_total()
    }

    /// Sort key used to rank candidates, largest first.
    pub fn size_key(&self) -> (usize, u64) {
        (self.node_count(), self.edge_count())
    }

    /// All nodes of the structure, sorted.
    pub fn nodes(&self) -> Vec<NodeId> {
        match self {
            Structure::Clique { nodes, .. } => nodes.clone(),
            Structure::Star { hub, spokes, .. } => union_sorted(&[*hub], spokes),
            Structure::Biclique(b) | Structure::Starclique(b) => union_sorted(&b.left, &b.right),
        }
    }

    /// The two node slots used by aligned Jaccard: hub/spokes or left/right.
    /// Cliques have a single slot.
    pub fn node_slots(&self) -> Vec<Vec<NodeId>> {
        match self {
            Structure::Clique { nodes, .. } => vec![nodes.clone()],
            Structure::Star { hub, spokes, .. } => vec![vec![*hub], spokes.clone()],
            Structure::Biclique(b) | Structure::Starclique(b) => {
                vec![b.left.clone(), b.right.clone()]
            }
        }
    }

    pub fn max_node(&self) -> Option<NodeId> {
        self.nodes().last().copied()
    }

    /// Checks the kind invariants (non-empty sets, disjoint sides, edge
    /// counts within their maxima, sorted node lists).
    pub fn validate(&self) -> Result<()> {
        let is_sorted = |v: &[NodeId]| v.windows(2).all(|w| w[0] < w[1]);
        match self {
            Structure::Clique { nodes, .. } => {
                if nodes.is_empty() || !is_sorted(nodes) {
                    return Err(Error::Invariant("clique node set must be non-empty and sorted".into()));
                }
            }
            Structure::Star { hub, spokes, .. } => {
                if spokes.is_empty() || !is_sorted(spokes) || spokes.binary_search(hub).is_ok() {
                    return Err(Error::Invariant(
                        "star needs sorted non-empty spokes excluding the hub".into(),
                    ));
                }
            }
            Structure::Biclique(b) | Structure::Starclique(b) => {
                if b.left.is_empty() || b.right.is_empty() || !is_sorted(&b.left) || !is_sorted(&b.right) {
                    return Err(Error::Invariant(format!(
                        "{} needs sorted non-empty sides",
                        self.kind()
                    )));
                }
                if crate::graph::intersection_size(&b.left, &b.right) > 0 {
                    return Err(Error::Invariant(format!("{} sides overlap", self.kind())));
                }
            }
        }
        self.shape().validate()
    }
}

pub(crate) fn membership(n: usize, nodes: &[NodeId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in nodes {
        mask[v as usize] = true;
    }
    mask
}

/// Wire form of a structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct StructureRecord {
    kind: StructureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hub: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spokes: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<Vec<NodeId>>,
    edge_counts: Vec<u64>,
}

impl From<Structure> for StructureRecord {
    fn from(s: Structure) -> Self {
        let kind = s.kind();
        let mut r = StructureRecord {
            kind,
            nodes: None,
            hub: None,
            spokes: None,
            left: None,
            right: None,
            edge_counts: s.shape().edges,
        };
        match s {
            Structure::Clique { nodes, .. } => r.nodes = Some(nodes),
            Structure::Star { hub, spokes, .. } => {
                r.hub = Some(hub);
                r.spokes = Some(spokes);
            }
            Structure::Biclique(b) | Structure::Starclique(b) => {
                r.left = Some(b.left);
                r.right = Some(b.right);
            }
        }
        r
    }
}

impl TryFrom<StructureRecord> for Structure {
    type Error = Error;

    fn try_from(r: StructureRecord) -> Result<Structure> {
        let missing = |what: &str| Error::Invariant(format!("{} record lacks {what}", r.kind));
        let count = |i: usize| -> Result<u64> {
            r.edge_counts
                .get(i)
                .copied()
                .ok_or_else(|| Error::Invariant(format!("{} record lacks edge count {i}", r.kind)))
        };
        let s = match r.kind {
            StructureKind::Clique => Structure::Clique {
                nodes: r.nodes.clone().ok_or_else(|| missing("nodes"))?,
                edges: count(0)?,
            },
            StructureKind::Star => Structure::Star {
                hub: r.hub.ok_or_else(|| missing("hub"))?,
                spokes: r.spokes.clone().ok_or_else(|| missing("spokes"))?,
                spoke_edges: count(0)?,
            },
            StructureKind::Biclique | StructureKind::Starclique => {
                let body = TwoSided {
                    left: r.left.clone().ok_or_else(|| missing("left"))?,
                    right: r.right.clone().ok_or_else(|| missing("right"))?,
                    left_edges: count(0)?,
                    right_edges: count(1)?,
                    cross_edges: count(2)?,
                };
                if r.kind == StructureKind::Biclique {
                    Structure::Biclique(body)
                } else {
                    Structure::Starclique(body)
                }
            }
        };
        s.validate()?;
        Ok(s)
    }
}

/// An individual model: graph totals plus an ordered structure list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub n: u64,
    pub m: u64,
    pub structures: Vec<Structure>,
}

impl Model {
    pub fn empty(n: u64, m: u64) -> Model {
        Model {
            n,
            m,
            structures: Vec::new(),
        }
    }

    pub fn for_graph(g: &Graph) -> Model {
        Model::empty(g.node_count() as u64, g.edge_count() as u64)
    }

    pub fn shapes(&self) -> Vec<Shape> {
        self.structures.iter().map(Structure::shape).collect()
    }

    /// Structure counts per kind, in vocabulary order.
    pub fn census(&self) -> [usize; 4] {
        census(self.structures.iter().map(Structure::kind))
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.structures {
            s.validate()?;
            if let Some(v) = s.max_node() {
                if v as u64 >= self.n {
                    return Err(Error::Invariant(format!(
                        "structure references node {v} but the graph has {} nodes",
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn census<I: IntoIterator<Item = StructureKind>>(kinds: I) -> [usize; 4] {
    let mut c = [0; 4];
    for k in kinds {
        c[k.index()] += 1;
    }
    c
}

/// A shared structure: per-slot node fractions (relative to the reference
/// node count) and per-slot edge densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonStructure {
    pub kind: StructureKind,
    pub fractions: Vec<f64>,
    pub densities: Vec<f64>,
}

impl CommonStructure {
    /// Node-slot counts expected in a graph with `n` nodes.
    pub fn expected_nodes(&self, n: u64) -> Vec<u64> {
        self.fractions
            .iter()
            .map(|f| ((f * n as f64).round() as u64).max(1))
            .collect()
    }

    /// Edge-slot counts expected for the given node-slot counts.
    pub fn expected_edges(&self, nodes: &[u64]) -> Vec<u64> {
        self.kind
            .edge_maxima(nodes)
            .into_iter()
            .zip(&self.densities)
            .map(|(max, d)| ((d * max as f64).round().max(0.0) as u64).min(max))
            .collect()
    }

    /// The structure's shape reconstituted at reference size `n`.
    pub fn shape_at(&self, n: u64) -> Shape {
        let nodes = self.expected_nodes(n);
        let edges = self.expected_edges(&nodes);
        Shape {
            kind: self.kind,
            nodes,
            edges,
        }
    }
}

/// Graph totals of the two compared graphs, ordered so that `n1 >= n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub n1: u64,
    pub n2: u64,
    pub m1: u64,
    pub m2: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonModel {
    pub header: Header,
    pub shared: Vec<CommonStructure>,
}

/// Signed per-slot deviations of side 1 from the common expectation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDeltas {
    pub nodes: Vec<i64>,
    pub edges: Vec<i64>,
}

impl SlotDeltas {
    pub fn all(&self) -> impl Iterator<Item = i64> + '_ {
        self.nodes.iter().chain(&self.edges).copied()
    }

    pub fn is_zero(&self) -> bool {
        self.all().all(|d| d == 0)
    }
}

/// Transformations from the common model to both individual models:
/// side-1 deltas for each shared structure and the unmatched structures of
/// each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformPair {
    pub deltas: Vec<SlotDeltas>,
    pub unmatched_1: Vec<Structure>,
    pub unmatched_2: Vec<Structure>,
}

impl TransformPair {
    /// Number of non-zero deltas, each of which needs a grow/shrink flag.
    pub fn direction_count(&self) -> u64 {
        self.deltas
            .iter()
            .flat_map(|d| d.all())
            .filter(|&d| d != 0)
            .count() as u64
    }
}
