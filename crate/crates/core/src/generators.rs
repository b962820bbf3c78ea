//! Seeded synthetic graphs: Erdős–Rényi, Barabási–Albert, graphs with
//! planted structures, and a grid of planted-composition graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::model::StructureKind;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} is outside [0, 1]")));
    }
    Ok(())
}

/// Calls `emit(u, v)` (with `u > v`) for each pair of `0..n` kept
/// independently with probability `p`, skipping geometrically between kept
/// pairs.
fn bernoulli_pairs<R: Rng, F: FnMut(NodeId, NodeId)>(n: usize, p: f64, rng: &mut R, mut emit: F) {
    if n < 2 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for u in 1..n as NodeId {
            for v in 0..u {
                emit(u, v);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let (mut u, mut v): (i64, i64) = (1, -1);
    let n = n as i64;
    while u < n {
        let r: f64 = rng.gen();
        v += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while v >= u && u < n {
            v -= u;
            u += 1;
        }
        if u < n {
            emit(u as NodeId, v as NodeId);
        }
    }
}

/// `G(n, p)`.
pub fn er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut r = rng(seed);
    let mut edges = Vec::new();
    bernoulli_pairs(n, p, &mut r, |u, v| edges.push((v, u)));
    Graph::from_edges(n, edges)
}

/// Preferential attachment with `k` edges per arriving node. The seed core
/// is a path on nodes `0..k`; node `k` connects to every core node, and each
/// later node picks `k` distinct targets with probability proportional to
/// degree. The graph has `k(n-k) + k - 1` edges.
pub fn ba(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if k < 1 || n <= k + 1 {
        return Err(Error::InvalidParameter(format!(
            "preferential attachment needs 1 <= k and n > k + 1 (got n={n}, k={k})"
        )));
    }
    let mut r = rng(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(k * n);
    // every edge endpoint once: sampling from it is sampling by degree
    let mut ends: Vec<NodeId> = Vec::with_capacity(2 * k * n);
    for v in 1..k as NodeId {
        edges.push((v - 1, v));
        ends.extend([v - 1, v]);
    }
    for v in 0..k as NodeId {
        edges.push((v, k as NodeId));
        ends.extend([v, k as NodeId]);
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(k);
    for t in k + 1..n {
        chosen.clear();
        while chosen.len() < k {
            let w = ends[r.gen_range(0..ends.len())];
            if !chosen.contains(&w) {
                chosen.push(w);
            }
        }
        for &w in &chosen {
            edges.push((w, t as NodeId));
            ends.extend([w, t as NodeId]);
        }
    }
    Graph::from_edges(n, edges)
}

/// Sizes of one structure to plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlantSpec {
    Clique { size: usize },
    Star { spokes: usize },
    Biclique { left: usize, right: usize },
    Starclique { left: usize, right: usize },
}

impl PlantSpec {
    pub fn kind(&self) -> StructureKind {
        match self {
            PlantSpec::Clique { .. } => StructureKind::Clique,
            PlantSpec::Star { .. } => StructureKind::Star,
            PlantSpec::Biclique { .. } => StructureKind::Biclique,
            PlantSpec::Starclique { .. } => StructureKind::Starclique,
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            PlantSpec::Clique { size } => size,
            PlantSpec::Star { spokes } => spokes + 1,
            PlantSpec::Biclique { left, right } | PlantSpec::Starclique { left, right } => left + right,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PlantSpec::Clique { size } => size >= 2,
            PlantSpec::Star { spokes } => spokes >= 1,
            PlantSpec::Biclique { left, right } | PlantSpec::Starclique { left, right } => left >= 1 && right >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("degenerate plant spec {self:?}")))
        }
    }
}

/// Node sets of a planted structure. `first` is the clique, the hub, or the
/// left side; `second` is empty, the spokes, or the right side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Planted {
    pub kind: StructureKind,
    pub first: Vec<NodeId>,
    pub second: Vec<NodeId>,
}

impl Planted {
    pub fn nodes(&self) -> Vec<NodeId> {
        crate::graph::union_sorted(&self.first, &self.second)
    }
}

/// Background `G(n, noise_p)` plus the planted structures. Noise is only
/// drawn on pairs not inside any planted structure, so every planted edge
/// and non-edge is exact. Planted node sets are disjoint unless `overlap`.
pub fn plant(n: usize, noise_p: f64, specs: &[PlantSpec], seed: u64, overlap: bool) -> Result<(Graph, Vec<Planted>)> {
    check_probability(noise_p)?;
    for s in specs {
        s.validate()?;
        if s.node_count() > n {
            return Err(Error::InvalidParameter(format!("{s:?} needs more than {n} nodes")));
        }
    }
    let total: usize = specs.iter().map(|s| s.node_count()).sum();
    if !overlap && total > n {
        return Err(Error::InvalidParameter(format!(
            "disjoint structures need {total} nodes but the graph has {n}"
        )));
    }
    let mut r = rng(seed);
    let mut pool: Vec<NodeId> = (0..n as NodeId).collect();
    pool.shuffle(&mut r);
    let mut next = 0;
    let mut planted = Vec::with_capacity(specs.len());
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (idx, spec) in specs.iter().enumerate() {
        let nodes: Vec<NodeId> = if overlap {
            rand::seq::index::sample(&mut r, n, spec.node_count())
                .into_iter()
                .map(|i| i as NodeId)
                .collect()
        } else {
            let chunk = pool[next..next + spec.node_count()].to_vec();
            next += spec.node_count();
            chunk
        };
        for &v in &nodes {
            member_of[v as usize].push(idx as u32);
        }
        let split = match *spec {
            PlantSpec::Clique { size } => size,
            PlantSpec::Star { .. } => 1,
            PlantSpec::Biclique { left, .. } | PlantSpec::Starclique { left, .. } => left,
        };
        let (a, b) = nodes.split_at(split);
        match spec {
            PlantSpec::Clique { .. } | PlantSpec::Starclique { .. } => {
                for (i, &u) in a.iter().enumerate() {
                    for &v in &a[i + 1..] {
                        edges.push((u, v));
                    }
                }
            }
            _ => {}
        }
        for &u in a {
            for &v in b {
                edges.push((u, v));
            }
        }
        let (mut first, mut second) = (a.to_vec(), b.to_vec());
        first.sort_unstable();
        second.sort_unstable();
        planted.push(Planted {
            kind: spec.kind(),
            first,
            second,
        });
    }
    bernoulli_pairs(n, noise_p, &mut r, |u, v| {
        let (a, b) = (&member_of[u as usize], &member_of[v as usize]);
        if !a.iter().any(|x| b.contains(x)) {
            edges.push((v, u));
        }
    });
    Ok((Graph::from_edges(n, edges)?, planted))
}

/// Structure sizes used in the composition grid, as fractions of `n`.
pub fn grid_spec(kind: StructureKind, n: usize) -> PlantSpec {
    let part = |f: f64, min: usize| ((f * n as f64).round() as usize).max(min);
    match kind {
        StructureKind::Clique => PlantSpec::Clique { size: part(0.01, 10) },
        StructureKind::Star => PlantSpec::Star { spokes: part(0.02, 20) },
        StructureKind::Biclique => PlantSpec::Biclique {
            left: part(0.005, 5),
            right: part(0.01, 10),
        },
        StructureKind::Starclique => PlantSpec::Starclique {
            left: part(0.005, 5),
            right: part(0.01, 10),
        },
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridGraph {
    /// Kinds present, in vocabulary order.
    pub composition: Vec<StructureKind>,
    pub n: usize,
    pub per_kind: usize,
    #[serde(skip)]
    pub graph: Option<Graph>,
    pub planted: Vec<Planted>,
}

/// All non-empty kind compositions in a fixed order (by bitmask).
pub fn compositions() -> Vec<Vec<StructureKind>> {
    (1u32..16)
        .map(|mask| {
            StructureKind::ALL
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, k)| *k)
                .collect()
        })
        .collect()
}

/// One graph per (composition, size): `⌊budget / |S|⌋` structures of each
/// kind in the composition, sized by [`grid_spec`], over `G(n, noise_degree / n)`.
pub fn composition_grid(sizes: &[usize], budget: usize, noise_degree: f64, seed: u64) -> Result<Vec<GridGraph>> {
    let mut out = Vec::new();
    for (ci, comp) in compositions().into_iter().enumerate() {
        for (si, &n) in sizes.iter().enumerate() {
            let per_kind = budget / comp.len();
            let specs: Vec<PlantSpec> = comp
                .iter()
                .flat_map(|&k| std::iter::repeat_n(grid_spec(k, n), per_kind))
                .collect();
            let p = (noise_degree / n as f64).min(1.0);
            let s = seed
                .wrapping_mul(1_000_003)
                .wrapping_add((ci * sizes.len() + si) as u64);
            let (graph, planted) = plant(n, p, &specs, s, false)?;
            out.push(GridGraph {
                composition: comp.clone(),
                n,
                per_kind,
                graph: Some(graph),
                planted,
            });
        }
    }
    Ok(out)
}
