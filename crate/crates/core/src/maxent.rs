//! Maximum-entropy edge distribution under a model's region constraints and
//! the resulting optimal data code length `L(G | M)`.
//!
//! Each structure constrains the edge count of one to three regions of the
//! adjacency matrix, and one global region constrains the total edge count.
//! Under the max-ent distribution, `Pr(a_ij = 1)` is the logistic function of
//! the summed multipliers of the regions covering cell `(i, j)`, so all cells
//! covered by the same set of regions share one probability. The solver
//! works on these cell classes and never touches individual cells.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::model::{Model, Structure, StructureKind};

/// Bound on the summed multipliers of a cell.
pub const LOGIT_CLAMP: f64 = 30.0;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Which part of a structure's node set a region covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionPart {
    /// Every node pair of the graph.
    All,
    Clique,
    HubSpoke,
    SpokeSpoke,
    Left,
    Right,
    Across,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// Index of the owning structure; `None` for the global region.
    pub owner: Option<usize>,
    pub part: RegionPart,
    /// Number of cells (node pairs) in the region.
    pub size: u64,
    /// Required number of edges in the region.
    pub target: u64,
}

/// A set of cells covered by exactly the same regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellClass {
    pub regions: Vec<u32>,
    pub cells: u64,
    pub edges: u64,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub n: u64,
    pub m: u64,
    pub regions: Vec<Region>,
    pub classes: Vec<CellClass>,
    /// Region index -> indices of the classes it covers.
    members: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntState {
    pub lambdas: Vec<f64>,
    pub sweeps: usize,
    pub worst_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Role {
    Member,
    Hub,
    Spoke,
    Left,
    Right,
}

fn region_parts(kind: StructureKind) -> &'static [RegionPart] {
    match kind {
        StructureKind::Clique => &[RegionPart::Clique],
        StructureKind::Star => &[RegionPart::HubSpoke, RegionPart::SpokeSpoke],
        StructureKind::Biclique | StructureKind::Starclique => {
            &[RegionPart::Left, RegionPart::Right, RegionPart::Across]
        }
    }
}

/// Offset (within the structure's regions) of the region covering a pair of
/// roles, if any.
fn region_offset(a: Role, b: Role) -> Option<u32> {
    use Role::*;
    match (a, b) {
        (Member, Member) => Some(0),
        (Hub, Spoke) | (Spoke, Hub) => Some(0),
        (Spoke, Spoke) => Some(1),
        (Left, Left) => Some(0),
        (Right, Right) => Some(1),
        (Left, Right) | (Right, Left) => Some(2),
        _ => None,
    }
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Builds the region constraints and cell classes of `model` on `g`.
pub fn build_constraints(g: &Graph, model: &Model) -> Result<ConstraintSystem> {
    build_constraints_for(g, &model.structures)
}

pub fn build_constraints_for(g: &Graph, structures: &[Structure]) -> Result<ConstraintSystem> {
    let n = g.node_count();
    let m = g.edge_count() as u64;

    let mut regions = vec![Region {
        owner: None,
        part: RegionPart::All,
        size: g.pair_count(),
        target: m,
    }];
    let mut first_region = Vec::with_capacity(structures.len());
    for (idx, s) in structures.iter().enumerate() {
        if let Some(v) = s.max_node() {
            if v as usize >= n {
                return Err(Error::Invariant(format!(
                    "structure {idx} references node {v} but the graph has {n} nodes"
                )));
            }
        }
        first_region.push(regions.len() as u32);
        let shape = s.shape();
        let sizes = match s.kind() {
            StructureKind::Clique => vec![pairs(shape.nodes[0])],
            StructureKind::Star => vec![shape.nodes[0], pairs(shape.nodes[0])],
            _ => shape.kind.edge_maxima(&shape.nodes),
        };
        let targets = match s.kind() {
            StructureKind::Star => vec![shape.nodes[0], shape.edges[0]],
            _ => shape.edges.clone(),
        };
        for ((part, size), target) in region_parts(s.kind()).iter().zip(sizes).zip(targets) {
            regions.push(Region {
                owner: Some(idx),
                part: *part,
                size,
                target,
            });
        }
    }

    // membership profile of every node: (structure, role), sorted by structure
    let mut profiles: Vec<Vec<(u32, Role)>> = vec![Vec::new(); n];
    for (idx, s) in structures.iter().enumerate() {
        let idx = idx as u32;
        match s {
            Structure::Clique { nodes, .. } => {
                for &v in nodes {
                    profiles[v as usize].push((idx, Role::Member));
                }
            }
            Structure::Star { hub, spokes, .. } => {
                profiles[*hub as usize].push((idx, Role::Hub));
                for &v in spokes {
                    profiles[v as usize].push((idx, Role::Spoke));
                }
            }
            Structure::Biclique(b) | Structure::Starclique(b) => {
                for &v in &b.left {
                    profiles[v as usize].push((idx, Role::Left));
                }
                for &v in &b.right {
                    profiles[v as usize].push((idx, Role::Right));
                }
            }
        }
    }

    // group nodes with identical profiles; class 0 is the uncovered nodes
    let mut node_class = vec![0u32; n];
    let mut class_profiles: Vec<Vec<(u32, Role)>> = vec![Vec::new()];
    let mut class_sizes: Vec<u64> = vec![0];
    let mut lookup: HashMap<Vec<(u32, Role)>, u32> = HashMap::new();
    for (v, p) in profiles.into_iter().enumerate() {
        if p.is_empty() {
            class_sizes[0] += 1;
            continue;
        }
        let next = class_profiles.len() as u32;
        let c = *lookup.entry(p.clone()).or_insert_with(|| {
            class_profiles.push(p);
            class_sizes.push(0);
            next
        });
        class_sizes[c as usize] += 1;
        node_class[v] = c;
    }
    drop(lookup);

    let mut classes_of_structure: Vec<Vec<u32>> = vec![Vec::new(); structures.len()];
    for (c, p) in class_profiles.iter().enumerate().skip(1) {
        for &(s, _) in p {
            classes_of_structure[s as usize].push(c as u32);
        }
    }

    // signature -> cell class; class 0 is covered by the global region only
    let mut cell_classes = vec![CellClass {
        regions: vec![0],
        cells: 0,
        edges: 0,
    }];
    let mut by_signature: HashMap<Vec<u32>, u32> = HashMap::new();
    by_signature.insert(vec![0], 0);
    let mut pair_class: HashMap<(u32, u32), u32> = HashMap::new();
    let mut seen = vec![u32::MAX; class_profiles.len()];
    let mut covered_cells = 0u64;
    for a in 1..class_profiles.len() as u32 {
        for &(s, _) in &class_profiles[a as usize] {
            for &b in &classes_of_structure[s as usize] {
                if b < a || seen[b as usize] == a {
                    continue;
                }
                seen[b as usize] = a;
                let sig = signature(
                    &class_profiles[a as usize],
                    &class_profiles[b as usize],
                    &first_region,
                );
                let cells = if a == b {
                    pairs(class_sizes[a as usize])
                } else {
                    class_sizes[a as usize] * class_sizes[b as usize]
                };
                if sig.len() == 1 || cells == 0 {
                    continue;
                }
                let next = cell_classes.len() as u32;
                let id = *by_signature.entry(sig.clone()).or_insert_with(|| {
                    cell_classes.push(CellClass {
                        regions: sig,
                        cells: 0,
                        edges: 0,
                    });
                    next
                });
                cell_classes[id as usize].cells += cells;
                covered_cells += cells;
                pair_class.insert((a, b), id);
            }
        }
    }
    cell_classes[0].cells = g.pair_count() - covered_cells;

    let mut covered_edges = 0u64;
    if !pair_class.is_empty() {
        for u in 0..n as NodeId {
            let cu = node_class[u as usize];
            if cu == 0 {
                continue;
            }
            for &w in g.neighbors(u) {
                if w <= u {
                    continue;
                }
                let cw = node_class[w as usize];
                if cw == 0 {
                    continue;
                }
                if let Some(&id) = pair_class.get(&(cu.min(cw), cu.max(cw))) {
                    cell_classes[id as usize].edges += 1;
                    covered_edges += 1;
                }
            }
        }
    }
    cell_classes[0].edges = m - covered_edges;

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); regions.len()];
    for (c, cc) in cell_classes.iter().enumerate() {
        for &r in &cc.regions {
            members[r as usize].push(c as u32);
        }
    }

    // the model's recorded counts must match the graph
    for (r, region) in regions.iter().enumerate() {
        let cells: u64 = members[r].iter().map(|&c| cell_classes[c as usize].cells).sum();
        let edges: u64 = members[r].iter().map(|&c| cell_classes[c as usize].edges).sum();
        if cells != region.size || edges != region.target {
            return Err(Error::Invariant(format!(
                "region {r} ({:?} of structure {:?}) has {cells} cells / {edges} edges in the graph, model says {} / {}",
                region.part, region.owner, region.size, region.target
            )));
        }
    }

    Ok(ConstraintSystem {
        n: n as u64,
        m,
        regions,
        classes: cell_classes,
        members,
    })
}

fn signature(p: &[(u32, Role)], q: &[(u32, Role)], first_region: &[u32]) -> Vec<u32> {
    let mut sig = vec![0u32];
    let (mut i, mut j) = (0, 0);
    while i < p.len() && j < q.len() {
        match p[i].0.cmp(&q[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if let Some(off) = region_offset(p[i].1, q[j].1) {
                    sig.push(first_region[p[i].0 as usize] + off);
                }
                i += 1;
                j += 1;
            }
        }
    }
    sig
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

impl ConstraintSystem {
    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    /// Clamped logit of every cell class.
    pub fn logits(&self, lambdas: &[f64]) -> Vec<f64> {
        self.classes
            .iter()
            .map(|c| {
                let s: f64 = c.regions.iter().map(|&r| lambdas[r as usize]).sum();
                s.clamp(-LOGIT_CLAMP, LOGIT_CLAMP)
            })
            .collect()
    }

    /// Expected minus required edge count of every region.
    pub fn residuals(&self, lambdas: &[f64]) -> Vec<f64> {
        let probs: Vec<f64> = self.logits(lambdas).into_iter().map(sigmoid).collect();
        self.members
            .iter()
            .zip(&self.regions)
            .map(|(cls, region)| {
                let expected: f64 = cls
                    .iter()
                    .map(|&c| self.classes[c as usize].cells as f64 * probs[c as usize])
                    .sum();
                expected - region.target as f64
            })
            .collect()
    }

    /// Smallest residual reachable under the logit clamp: regions whose
    /// target is 0 or full can only get within `size * σ(-30)`.
    fn residual_floor(&self, r: usize) -> f64 {
        let region = &self.regions[r];
        if region.target == 0 || region.target == region.size {
            region.size as f64 * sigmoid(-LOGIT_CLAMP) * (1.0 + 1e-6) + 1e-12
        } else {
            0.0
        }
    }

    fn worst_excess(&self, lambdas: &[f64], tol: f64) -> (f64, f64) {
        let res = self.residuals(lambdas);
        let mut worst = 0.0f64;
        let mut excess = 0.0f64;
        for (r, x) in res.iter().enumerate() {
            worst = worst.max(x.abs());
            excess = excess.max(x.abs() - tol.max(self.residual_floor(r)));
        }
        (worst, excess)
    }

    /// Solves for the multiplier of region `r` with all others fixed.
    fn update_region(&self, r: usize, lambdas: &mut [f64], base: &mut [f64]) {
        let cls = &self.members[r];
        let region = &self.regions[r];
        let current = lambdas[r];
        // base[c] holds the unclamped logit of class c
        let others: Vec<(f64, f64)> = cls
            .iter()
            .map(|&c| (self.classes[c as usize].cells as f64, base[c as usize] - current))
            .collect();
        if others.is_empty() {
            return;
        }
        let lo_shift = others.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
        let hi_shift = others.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
        let mut lo = -LOGIT_CLAMP - lo_shift;
        let mut hi = LOGIT_CLAMP - hi_shift;
        let target = region.target as f64;

        let eval = |x: f64| -> (f64, f64) {
            let mut f = -target;
            let mut df = 0.0;
            for &(cells, shift) in &others {
                let z = shift + x;
                let p = sigmoid(z.clamp(-LOGIT_CLAMP, LOGIT_CLAMP));
                f += cells * p;
                if z.abs() < LOGIT_CLAMP {
                    df += cells * p * (1.0 - p);
                }
            }
            (f, df)
        };

        let next = if region.target == 0 {
            lo
        } else if region.target == region.size {
            hi
        } else {
            let mut x = current.clamp(lo, hi);
            for _ in 0..200 {
                let (f, df) = eval(x);
                if f.abs() <= 1e-13 * target.max(1.0) {
                    break;
                }
                if f > 0.0 {
                    hi = x;
                } else {
                    lo = x;
                }
                let newton = if df > 0.0 { x - f / df } else { f64::NAN };
                x = if newton.is_finite() && newton > lo && newton < hi {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
                if hi - lo < 1e-15 * (1.0 + x.abs()) {
                    break;
                }
            }
            x
        };
        let delta = next - current;
        if delta != 0.0 {
            lambdas[r] = next;
            for &c in cls {
                base[c as usize] += delta;
            }
        }
    }
}

/// Fits the max-ent distribution from all-zero multipliers.
pub fn fit(cs: &ConstraintSystem, tol: f64, max_iter: usize) -> Result<MaxEntState> {
    let state = fit_from(cs, &[], tol, max_iter);
    if state.converged {
        Ok(state)
    } else {
        Err(Error::Convergence {
            iterations: state.sweeps,
            worst_residual: state.worst_residual,
        })
    }
}

/// Coordinate ascent on the dual, warm-started from `init` (missing
/// multipliers start at 0). Returns the state even when not converged.
pub fn fit_from(cs: &ConstraintSystem, init: &[f64], tol: f64, max_iter: usize) -> MaxEntState {
    let mut lambdas = vec![0.0; cs.region_count()];
    for (l, v) in lambdas.iter_mut().zip(init) {
        *l = *v;
    }
    let mut base: Vec<f64> = cs
        .classes
        .iter()
        .map(|c| c.regions.iter().map(|&r| lambdas[r as usize]).sum())
        .collect();
    let (mut worst, mut excess) = cs.worst_excess(&lambdas, tol);
    let mut sweeps = 0;
    while excess > 0.0 && sweeps < max_iter {
        for r in 0..cs.region_count() {
            cs.update_region(r, &mut lambdas, &mut base);
        }
        sweeps += 1;
        (worst, excess) = cs.worst_excess(&lambdas, tol);
    }
    MaxEntState {
        lambdas,
        sweeps,
        worst_residual: worst,
        converged: excess <= 0.0,
    }
}

/// Probability of an edge in every cell class.
pub fn class_probabilities(cs: &ConstraintSystem, state: &MaxEntState) -> Vec<f64> {
    cs.logits(&state.lambdas).into_iter().map(sigmoid).collect()
}

/// `L(G | M)`: Shannon code length of the adjacency upper triangle under the
/// fitted distribution, in bits.
pub fn data_length(cs: &ConstraintSystem, state: &MaxEntState) -> Result<f64> {
    let mut nats = 0.0;
    for (class, z) in cs.classes.iter().zip(cs.logits(&state.lambdas)) {
        let p = sigmoid(z);
        let non_edges = class.cells - class.edges;
        if (p == 0.0 && class.edges > 0) || (p == 1.0 && non_edges > 0) {
            return Err(Error::InfiniteLength);
        }
        // -ln σ(z) = softplus(-z), -ln(1 - σ(z)) = softplus(z)
        nats += class.edges as f64 * softplus(-z) + non_edges as f64 * softplus(z);
    }
    Ok(nats / std::f64::consts::LN_2)
}

/// Convenience: constraints, fit and data length in one call.
pub fn model_data_length(g: &Graph, structures: &[Structure]) -> Result<(f64, MaxEntState)> {
    let cs = build_constraints_for(g, structures)?;
    let state = fit_from(&cs, &[], DEFAULT_TOL, DEFAULT_MAX_ITER);
    if !state.converged {
        log::warn!(
            "max-ent fit stopped after {} sweeps with residual {:e}",
            state.sweeps,
            state.worst_residual
        );
    }
    Ok((data_length(&cs, &state)?, state))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }
}
