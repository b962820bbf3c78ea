//! Candidate generation from seed components, one generator per kind, and
//! merging of heavily overlapping candidates.

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};

use super::clique::{max_clique, Local};
use super::{MergeBasis, SummarizerConfig};
use crate::graph::{intersection_size, union_sorted, Graph, NodeId};
use crate::model::{Structure, StructureKind};

/// Number of neighbours each outside node has inside a growing node set.
#[derive(Default)]
struct Links {
    count: HashMap<NodeId, usize>,
}

impl Links {
    fn of(g: &Graph, nodes: &[NodeId]) -> Links {
        let mut l = Links::default();
        for &v in nodes {
            l.add(g, v);
        }
        l
    }

    fn add(&mut self, g: &Graph, v: NodeId) {
        for &w in g.neighbors(v) {
            *self.count.entry(w).or_insert(0) += 1;
        }
    }

    fn remove(&mut self, g: &Graph, v: NodeId) {
        for &w in g.neighbors(v) {
            if let Some(c) = self.count.get_mut(&w) {
                *c -= 1;
            }
        }
    }

    fn get(&self, v: NodeId) -> usize {
        self.count.get(&v).copied().unwrap_or(0)
    }
}

fn at_least(count: usize, frac: f64, size: usize) -> bool {
    count as f64 >= frac * size as f64
}

fn at_most(count: usize, frac: f64, size: usize) -> bool {
    count as f64 <= frac * size as f64
}

/// Greedy maximal independent set of `g` induced on `nodes`: lowest induced
/// degree first, ties by lowest index. Returned sorted.
pub fn maximal_independent_set(g: &Graph, nodes: &[NodeId]) -> Vec<NodeId> {
    let local = Local::induced(g, nodes);
    let mut order: Vec<usize> = (0..local.len()).collect();
    order.sort_by_key(|&i| (local.adj[i].len(), local.nodes[i]));
    let mut blocked = vec![false; local.len()];
    let mut out = Vec::new();
    for i in order {
        if blocked[i] {
            continue;
        }
        out.push(local.nodes[i]);
        for &j in &local.adj[i] {
            blocked[j] = true;
        }
    }
    out.sort_unstable();
    out
}

/// Up to `cap` nodes of highest degree in `g`, ties by lowest index.
fn top_by_degree(g: &Graph, mut nodes: Vec<NodeId>, cap: usize) -> Vec<NodeId> {
    nodes.sort_by_key(|&v| (Reverse(g.degree(v)), v));
    nodes.truncate(cap);
    nodes.sort_unstable();
    nodes
}

pub fn grow_clique(g: &Graph, seed: &[NodeId], cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    grow_clique_from(g, max_clique(g, seed), cfg, min_size)
}

/// [`grow_clique`] starting from an already known maximum clique of the seed.
pub fn grow_clique_from(g: &Graph, core: Vec<NodeId>, cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    let mut members = core;
    if members.is_empty() {
        return None;
    }
    let mut inside: HashSet<NodeId> = members.iter().copied().collect();
    let mut links = Links::of(g, &members);
    loop {
        let size = members.len();
        let pick = links
            .count
            .iter()
            .filter(|(v, &c)| !inside.contains(v) && at_least(c, cfg.clique_attach_frac, size))
            .map(|(&v, _)| v)
            .max_by_key(|&v| (g.degree(v), Reverse(v)));
        let Some(v) = pick else { break };
        members.push(v);
        inside.insert(v);
        links.add(g, v);
    }
    if members.len() < min_size.max(2) {
        return None;
    }
    Some(Structure::clique_in(g, members))
}

pub fn grow_star(g: &Graph, seed: &[NodeId], cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    let local = Local::induced(g, seed);
    if local.len() < 2 {
        return None;
    }
    let hub = (0..local.len()).max_by_key(|&i| (local.adj[i].len(), Reverse(local.nodes[i])))?;
    let mut alive = vec![true; local.len()];
    alive[hub] = false;
    let mut spokes = local.len() - 1;
    // neighbours among the spokes
    let mut internal: Vec<usize> = (0..local.len())
        .map(|i| local.adj[i].iter().filter(|&&j| j != hub).count())
        .collect();
    let mut round = 0usize;
    loop {
        let limit = cfg.star_spoke_degree_frac * spokes as f64;
        let mut offending: Vec<usize> = (0..local.len())
            .filter(|&i| alive[i] && internal[i] as f64 > limit)
            .collect();
        if offending.is_empty() {
            break;
        }
        let frac = (cfg.star_prune_base + cfg.star_prune_step * round as f64).min(1.0);
        let remove = ((frac * offending.len() as f64).ceil() as usize).clamp(1, offending.len());
        offending.sort_by_key(|&i| (Reverse(internal[i]), local.nodes[i]));
        for &i in &offending[..remove] {
            alive[i] = false;
            spokes -= 1;
            for &j in &local.adj[i] {
                internal[j] -= 1;
            }
        }
        round += 1;
    }
    let spoke_ids: Vec<NodeId> = (0..local.len()).filter(|&i| alive[i]).map(|i| local.nodes[i]).collect();
    let star = Structure::star_in(g, local.nodes[hub], spoke_ids);
    if star.node_count() < min_size.max(2) {
        return None;
    }
    Some(star)
}

/// Smallest clique core a starclique may have.
const STARCLIQUE_MIN_CORE: usize = 3;

/// A single peripheral node joined to the whole core is just a larger clique.
const STARCLIQUE_MIN_PERIPHERY: usize = 2;

/// Growth and pruning alternate at most this many times, so a node that is
/// pruned and then requalifies cannot cycle forever.
const MAX_PRUNE_ROUNDS: usize = 8;

/// Alternating growth of a two-sided structure. Each step adds to one side
/// the qualifying outside node with the most neighbours on the other side.
struct TwoSidedGrowth<'g> {
    g: &'g Graph,
    left: Vec<NodeId>,
    right: Vec<NodeId>,
    inside: HashSet<NodeId>,
    left_links: Links,
    right_links: Links,
}

impl<'g> TwoSidedGrowth<'g> {
    fn new(g: &'g Graph, left: Vec<NodeId>, right: Vec<NodeId>) -> Self {
        let inside = left.iter().chain(&right).copied().collect();
        TwoSidedGrowth {
            g,
            left_links: Links::of(g, &left),
            right_links: Links::of(g, &right),
            left,
            right,
            inside,
        }
    }

    /// Adds to the left (`to_left`) or right side the best node accepted by
    /// `ok(links into left, links into right)`, ranked by links into the
    /// other side. Returns whether a node was added.
    fn step<F>(&mut self, to_left: bool, ok: F) -> bool
    where
        F: Fn(usize, usize, usize, usize) -> bool,
    {
        let (nl, nr) = (self.left.len(), self.right.len());
        let other = if to_left { &self.right_links } else { &self.left_links };
        let pick = other
            .count
            .keys()
            .copied()
            .filter(|v| !self.inside.contains(v))
            .filter(|&v| ok(self.left_links.get(v), nl, self.right_links.get(v), nr))
            .max_by_key(|&v| (other.get(v), Reverse(v)));
        let Some(v) = pick else { return false };
        self.inside.insert(v);
        if to_left {
            self.left.push(v);
            self.left_links.add(self.g, v);
        } else {
            self.right.push(v);
            self.right_links.add(self.g, v);
        }
        true
    }

    /// Removes, one at a time, the member with the smallest fraction of links
    /// into the other side while that fraction is below `dense`. Nodes can
    /// qualify while the other side is still small and fall below the
    /// threshold once it has grown. Returns whether anything was removed.
    fn prune(&mut self, dense: f64) -> bool {
        let mut removed = false;
        loop {
            let (nl, nr) = (self.left.len(), self.right.len());
            let worst = self
                .left
                .iter()
                .map(|&v| (self.right_links.get(v), nr, true, v))
                .chain(self.right.iter().map(|&v| (self.left_links.get(v), nl, false, v)))
                .filter(|&(c, size, _, _)| !at_least(c, dense, size))
                .min_by(|a, b| {
                    let fa = a.0 as f64 / a.1 as f64;
                    let fb = b.0 as f64 / b.1 as f64;
                    fa.total_cmp(&fb).then(a.3.cmp(&b.3))
                });
            let Some((_, _, on_left, v)) = worst else { return removed };
            removed = true;
            self.inside.remove(&v);
            let (side, links) = if on_left {
                (&mut self.left, &mut self.left_links)
            } else {
                (&mut self.right, &mut self.right_links)
            };
            side.retain(|&w| w != v);
            links.remove(self.g, v);
        }
    }
}

pub fn grow_biclique(g: &Graph, seed: &[NodeId], cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    let right = top_by_degree(g, maximal_independent_set(g, seed), cfg.biclique_seed_cap);
    let right_set: HashSet<NodeId> = right.iter().copied().collect();
    let links = Links::of(g, &right);
    let candidates: Vec<NodeId> = links
        .count
        .iter()
        .filter(|(v, &c)| !right_set.contains(v) && at_least(c, cfg.dense_frac, right.len()))
        .map(|(&v, _)| v)
        .collect();
    let left = top_by_degree(g, maximal_independent_set(g, &candidates), cfg.biclique_seed_cap);
    if left.len() < cfg.biclique_min_left || right.len() < cfg.biclique_min_right {
        return None;
    }
    let (sparse, dense) = (cfg.sparse_frac, cfg.dense_frac);
    let mut grow = TwoSidedGrowth::new(g, left, right);
    let mut rounds = 0;
    loop {
        let a = grow.step(true, |cl, nl, cr, nr| at_most(cl, sparse, nl) && at_least(cr, dense, nr));
        let b = grow.step(false, |cl, nl, cr, nr| at_most(cr, sparse, nr) && at_least(cl, dense, nl));
        if !a && !b && (rounds == MAX_PRUNE_ROUNDS || !grow.prune(dense)) {
            break;
        }
        if !a && !b {
            rounds += 1;
        }
    }
    // pruning can shrink either side below the seeding floors
    if grow.left.len() < cfg.biclique_min_left
        || grow.right.len() < cfg.biclique_min_right
        || grow.left.len() + grow.right.len() < min_size
    {
        return None;
    }
    Some(Structure::two_sided_in(g, StructureKind::Biclique, grow.left, grow.right))
}

pub fn grow_starclique(g: &Graph, seed: &[NodeId], cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    grow_starclique_from(g, max_clique(g, seed), cfg, min_size)
}

/// [`grow_starclique`] starting from an already known maximum clique of the seed.
pub fn grow_starclique_from(g: &Graph, left: Vec<NodeId>, cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    if left.len() < STARCLIQUE_MIN_CORE {
        return None;
    }
    let left_set: HashSet<NodeId> = left.iter().copied().collect();
    let links = Links::of(g, &left);
    let candidates: Vec<NodeId> = links
        .count
        .iter()
        .filter(|(v, &c)| !left_set.contains(v) && at_least(c, cfg.dense_frac, left.len()))
        .map(|(&v, _)| v)
        .collect();
    let right = maximal_independent_set(g, &candidates);
    if right.is_empty() {
        return None;
    }
    let (sparse, dense) = (cfg.sparse_frac, cfg.dense_frac);
    let mut grow = TwoSidedGrowth::new(g, left, right);
    let mut rounds = 0;
    loop {
        let a = grow.step(true, |cl, nl, cr, nr| at_least(cl, dense, nl) && at_least(cr, dense, nr));
        let b = grow.step(false, |cl, nl, cr, nr| at_most(cr, sparse, nr) && at_least(cl, dense, nl));
        if !a && !b && (rounds == MAX_PRUNE_ROUNDS || !grow.prune(dense)) {
            break;
        }
        if !a && !b {
            rounds += 1;
        }
    }
    if grow.left.len() < STARCLIQUE_MIN_CORE || grow.right.len() < STARCLIQUE_MIN_PERIPHERY || grow.left.len() + grow.right.len() < min_size {
        return None;
    }
    Some(Structure::two_sided_in(g, StructureKind::Starclique, grow.left, grow.right))
}

pub fn grow(kind: StructureKind, g: &Graph, seed: &[NodeId], cfg: &SummarizerConfig, min_size: usize) -> Option<Structure> {
    match kind {
        StructureKind::Clique => grow_clique(g, seed, cfg, min_size),
        StructureKind::Star => grow_star(g, seed, cfg, min_size),
        StructureKind::Biclique => grow_biclique(g, seed, cfg, min_size),
        StructureKind::Starclique => grow_starclique(g, seed, cfg, min_size),
    }
}

/// [`grow`] with the seed's maximum clique computed by the caller, so the
/// clique-based kinds can share it.
pub fn grow_with_core(
    kind: StructureKind,
    g: &Graph,
    seed: &[NodeId],
    core: &[NodeId],
    cfg: &SummarizerConfig,
    min_size: usize,
) -> Option<Structure> {
    match kind {
        StructureKind::Clique => grow_clique_from(g, core.to_vec(), cfg, min_size),
        StructureKind::Starclique => grow_starclique_from(g, core.to_vec(), cfg, min_size),
        _ => grow(kind, g, seed, cfg, min_size),
    }
}

fn overlap_fraction(a: &[NodeId], b: &[NodeId], basis: MergeBasis) -> f64 {
    let shared = intersection_size(a, b);
    let denom = match basis {
        MergeBasis::Smaller => a.len().min(b.len()),
        MergeBasis::Union => a.len() + b.len() - shared,
    };
    if denom == 0 {
        return 0.0;
    }
    shared as f64 / denom as f64
}

/// Merges same-kind candidates whose node sets overlap by at least
/// `overlap` (both sides for two-sided kinds). Each candidate, in order, is
/// merged into the first earlier survivor it overlaps with; stars are never
/// merged.
pub fn merge_candidates(g: &Graph, cands: Vec<Structure>, overlap: f64, basis: MergeBasis) -> Vec<Structure> {
    let mut kept: Vec<Structure> = Vec::new();
    // first slot node -> survivors containing it
    let mut index: HashMap<NodeId, Vec<usize>> = HashMap::new();
    for cand in cands {
        if cand.kind() == StructureKind::Star {
            kept.push(cand);
            continue;
        }
        let slots = cand.node_slots();
        let mut shared: HashMap<usize, usize> = HashMap::new();
        for v in &slots[0] {
            for &k in index.get(v).map(|x| x.as_slice()).unwrap_or(&[]) {
                *shared.entry(k).or_insert(0) += 1;
            }
        }
        let mut hits: Vec<usize> = shared.into_keys().collect();
        hits.sort_unstable();
        let target = hits.into_iter().find(|&k| {
            let other = kept[k].node_slots();
            other.len() == slots.len()
                && kept[k].kind() == cand.kind()
                && slots.iter().zip(&other).all(|(a, b)| overlap_fraction(a, b, basis) >= overlap)
        });
        match target {
            None => {
                let k = kept.len();
                for &v in &slots[0] {
                    index.entry(v).or_default().push(k);
                }
                kept.push(cand);
            }
            Some(k) => {
                let other = kept[k].node_slots();
                let merged = match cand.kind() {
                    StructureKind::Clique => Structure::clique_in(g, union_sorted(&slots[0], &other[0])),
                    kind => Structure::two_sided_in(
                        g,
                        kind,
                        union_sorted(&slots[0], &other[0]),
                        union_sorted(&slots[1], &other[1]),
                    ),
                };
                for &v in &merged.node_slots()[0] {
                    let list = index.entry(v).or_default();
                    if !list.contains(&k) {
                        list.push(k);
                    }
                }
                kept[k] = merged;
            }
        }
    }
    kept
}
