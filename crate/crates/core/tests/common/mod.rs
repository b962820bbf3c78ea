//! Independent oracles and fixtures shared by the integration tests and the
//! acceptance runner.

#![allow(dead_code)]

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graphsim::aligner::{build_common, Matching};
use graphsim::codec::{common_model_length, transform_length_for};
use graphsim::generators::{composition_grid, plant, GridGraph, PlantSpec};
use graphsim::graph::{jaccard, Graph, NodeId};
use graphsim::maxent::{ConstraintSystem, RegionPart};
use graphsim::model::{Model, Shape, Structure, StructureKind, TwoSided};
use graphsim::summarizer::{summarize, SummarizerConfig};

pub const C0: f64 = 2.865064;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

fn sorted_sample(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<NodeId> {
    let mut v: Vec<NodeId> = sample(rng, n, k).into_iter().map(|x| x as NodeId).collect();
    v.sort_unstable();
    v
}

// ---------------------------------------------------------------- structures

/// A valid structure of `kind` over nodes `0..n`, with arbitrary edge counts
/// within the slot maxima. `max_side` bounds every node slot.
pub fn random_structure(rng: &mut ChaCha8Rng, kind: StructureKind, n: usize, max_side: usize) -> Structure {
    assert!(n >= 2);
    match kind {
        StructureKind::Clique => {
            let k = rng.gen_range(1..=max_side.min(n));
            let nodes = sorted_sample(rng, n, k);
            let edges = rng.gen_range(0..=pairs(k as u64));
            Structure::Clique { nodes, edges }
        }
        StructureKind::Star => {
            let s = rng.gen_range(1..=max_side.min(n - 1));
            let mut all = sample(rng, n, s + 1).into_vec();
            let hub = all.pop().unwrap() as NodeId;
            let mut spokes: Vec<NodeId> = all.into_iter().map(|x| x as NodeId).collect();
            spokes.sort_unstable();
            let spoke_edges = rng.gen_range(0..=pairs(s as u64));
            Structure::Star {
                hub,
                spokes,
                spoke_edges,
            }
        }
        StructureKind::Biclique | StructureKind::Starclique => {
            let nl = rng.gen_range(1..=max_side.min(n - 1));
            let nr = rng.gen_range(1..=max_side.min(n - nl));
            let all = sample(rng, n, nl + nr).into_vec();
            let mut left: Vec<NodeId> = all[..nl].iter().map(|&x| x as NodeId).collect();
            let mut right: Vec<NodeId> = all[nl..].iter().map(|&x| x as NodeId).collect();
            left.sort_unstable();
            right.sort_unstable();
            let body = TwoSided {
                left_edges: rng.gen_range(0..=pairs(nl as u64)),
                right_edges: rng.gen_range(0..=pairs(nr as u64)),
                cross_edges: rng.gen_range(0..=(nl * nr) as u64),
                left,
                right,
            };
            if kind == StructureKind::Biclique {
                Structure::Biclique(body)
            } else {
                Structure::Starclique(body)
            }
        }
    }
}

pub fn random_kind(rng: &mut ChaCha8Rng, kinds: &[StructureKind]) -> StructureKind {
    kinds[rng.gen_range(0..kinds.len())]
}

pub fn random_model(rng: &mut ChaCha8Rng, n: usize, count: usize, kinds: &[StructureKind], max_side: usize) -> Model {
    let structures = (0..count)
        .map(|_| {
            let k = random_kind(rng, kinds);
            random_structure(rng, k, n, max_side)
        })
        .collect();
    Model {
        n: n as u64,
        m: rng.gen_range(n as u64..=(n as u64) * 8),
        structures,
    }
}

/// The same structure with the same counts but different node IDs.
pub fn relabel(s: &Structure, rng: &mut ChaCha8Rng, n: usize) -> Structure {
    let total = s.node_count();
    let fresh = sample(rng, n, total).into_vec();
    let mut take = fresh.into_iter().map(|x| x as NodeId);
    let mut grab = |k: usize| {
        let mut v: Vec<NodeId> = take.by_ref().take(k).collect();
        v.sort_unstable();
        v
    };
    match s {
        Structure::Clique { nodes, edges } => Structure::Clique {
            nodes: grab(nodes.len()),
            edges: *edges,
        },
        Structure::Star { spokes, spoke_edges, .. } => {
            let hub = grab(1)[0];
            Structure::Star {
                hub,
                spokes: grab(spokes.len()),
                spoke_edges: *spoke_edges,
            }
        }
        Structure::Biclique(b) | Structure::Starclique(b) => {
            let body = TwoSided {
                left: grab(b.left.len()),
                right: grab(b.right.len()),
                left_edges: b.left_edges,
                right_edges: b.right_edges,
                cross_edges: b.cross_edges,
            };
            if s.kind() == StructureKind::Biclique {
                Structure::Biclique(body)
            } else {
                Structure::Starclique(body)
            }
        }
    }
}

// ---------------------------------------------------------------- codec

/// `log2 C(n, k)` from the exact big-integer binomial.
pub fn log2_binomial_exact(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c = BigUint::from(1u32);
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    log2_big(&c)
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    (top.iter_u64_digits().next().unwrap() as f64).log2() + shift as f64
}

/// Sum of the strictly positive iterated logarithms of `n`, plus `log2 c0`.
pub fn universal_int_oracle(n: u64) -> f64 {
    let mut total = C0.log2();
    let mut x = (n as f64).log2();
    while x > 0.0 {
        total += x;
        x = x.log2();
    }
    total
}

fn lg(x: f64) -> f64 {
    if x < 1.0 {
        0.0
    } else {
        x.log2()
    }
}

fn lglg(x: f64) -> f64 {
    lg(lg(x))
}

/// Per-kind structure length evaluated term by term, with exact binomials.
pub fn shape_length_oracle(s: &Shape, n: u64, with_ids: bool) -> f64 {
    let ln = universal_int_oracle;
    match s.kind {
        StructureKind::Clique => {
            let ns = s.nodes[0];
            let max = pairs(ns);
            let ms = s.edges[0];
            let mut bits = ln(ns) + 1.0 + lglg((max / 2) as f64) + lg(ms.min(max - ms) as f64);
            if with_ids {
                bits += log2_binomial_exact(n, ns);
            }
            bits
        }
        StructureKind::Star => {
            let ns = s.nodes[0] + 1;
            let xmax = pairs(ns - 1);
            let mut bits = ln(ns - 1) + lglg(xmax as f64) + lg(s.edges[0] as f64);
            if with_ids {
                bits += lg(n as f64) + log2_binomial_exact(n - 1, ns - 1);
            }
            bits
        }
        StructureKind::Biclique | StructureKind::Starclique => {
            let (nl, nr) = (s.nodes[0], s.nodes[1]);
            let ns = nl + nr;
            let (ml, mr, ma) = (s.edges[0], s.edges[1], s.edges[2]);
            let (xl, xr, xa) = (pairs(nl), pairs(nr), nl * nr);
            let left = if s.kind == StructureKind::Starclique { xl - ml } else { ml };
            let mut bits = ln(ns)
                + lg(ns as f64)
                + lglg(xl as f64)
                + lg(left as f64)
                + lglg(xr as f64)
                + lg(mr as f64)
                + lglg(xa as f64)
                + lg((xa - ma) as f64);
            if with_ids {
                bits += log2_binomial_exact(n, nl) + log2_binomial_exact(n - nl, ns - nl);
            }
            bits
        }
    }
}

/// Individual model length from its definition.
pub fn model_length_oracle(m: &Model, with_ids: bool) -> f64 {
    let ln = universal_int_oracle;
    let k = m.structures.len() as u64;
    let mut bits = ln(m.n + 1) + ln(m.m + 1) + ln(k + 1) + log2_binomial_exact(k + 3, 3);
    let mut counts: HashMap<StructureKind, u64> = HashMap::new();
    for s in &m.structures {
        *counts.entry(s.kind()).or_default() += 1;
    }
    for s in &m.structures {
        bits += -(counts[&s.kind()] as f64 / k as f64).log2() + shape_length_oracle(&s.shape(), m.n, with_ids);
    }
    bits
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

// ---------------------------------------------------------------- max-ent

/// Max-ent edge probabilities computed cell by cell: every cell lists the
/// regions covering it, cells forced by a region with no edges (all edges)
/// are fixed at 0 (1), and the remaining dual is minimised by damped Newton.
pub struct CellFit {
    pub n: usize,
    /// `(i, j)` with `i < j`, row-major.
    pub cells: Vec<(NodeId, NodeId)>,
    /// `(owner, part)` of each region covering a cell.
    pub cover: Vec<Vec<(Option<usize>, RegionPart)>>,
    pub probs: Vec<f64>,
    /// Region key -> (size, edges) measured on the graph.
    pub targets: HashMap<(Option<usize>, RegionPart), (u64, u64)>,
}

fn covering(structures: &[Structure], i: NodeId, j: NodeId) -> Vec<(Option<usize>, RegionPart)> {
    let mut out = vec![(None, RegionPart::All)];
    for (idx, s) in structures.iter().enumerate() {
        let part = match s {
            Structure::Clique { nodes, .. } => {
                (nodes.contains(&i) && nodes.contains(&j)).then_some(RegionPart::Clique)
            }
            Structure::Star { hub, spokes, .. } => {
                let (si, sj) = (spokes.contains(&i), spokes.contains(&j));
                if (*hub == i && sj) || (*hub == j && si) {
                    Some(RegionPart::HubSpoke)
                } else if si && sj {
                    Some(RegionPart::SpokeSpoke)
                } else {
                    None
                }
            }
            Structure::Biclique(b) | Structure::Starclique(b) => {
                let side = |v: NodeId| {
                    if b.left.contains(&v) {
                        1
                    } else if b.right.contains(&v) {
                        2
                    } else {
                        0
                    }
                };
                match (side(i), side(j)) {
                    (1, 1) => Some(RegionPart::Left),
                    (2, 2) => Some(RegionPart::Right),
                    (1, 2) | (2, 1) => Some(RegionPart::Across),
                    _ => None,
                }
            }
        };
        if let Some(p) = part {
            out.push((Some(idx), p));
        }
    }
    out
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for r in col + 1..k {
            let f = a[r][col] / d;
            if f != 0.0 {
                for c in col..k {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// `None` when the fitted distribution would sit on the boundary of the
/// feasible set (some group of identically covered free cells is all edges
/// or all non-edges), where probabilities are only defined as limits.
pub fn maxent_cell_oracle(g: &Graph, structures: &[Structure]) -> Option<CellFit> {
    let n = g.node_count();
    let mut cells = Vec::new();
    let mut cover = Vec::new();
    let mut targets: HashMap<(Option<usize>, RegionPart), (u64, u64)> = HashMap::new();
    for i in 0..n as NodeId {
        for j in i + 1..n as NodeId {
            let c = covering(structures, i, j);
            let e = g.has_edge(i, j) as u64;
            for key in &c {
                let t = targets.entry(*key).or_default();
                t.0 += 1;
                t.1 += e;
            }
            cells.push((i, j));
            cover.push(c);
        }
    }
    let mut probs = vec![f64::NAN; cells.len()];
    for (ci, c) in cover.iter().enumerate() {
        for key in c {
            let (size, edges) = targets[key];
            if edges == 0 {
                probs[ci] = 0.0;
            } else if edges == size {
                probs[ci] = 1.0;
            }
        }
    }
    let free: Vec<usize> = (0..cells.len()).filter(|&c| probs[c].is_nan()).collect();
    let mut keys: Vec<(Option<usize>, RegionPart)> = free.iter().flat_map(|&c| cover[c].iter().copied()).collect();
    keys.sort_by_key(|k| format!("{k:?}"));
    keys.dedup();
    let index: HashMap<_, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();

    // interior check on groups of free cells with equal cover
    let mut groups: HashMap<Vec<usize>, (u64, u64)> = HashMap::new();
    for &c in &free {
        let mut sig: Vec<usize> = cover[c].iter().map(|k| index[k]).collect();
        sig.sort_unstable();
        let e = groups.entry(sig).or_default();
        e.0 += 1;
        e.1 += g.has_edge(cells[c].0, cells[c].1) as u64;
    }
    if groups.values().any(|&(size, edges)| edges == 0 || edges == size) {
        return None;
    }

    let k = keys.len();
    let mut t = vec![0.0; k];
    for &c in &free {
        if g.has_edge(cells[c].0, cells[c].1) {
            for key in &cover[c] {
                t[index[key]] += 1.0;
            }
        }
    }
    let members: Vec<Vec<usize>> = free.iter().map(|&c| cover[c].iter().map(|key| index[key]).collect()).collect();
    let dual = |lam: &[f64]| -> f64 {
        let mut f: f64 = -lam.iter().zip(&t).map(|(l, t)| l * t).sum::<f64>();
        for m in &members {
            let z: f64 = m.iter().map(|&r| lam[r]).sum();
            f += z.max(0.0) + (-z.abs()).exp().ln_1p();
        }
        f
    };
    let mut lam = vec![0.0; k];
    let mut converged = false;
    for _ in 0..200 {
        let mut grad: Vec<f64> = t.iter().map(|x| -x).collect();
        let mut hess = vec![vec![0.0; k]; k];
        for m in &members {
            let p = sigmoid(m.iter().map(|&r| lam[r]).sum());
            let w = p * (1.0 - p);
            for &a in m {
                grad[a] += p;
                for &b in m {
                    hess[a][b] += w;
                }
            }
        }
        if grad.iter().all(|x| x.abs() < 1e-11) {
            converged = true;
            break;
        }
        for (r, row) in hess.iter_mut().enumerate() {
            row[r] += 1e-12;
        }
        let step = solve_dense(hess, grad.iter().map(|x| -x).collect());
        let f0 = dual(&lam);
        let slope: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        let mut a = 1.0;
        loop {
            let cand: Vec<f64> = lam.iter().zip(&step).map(|(l, s)| l + a * s).collect();
            if dual(&cand) <= f0 + 1e-4 * a * slope || a < 1e-12 {
                lam = cand;
                break;
            }
            a *= 0.5;
        }
    }
    if !converged {
        return None;
    }
    for (m, &c) in members.iter().zip(&free) {
        probs[c] = sigmoid(m.iter().map(|&r| lam[r]).sum());
    }
    Some(CellFit {
        n,
        cells,
        cover,
        probs,
        targets,
    })
}

/// Library probability of every oracle cell, looked up through the cell
/// classes of `cs`.
pub fn library_cell_probs(cs: &ConstraintSystem, class_probs: &[f64], fit: &CellFit) -> Vec<f64> {
    let region_index: HashMap<(Option<usize>, RegionPart), u32> = cs
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| ((r.owner, r.part), i as u32))
        .collect();
    let class_index: HashMap<Vec<u32>, usize> = cs
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut r = c.regions.clone();
            r.sort_unstable();
            (r, i)
        })
        .collect();
    fit.cover
        .iter()
        .map(|c| {
            let mut sig: Vec<u32> = c.iter().map(|k| region_index[k]).collect();
            sig.sort_unstable();
            class_probs[class_index[&sig]]
        })
        .collect()
}

/// A random graph on `n` nodes with a few structures read off it.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, p: f64, count: usize) -> (Graph, Vec<Structure>) {
    let mut edges = Vec::new();
    for i in 0..n as NodeId {
        for j in i + 1..n as NodeId {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::from_edges(n, edges).unwrap();
    let mut structures = Vec::new();
    while structures.len() < count {
        let s = match random_kind(rng, &StructureKind::ALL) {
            StructureKind::Clique => {
                let k = rng.gen_range(4..=9);
                Structure::clique_in(&g, sorted_sample(rng, n, k))
            }
            StructureKind::Star => {
                let hub = rng.gen_range(0..n) as NodeId;
                let spokes = g.neighbors(hub).to_vec();
                if spokes.len() < 3 {
                    continue;
                }
                Structure::star_in(&g, hub, spokes)
            }
            kind => {
                let size = rng.gen_range(6..=11);
                let all = sample(rng, n, size).into_vec();
                let cut = rng.gen_range(2..all.len() - 1);
                let left = all[..cut].iter().map(|&x| x as NodeId).collect();
                let right = all[cut..].iter().map(|&x| x as NodeId).collect();
                Structure::two_sided_in(&g, kind, left, right)
            }
        };
        structures.push(s);
    }
    (g, structures)
}

// ---------------------------------------------------------------- matching

/// Every maximal type-respecting matching, pairs sorted by side-1 index.
pub fn maximal_matchings(s1: &[Structure], s2: &[Structure]) -> Vec<Vec<(usize, usize)>> {
    fn go(
        i: usize,
        s1: &[Structure],
        s2: &[Structure],
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == s1.len() {
            let matched1: Vec<bool> = (0..s1.len()).map(|a| cur.iter().any(|p| p.0 == a)).collect();
            let open = (0..s1.len())
                .filter(|&a| !matched1[a])
                .any(|a| (0..s2.len()).any(|b| !used[b] && s2[b].kind() == s1[a].kind()));
            if !open {
                out.push(cur.clone());
            }
            return;
        }
        go(i + 1, s1, s2, used, cur, out);
        for j in 0..s2.len() {
            if !used[j] && s2[j].kind() == s1[i].kind() {
                used[j] = true;
                cur.push((i, j));
                go(i + 1, s1, s2, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, s1, s2, &mut vec![false; s2.len()], &mut Vec::new(), &mut out);
    out
}

/// `L(M12) + L(Δ)` with node IDs for the unmatched structures. `m1` must be
/// the larger graph.
pub fn matching_objective(m1: &Model, m2: &Model, pairs: &[(usize, usize)]) -> f64 {
    let (cm, tp) = build_common(m1, m2, &Matching { pairs: pairs.to_vec() }).unwrap();
    common_model_length(&cm).unwrap() + transform_length_for(&tp, &cm, true).unwrap()
}

/// A model pair with at most `max_count` structures per side over shared
/// node ranges, ordered so that the first model describes the larger graph.
pub fn small_model_pair(rng: &mut ChaCha8Rng, max_count: usize) -> (Model, Model) {
    let pool: Vec<StructureKind> = {
        let k = rng.gen_range(1..=2);
        sample(rng, 4, k).into_iter().map(|i| StructureKind::ALL[i]).collect()
    };
    let n2 = rng.gen_range(20..60);
    let n1 = n2 + rng.gen_range(0..40);
    let c1 = rng.gen_range(0..=max_count);
    let c2 = rng.gen_range(0..=max_count);
    // both sides draw nodes from 0..n2 so that node sets overlap
    let mut a = random_model(rng, n2, c1, &pool, 8);
    let b = random_model(rng, n2, c2, &pool, 8);
    a.n = n1 as u64;
    (a, b)
}

// ---------------------------------------------------------------- trees

/// Maximum spanning forest weight by enumerating edge subsets of the right
/// size. Only for small edge lists.
pub fn brute_force_forest_weight(vertices: usize, edges: &[(usize, usize, f64)]) -> (usize, f64) {
    let k = edges.len();
    assert!(k <= 20);
    let mut best = (0usize, 0.0f64);
    for mask in 0u32..(1 << k) {
        let mut parent: Vec<usize> = (0..vertices).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut ok = true;
        let (mut count, mut w) = (0, 0.0);
        for (e, &(i, j, wt)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a == b {
                    ok = false;
                    break;
                }
                parent[a] = b;
                count += 1;
                w += wt;
            }
        }
        if ok && (count > best.0 || (count == best.0 && w > best.1)) {
            best = (count, w);
        }
    }
    best
}

/// Prim's algorithm on a dense weight matrix, restarted in every component.
pub fn prim_forest_weight(vertices: usize, edges: &[(usize, usize, f64)]) -> (usize, f64) {
    let mut w = vec![vec![0.0f64; vertices]; vertices];
    for &(i, j, x) in edges {
        w[i][j] = x;
        w[j][i] = x;
    }
    let mut inside = vec![false; vertices];
    let (mut count, mut total) = (0, 0.0);
    for start in 0..vertices {
        if inside[start] {
            continue;
        }
        inside[start] = true;
        let mut best: Vec<f64> = w[start].clone();
        loop {
            let next = (0..vertices)
                .filter(|&v| !inside[v] && best[v] > 0.0)
                .max_by(|&a, &b| best[a].total_cmp(&best[b]));
            let Some(v) = next else { break };
            inside[v] = true;
            count += 1;
            total += best[v];
            for u in 0..vertices {
                if !inside[u] && w[v][u] > best[u] {
                    best[u] = w[v][u];
                }
            }
        }
    }
    (count, total)
}

// ---------------------------------------------------------------- statistics

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson(&ranks(a), &ranks(b))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

// ---------------------------------------------------------------- fixtures

pub const RECOVERY_NOISE: f64 = 0.05;
pub const RECOVERY_NODES: usize = 200;
pub const RECOVERY_TRIALS: u64 = 20;

pub fn recovery_specs() -> [PlantSpec; 4] {
    [
        PlantSpec::Clique { size: 30 },
        PlantSpec::Star { spokes: 50 },
        PlantSpec::Biclique { left: 8, right: 12 },
        PlantSpec::Starclique { left: 10, right: 30 },
    ]
}

/// Node Jaccard of the first accepted structure of the planted kind (0 if
/// there is none) on a single planted structure in ER noise.
pub fn recovery_trial(spec: PlantSpec, seed: u64) -> f64 {
    let (g, truth) = plant(RECOVERY_NODES, RECOVERY_NOISE, &[spec], seed, false).unwrap();
    let s = summarize(&g, &SummarizerConfig::default()).unwrap();
    s.model
        .structures
        .iter()
        .find(|x| x.kind() == spec.kind())
        .map_or(0.0, |x| jaccard(&x.nodes(), &truth[0].nodes()))
}

/// A dense structure of `kind` with node slots of the given sizes over
/// nodes `first..`: full cliques, stars without spoke edges, full bicliques
/// and starcliques with a full core.
pub fn dense_structure(kind: StructureKind, first: NodeId, a: usize, b: usize) -> Structure {
    let run = |from: NodeId, k: usize| (from..from + k as NodeId).collect::<Vec<_>>();
    let p = |k: usize| pairs(k as u64);
    match kind {
        StructureKind::Clique => Structure::Clique {
            nodes: run(first, a),
            edges: p(a),
        },
        StructureKind::Star => Structure::Star {
            hub: first,
            spokes: run(first + 1, a),
            spoke_edges: 0,
        },
        StructureKind::Biclique | StructureKind::Starclique => {
            let body = TwoSided {
                left: run(first, a),
                right: run(first + a as NodeId, b),
                left_edges: if kind == StructureKind::Starclique { p(a) } else { 0 },
                right_edges: 0,
                cross_edges: (a * b) as u64,
            };
            if kind == StructureKind::Biclique {
                Structure::Biclique(body)
            } else {
                Structure::Starclique(body)
            }
        }
    }
}

/// A sequence of models drifting away from a base model: every step grows
/// each structure by one to three nodes per slot and turns one more
/// structure into a different kind.
pub fn drift_models(steps: usize, seed: u64) -> Vec<Model> {
    let mut rng = rng(seed);
    let count = 2 * steps;
    let block = 200;
    let mut kinds: Vec<StructureKind> = (0..count).map(|_| random_kind(&mut rng, &StructureKind::ALL)).collect();
    let mut sizes: Vec<(usize, usize)> = (0..count).map(|_| (rng.gen_range(8..20), rng.gen_range(8..30))).collect();
    let mut out = Vec::with_capacity(steps);
    for t in 0..steps {
        if t > 0 {
            for s in sizes.iter_mut() {
                s.0 += rng.gen_range(1..=3);
                s.1 += rng.gen_range(1..=3);
            }
            let slot = (t - 1) % count;
            let others: Vec<StructureKind> = StructureKind::ALL.iter().copied().filter(|&k| k != kinds[slot]).collect();
            kinds[slot] = random_kind(&mut rng, &others);
        }
        let structures = kinds
            .iter()
            .zip(&sizes)
            .enumerate()
            .map(|(i, (&k, &(a, b)))| dense_structure(k, (i * block) as NodeId, a, b))
            .collect();
        out.push(Model {
            n: (count * block) as u64,
            m: (count * block * 4 + 100 * t) as u64,
            structures,
        });
    }
    out
}

pub struct GridStats {
    pub graphs: usize,
    pub same_mean: f64,
    pub diff_mean: f64,
    /// Spearman of NMD against the number of structures left unmatched.
    pub rho_unmatched: f64,
    /// Spearman of NMD against the number of matchable structures.
    pub rho_matchable: f64,
    /// Spearman of NMD against the number of kinds present in one
    /// composition only.
    pub rho_kinds: f64,
    pub seconds: f64,
}

pub const GRID_SIZES: [usize; 3] = [1000, 3000, 10000];
pub const GRID_BUDGET: usize = 20;
pub const GRID_NOISE_DEGREE: f64 = 2.0;
pub const GRID_SEED: u64 = 1;

pub fn grid_stats() -> GridStats {
    let t = Instant::now();
    let grid: Vec<GridGraph> = composition_grid(&GRID_SIZES, GRID_BUDGET, GRID_NOISE_DEGREE, GRID_SEED).unwrap();
    let graphs: Vec<Graph> = grid.iter().map(|g| g.graph.clone().unwrap()).collect();
    let names = (0..grid.len()).map(|i| format!("g{i}")).collect();
    let mat = graphsim::similarity::pairwise_matrix(
        names,
        &graphs,
        &SummarizerConfig::default(),
        Default::default(),
        None,
    )
    .unwrap();
    let (mut same, mut diff) = (Vec::new(), Vec::new());
    let (mut values, mut unmatched, mut matchable, mut kinds) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for p in &mat.pairs {
        let (a, b) = (&grid[p.i], &grid[p.j]);
        let v = p.nmd.map_or(0.0, |r| r.value);
        if a.composition == b.composition {
            same.push(v);
        } else {
            diff.push(v);
        }
        let shared: usize = a
            .composition
            .iter()
            .filter(|k| b.composition.contains(k))
            .map(|_| a.per_kind.min(b.per_kind))
            .sum();
        let only = a.composition.iter().filter(|k| !b.composition.contains(k)).count()
            + b.composition.iter().filter(|k| !a.composition.contains(k)).count();
        values.push(v);
        matchable.push(shared as f64);
        unmatched.push((a.planted.len() + b.planted.len() - 2 * shared) as f64);
        kinds.push(only as f64);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    GridStats {
        graphs: grid.len(),
        same_mean: mean(&same),
        diff_mean: mean(&diff),
        rho_unmatched: spearman(&values, &unmatched),
        rho_matchable: spearman(&values, &matchable),
        rho_kinds: spearman(&values, &kinds),
        seconds: t.elapsed().as_secs_f64(),
    }
}

pub const SCALING_EDGES: [usize; 4] = [10_000, 30_000, 100_000, 300_000];

/// ER background with one block of planted structures per 10^4 edges, at
/// average degree 8. Returns `(edges, best-of-two summarize seconds)`.
pub fn scaling_point(m: usize) -> (usize, f64) {
    let n = m / 4;
    let blocks = m / 10_000;
    let block = [
        PlantSpec::Clique { size: 20 },
        PlantSpec::Star { spokes: 50 },
        PlantSpec::Biclique { left: 8, right: 12 },
        PlantSpec::Starclique { left: 10, right: 30 },
    ];
    let specs: Vec<PlantSpec> = block.iter().cycle().take(4 * blocks).copied().collect();
    // clique 190, star 50, biclique 96, starclique 45 + 300
    let planted = blocks * 681;
    let p = (m - planted) as f64 / (n as f64 * (n as f64 - 1.0) / 2.0);
    let (g, _) = plant(n, p, &specs, 7, false).unwrap();
    let cfg = SummarizerConfig::default();
    let mut best = f64::INFINITY;
    for _ in 0..2 {
        let t = Instant::now();
        summarize(&g, &cfg).unwrap();
        best = best.min(t.elapsed().as_secs_f64());
    }
    (g.edge_count(), best)
}
