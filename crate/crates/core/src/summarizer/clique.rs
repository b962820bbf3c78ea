//! Maximum clique of an induced subgraph.
//!
//! Exact branch and bound with greedy-colouring bounds (vertices taken in
//! degeneracy order) up to [`EXACT_LIMIT`] nodes; above that, a greedy
//! search seeded from every vertex of high enough core number.

use crate::graph::{Graph, NodeId};

pub const EXACT_LIMIT: usize = 200;
/// Branch-and-bound node budget; the best clique found so far is returned
/// once it is spent.
const SEARCH_BUDGET: usize = 2_000_000;

/// Induced subgraph on `nodes` with local indices.
pub(crate) struct Local {
    pub nodes: Vec<NodeId>,
    pub adj: Vec<Vec<usize>>,
}

impl Local {
    pub fn induced(g: &Graph, nodes: &[NodeId]) -> Local {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        // `nodes` is sorted, so local indices come out sorted as well
        let adj = nodes
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|w| nodes.binary_search(w).ok())
                    .collect()
            })
            .collect();
        Local { nodes, adj }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Degeneracy (smallest-last) ordering and the core number of each vertex.
    fn degeneracy_order(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let mut deg: Vec<usize> = self.adj.iter().map(|a| a.len()).collect();
        let maxd = deg.iter().copied().max().unwrap_or(0);
        let mut buckets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); maxd + 1];
        for (v, &d) in deg.iter().enumerate() {
            buckets[d].insert(v);
        }
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut core = vec![0; n];
        let mut k = 0;
        let mut low = 0;
        for _ in 0..n {
            while buckets[low].is_empty() {
                low += 1;
            }
            let d = low;
            let v = *buckets[d].iter().next().unwrap();
            buckets[d].remove(&v);
            k = k.max(d);
            core[v] = k;
            done[v] = true;
            order.push(v);
            for &w in &self.adj[v] {
                if !done[w] {
                    buckets[deg[w]].remove(&w);
                    deg[w] -= 1;
                    buckets[deg[w]].insert(w);
                    low = low.min(deg[w]);
                }
            }
        }
        (order, core)
    }
}

/// Maximum clique among `nodes` in `g`, sorted. Exact up to
/// [`EXACT_LIMIT`] nodes.
pub fn max_clique(g: &Graph, nodes: &[NodeId]) -> Vec<NodeId> {
    let local = Local::induced(g, nodes);
    if local.len() == 0 {
        return Vec::new();
    }
    let best = if local.len() <= EXACT_LIMIT {
        exact(&local)
    } else {
        greedy(&local)
    };
    let mut out: Vec<NodeId> = best.into_iter().map(|i| local.nodes[i]).collect();
    out.sort_unstable();
    out
}

type Bits = Vec<u64>;

fn bit_has(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn exact(local: &Local) -> Vec<usize> {
    let n = local.len();
    let words = n.div_ceil(64);
    let (order, _) = local.degeneracy_order();
    // relabel so that later positions come later in the smallest-last order
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (i, &v) in order.iter().rev().enumerate() {
            r[v] = i;
        }
        r
    };
    let mut adj: Vec<Bits> = vec![vec![0; words]; n];
    for v in 0..n {
        for &w in &local.adj[v] {
            let (a, b) = (rank[v], rank[w]);
            adj[a][b / 64] |= 1 << (b % 64);
        }
    }
    let mut search = Search {
        adj: &adj,
        // the greedy clique is the initial bound
        best: greedy(local).into_iter().map(|v| rank[v]).collect(),
        current: Vec::new(),
        budget: SEARCH_BUDGET,
    };
    let all: Vec<usize> = (0..n).collect();
    search.expand(all);
    let back: Vec<usize> = {
        let mut b = vec![0; n];
        for v in 0..n {
            b[rank[v]] = v;
        }
        b
    };
    search.best.into_iter().map(|i| back[i]).collect()
}

struct Search<'a> {
    adj: &'a [Bits],
    best: Vec<usize>,
    current: Vec<usize>,
    budget: usize,
}

impl Search<'_> {
    /// Greedy colouring of `cands`; returns vertices in colour order with
    /// their colour numbers (non-decreasing).
    fn colour(&self, cands: &[usize]) -> Vec<(usize, usize)> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cands {
            let slot = classes
                .iter()
                .position(|c| c.iter().all(|&u| !bit_has(&self.adj[v], u)));
            match slot {
                Some(i) => classes[i].push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut out = Vec::with_capacity(cands.len());
        for (k, c) in classes.into_iter().enumerate() {
            for v in c {
                out.push((v, k + 1));
            }
        }
        out
    }

    fn expand(&mut self, cands: Vec<usize>) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        let coloured = self.colour(&cands);
        let mut remaining: Vec<usize> = cands;
        for &(v, c) in coloured.iter().rev() {
            if self.current.len() + c <= self.best.len() {
                return;
            }
            self.current.push(v);
            let next: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&u| u != v && bit_has(&self.adj[v], u))
                .collect();
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            remaining.retain(|&u| u != v);
        }
    }
}

fn greedy(local: &Local) -> Vec<usize> {
    let (order, core) = local.degeneracy_order();
    let n = local.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // scratch, reset after every start vertex
    let mut in_cands = vec![false; n];
    let mut near = vec![false; n];
    let mut links = vec![0usize; n];
    let mut best: Vec<usize> = Vec::new();
    for &v in order.iter().rev() {
        if core[v] < best.len() {
            continue;
        }
        // grow a clique among v's later neighbours, most-connected first
        let mut cands: Vec<usize> = local.adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        for &w in &cands {
            in_cands[w] = true;
        }
        for &w in &cands {
            links[w] = local.adj[w].iter().filter(|&&u| in_cands[u]).count();
        }
        let mut clique = vec![v];
        while !cands.is_empty() {
            let pick = *cands
                .iter()
                .max_by_key(|&&u| (links[u], std::cmp::Reverse(u)))
                .unwrap();
            clique.push(pick);
            for &u in &local.adj[pick] {
                near[u] = true;
            }
            let mut dropped = Vec::new();
            cands.retain(|&w| {
                let keep = w != pick && near[w];
                if !keep {
                    dropped.push(w);
                }
                keep
            });
            for &u in &local.adj[pick] {
                near[u] = false;
            }
            for &w in &dropped {
                in_cands[w] = false;
            }
            for &w in &dropped {
                for &u in &local.adj[w] {
                    if in_cands[u] {
                        links[u] -= 1;
                    }
                }
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}
