//! Type-respecting structure matching.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{jaccard, NodeAlignment, NodeId};
use crate::model::Structure;

/// Pairs of structure indices `(index in S1, index in S2)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks index bounds, equal kinds and that no structure is used twice.
    pub fn validate(&self, s1: &[Structure], s2: &[Structure]) -> Result<()> {
        let (mut used1, mut used2) = (HashSet::new(), HashSet::new());
        for &(a, b) in &self.pairs {
            if a >= s1.len() || b >= s2.len() {
                return Err(Error::Invariant(format!("pair ({a}, {b}) is out of range")));
            }
            if s1[a].kind() != s2[b].kind() {
                return Err(Error::Invariant(format!(
                    "pair ({a}, {b}) matches a {} with a {}",
                    s1[a].kind(),
                    s2[b].kind()
                )));
            }
            if !used1.insert(a) || !used2.insert(b) {
                return Err(Error::Invariant(format!("pair ({a}, {b}) reuses a structure")));
            }
        }
        Ok(())
    }

    /// True when no kind has an unmatched structure on both sides.
    pub fn is_maximal(&self, s1: &[Structure], s2: &[Structure]) -> bool {
        let (free1, free2) = self.unmatched_census(s1, s2);
        free1.iter().zip(&free2).all(|(&a, &b)| a == 0 || b == 0)
    }

    fn unmatched_census(&self, s1: &[Structure], s2: &[Structure]) -> ([usize; 4], [usize; 4]) {
        let used1: HashSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        let used2: HashSet<usize> = self.pairs.iter().map(|p| p.1).collect();
        let count = |s: &[Structure], used: &HashSet<usize>| {
            crate::model::census(
                s.iter()
                    .enumerate()
                    .filter(|(i, _)| !used.contains(i))
                    .map(|(_, x)| x.kind()),
            )
        };
        (count(s1, &used1), count(s2, &used2))
    }

    /// Indices of `S1` (`side == 1`) or `S2` structures not in any pair, ascending.
    pub fn unmatched(&self, side: u8, len: usize) -> Vec<usize> {
        let used: HashSet<usize> = self
            .pairs
            .iter()
            .map(|p| if side == 1 { p.0 } else { p.1 })
            .collect();
        (0..len).filter(|i| !used.contains(i)).collect()
    }
}

/// Weighted edges `(i, j, Jaccard)` with `i < j` between structures whose
/// node sets overlap, in ascending `(i, j)` order.
pub fn overlap_edges(structures: &[Structure]) -> Vec<(usize, usize, f64)> {
    let sets: Vec<Vec<NodeId>> = structures.iter().map(|s| s.nodes()).collect();
    let mut out = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let w = jaccard(&sets[i], &sets[j]);
            if w > 0.0 {
                out.push((i, j, w));
            }
        }
    }
    out
}

fn mapped_jaccard(a: &[NodeId], b: &[NodeId], alignment: &NodeAlignment) -> f64 {
    // nodes without a counterpart stay in the union but can never match
    let mut mapped: Vec<NodeId> = a.iter().filter_map(|&v| alignment.get(v)).collect();
    mapped.sort_unstable();
    let unmapped = a.len() - mapped.len();
    let inter = crate::graph::intersection_size(&mapped, b);
    let union = mapped.len() + unmapped + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard similarity of `s1` mapped through `alignment` and `s2`. Cliques
/// use their node sets; the other kinds average the hub/spoke or left/right
/// slots. Structures of different kinds score 0.
pub fn aligned_jaccard(s1: &Structure, s2: &Structure, alignment: &NodeAlignment) -> f64 {
    if s1.kind() != s2.kind() {
        return 0.0;
    }
    let (a, b) = (s1.node_slots(), s2.node_slots());
    let total: f64 = a.iter().zip(&b).map(|(x, y)| mapped_jaccard(x, y, alignment)).sum();
    total / a.len() as f64
}

/// Product-graph vertex: a same-kind pair `(index in S1, index in S2)`.
type Pair = (usize, usize);

/// One product-graph edge from an edge of each overlap graph.
fn product_edges(e1: (usize, usize), e2: (usize, usize)) -> [(Pair, Pair); 2] {
    let ((a, b), (c, d)) = (e1, e2);
    let order = |u: Pair, v: Pair| if u <= v { (u, v) } else { (v, u) };
    [order((a, c), (b, d)), order((a, d), (b, c))]
}

/// Entry of the lazy max-heap over index pairs of the two sorted overlap
/// edge lists.
#[derive(PartialEq)]
struct Cell {
    weight: f64,
    i: usize,
    j: usize,
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| (Reverse(self.i), Reverse(self.j)).cmp(&(Reverse(other.i), Reverse(other.j))))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct State<'a> {
    s1: &'a [Structure],
    s2: &'a [Structure],
    taken1: Vec<bool>,
    taken2: Vec<bool>,
    chosen: HashSet<Pair>,
    pairs: Vec<Pair>,
    /// Unmatched structures per kind on each side.
    free1: [usize; 4],
    free2: [usize; 4],
}

impl<'a> State<'a> {
    fn new(s1: &'a [Structure], s2: &'a [Structure]) -> Self {
        State {
            s1,
            s2,
            taken1: vec![false; s1.len()],
            taken2: vec![false; s2.len()],
            chosen: HashSet::new(),
            pairs: Vec::new(),
            free1: crate::model::census(s1.iter().map(|s| s.kind())),
            free2: crate::model::census(s2.iter().map(|s| s.kind())),
        }
    }

    /// A pair is still a product-graph vertex if it is in the matching or
    /// neither of its structures is.
    fn alive(&self, (a, b): Pair) -> bool {
        self.s1[a].kind() == self.s2[b].kind() && (self.chosen.contains(&(a, b)) || (!self.taken1[a] && !self.taken2[b]))
    }

    fn add(&mut self, (a, b): Pair) {
        if self.chosen.insert((a, b)) {
            self.taken1[a] = true;
            self.taken2[b] = true;
            let k = self.s1[a].kind().index();
            self.free1[k] -= 1;
            self.free2[k] -= 1;
            self.pairs.push((a, b));
        }
    }

    fn matchable_left(&self) -> bool {
        self.free1.iter().zip(&self.free2).any(|(&a, &b)| a > 0 && b > 0)
    }

    fn take_edge(&mut self, u: Pair, v: Pair) {
        if !self.alive(u) || !self.alive(v) {
            return;
        }
        if self.chosen.contains(&u) && self.chosen.contains(&v) {
            return;
        }
        self.add(u);
        self.add(v);
    }

    /// Repeatedly selects the heaviest remaining product-graph edge. Edges
    /// are enumerated lazily in descending weight; equal weights are taken in
    /// lexicographic order of their endpoint pairs.
    fn product_phase(&mut self, f1: &[(usize, usize, f64)], f2: &[(usize, usize, f64)]) {
        if f1.is_empty() || f2.is_empty() {
            return;
        }
        let sort = |f: &[(usize, usize, f64)]| {
            let mut f = f.to_vec();
            f.sort_by(|x, y| y.2.total_cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
            f
        };
        let (f1, f2) = (sort(f1), sort(f2));
        let mut heap = BinaryHeap::new();
        let mut seen = HashSet::new();
        let push = |heap: &mut BinaryHeap<Cell>, seen: &mut HashSet<(usize, usize)>, i: usize, j: usize| {
            if i < f1.len() && j < f2.len() && seen.insert((i, j)) {
                heap.push(Cell {
                    weight: f1[i].2 * f2[j].2,
                    i,
                    j,
                });
            }
        };
        push(&mut heap, &mut seen, 0, 0);
        while self.matchable_left() {
            let Some(top) = heap.pop() else { break };
            let weight = top.weight;
            let mut pending = vec![top];
            let mut edges = Vec::new();
            while let Some(c) = pending.pop() {
                push(&mut heap, &mut seen, c.i + 1, c.j);
                push(&mut heap, &mut seen, c.i, c.j + 1);
                edges.extend(product_edges((f1[c.i].0, f1[c.i].1), (f2[c.j].0, f2[c.j].1)));
                // successors tie with their parent when a weight is 1 or repeats
                while heap.peek().is_some_and(|x| x.weight == weight) {
                    pending.push(heap.pop().unwrap());
                }
            }
            edges.sort_unstable();
            edges.dedup();
            for (u, v) in edges {
                self.take_edge(u, v);
            }
        }
    }

    /// Pairs the remaining structures of equal kind, largest first on both
    /// sides (ties by lowest index).
    fn greedy_phase(&mut self) {
        let order = |s: &[Structure], taken: &[bool]| {
            let mut idx: Vec<usize> = (0..s.len()).filter(|&i| !taken[i]).collect();
            idx.sort_by_key(|&i| (Reverse(s[i].size_key()), i));
            idx
        };
        let left = order(self.s1, &self.taken1);
        let right = order(self.s2, &self.taken2);
        for a in left {
            let kind = self.s1[a].kind();
            if let Some(&b) = right.iter().find(|&&b| !self.taken2[b] && self.s2[b].kind() == kind) {
                self.add((a, b));
            }
        }
    }

    /// Takes same-kind pairs in descending aligned Jaccard; ties go to the
    /// larger pair, then to the lowest indices.
    fn aligned_phase(&mut self, alignment: &NodeAlignment) {
        let mut scored = Vec::new();
        for (a, x) in self.s1.iter().enumerate() {
            for (b, y) in self.s2.iter().enumerate() {
                if x.kind() == y.kind() {
                    let (kx, ky) = (x.size_key(), y.size_key());
                    let size = (kx.0 + ky.0, kx.1 + ky.1);
                    scored.push((aligned_jaccard(x, y, alignment), size, a, b));
                }
            }
        }
        scored.sort_by(|p, q| q.0.total_cmp(&p.0).then(q.1.cmp(&p.1)).then((p.2, p.3).cmp(&(q.2, q.3))));
        for (_, _, a, b) in scored {
            if !self.taken1[a] && !self.taken2[b] {
                self.add((a, b));
            }
        }
    }
}

/// Options for [`maximal_greedy`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Skip the product-graph phase when no alignment is given.
    pub no_overlap: bool,
}

/// Maximal type-respecting matching of `s1` and `s2`.
///
/// With an empty alignment, heavy edges of the product of the two node
/// overlap graphs are selected first and the rest is paired by size.
/// Otherwise pairs are chosen by aligned Jaccard similarity.
pub fn maximal_greedy(s1: &[Structure], s2: &[Structure], alignment: &NodeAlignment, opts: MatchOptions) -> Matching {
    let mut st = State::new(s1, s2);
    if alignment.is_empty() {
        if !opts.no_overlap {
            st.product_phase(&overlap_edges(s1), &overlap_edges(s2));
        }
        st.greedy_phase();
    } else {
        st.aligned_phase(alignment);
    }
    Matching { pairs: st.pairs }
}
