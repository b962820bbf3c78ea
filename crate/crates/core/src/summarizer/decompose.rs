//! Hub-extraction decomposition into small-diameter seed components.
//!
//! Repeatedly takes the node of highest residual degree in the globally
//! largest connected component, emits it together with its residual
//! neighbours, and deletes its edges. Components are split incrementally:
//! after a hub is removed, breadth-first searches from its former neighbours
//! run in lockstep, and every search that exhausts its piece before the others
//! finish peels that piece off as a new component. Only the small pieces are
//! ever traversed in full.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::graph::{Graph, NodeId};

const DEAD: u32 = u32::MAX;

struct Component {
    size: usize,
    /// Sorted; may contain nodes that have since left the component.
    nodes: Vec<NodeId>,
    cursor: usize,
    /// Lazy max-heap of (residual degree, lowest index first).
    by_degree: BinaryHeap<(usize, Reverse<NodeId>)>,
}

struct State<'g> {
    g: &'g Graph,
    comp_of: Vec<u32>,
    removed: Vec<bool>,
    degree: Vec<usize>,
    comps: Vec<Component>,
    /// Lazy max-heap of (size, lowest node first, id).
    order: BinaryHeap<(usize, Reverse<NodeId>, u32)>,
    /// Search group per node during a split, valid where `stamp == epoch`.
    owner: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph) -> State<'g> {
        let n = g.node_count();
        let mut st = State {
            g,
            comp_of: vec![DEAD; n],
            removed: vec![false; n],
            degree: (0..n as NodeId).map(|v| g.degree(v)).collect(),
            comps: Vec::new(),
            order: BinaryHeap::new(),
            owner: vec![0; n],
            stamp: vec![0; n],
            epoch: 0,
        };
        let mut queue = VecDeque::new();
        for s in 0..n as NodeId {
            if st.comp_of[s as usize] != DEAD || g.degree(s) == 0 {
                continue;
            }
            let id = st.comps.len() as u32;
            st.comp_of[s as usize] = id;
            queue.push_back(s);
            let mut members = vec![s];
            while let Some(u) = queue.pop_front() {
                for &w in g.neighbors(u) {
                    if st.comp_of[w as usize] == DEAD {
                        st.comp_of[w as usize] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            st.add_component(id, members);
        }
        st
    }

    fn add_component(&mut self, id: u32, mut members: Vec<NodeId>) {
        members.sort_unstable();
        let by_degree = members
            .iter()
            .map(|&v| (self.degree[v as usize], Reverse(v)))
            .collect();
        let comp = Component {
            size: members.len(),
            nodes: members,
            cursor: 0,
            by_degree,
        };
        if id as usize == self.comps.len() {
            self.comps.push(comp);
        } else {
            self.comps[id as usize] = comp;
        }
        self.push_order(id);
    }

    fn min_node(&mut self, id: u32) -> NodeId {
        let c = &mut self.comps[id as usize];
        while self.comp_of[c.nodes[c.cursor] as usize] != id {
            c.cursor += 1;
        }
        c.nodes[c.cursor]
    }

    fn push_order(&mut self, id: u32) {
        if self.comps[id as usize].size >= 2 {
            let size = self.comps[id as usize].size;
            let low = self.min_node(id);
            self.order.push((size, Reverse(low), id));
        }
    }

    /// Largest live component, if it has at least `threshold` nodes.
    fn largest(&mut self, threshold: usize) -> Option<u32> {
        while let Some(&(size, Reverse(low), id)) = self.order.peek() {
            if self.comps[id as usize].size != size || size < 2 || self.min_node(id) != low {
                self.order.pop();
                continue;
            }
            return if size >= threshold { Some(id) } else { None };
        }
        None
    }

    fn hub_of(&mut self, id: u32) -> NodeId {
        let c = &mut self.comps[id as usize];
        loop {
            let (deg, Reverse(v)) = *c.by_degree.peek().expect("component has a live node");
            if self.comp_of[v as usize] == id && self.degree[v as usize] == deg {
                return v;
            }
            c.by_degree.pop();
        }
    }

    fn residual_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        self.g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| !self.removed[w as usize])
            .collect()
    }

    /// Removes all edges of `v` and splits its component accordingly.
    fn burn(&mut self, v: NodeId, neighbors: &[NodeId]) {
        let id = self.comp_of[v as usize];
        self.removed[v as usize] = true;
        self.comp_of[v as usize] = DEAD;
        self.degree[v as usize] = 0;
        for &w in neighbors {
            self.degree[w as usize] -= 1;
            let deg = self.degree[w as usize];
            self.comps[id as usize].by_degree.push((deg, Reverse(w)));
        }
        self.comps[id as usize].size -= 1;

        let pieces = self.split_off(neighbors);
        for members in pieces {
            let new_id = self.comps.len() as u32;
            self.comps[id as usize].size -= members.len();
            for &u in &members {
                self.comp_of[u as usize] = new_id;
            }
            self.comps.push(Component {
                size: 0,
                nodes: Vec::new(),
                cursor: 0,
                by_degree: BinaryHeap::new(),
            });
            self.add_component(new_id, members);
        }
        self.push_order(id);
    }

    /// Lockstep searches from `starts`; returns the node sets of all pieces
    /// except the one still being explored when the others ran out (or the
    /// largest, if every search finished).
    fn split_off(&mut self, starts: &[NodeId]) -> Vec<Vec<NodeId>> {
        let k = starts.len();
        if k <= 1 {
            return Vec::new();
        }
        self.epoch += 1;
        let epoch = self.epoch;
        let mut parent: Vec<usize> = (0..k).collect();
        let mut queues: Vec<VecDeque<NodeId>> = Vec::with_capacity(k);
        let mut visited: Vec<Vec<NodeId>> = Vec::with_capacity(k);
        for (i, &s) in starts.iter().enumerate() {
            self.owner[s as usize] = i;
            self.stamp[s as usize] = epoch;
            queues.push(VecDeque::from([s]));
            visited.push(vec![s]);
        }
        let mut roots: Vec<usize> = (0..k).collect();
        loop {
            roots.retain(|&r| parent[r] == r);
            let live = roots.iter().filter(|&&r| !queues[r].is_empty()).count();
            if live <= 1 {
                break;
            }
            for idx in 0..roots.len() {
                let mut r = roots[idx];
                if parent[r] != r || queues[r].is_empty() {
                    continue;
                }
                let u = queues[r].pop_front().unwrap();
                for &w in self.g.neighbors(u) {
                    if self.removed[w as usize] {
                        continue;
                    }
                    let seen = self.stamp[w as usize] == epoch;
                    match seen.then(|| self.owner[w as usize]) {
                        None => {
                            self.owner[w as usize] = r;
                            self.stamp[w as usize] = epoch;
                            queues[r].push_back(w);
                            visited[r].push(w);
                        }
                        Some(j) => {
                            let o = find(&mut parent, j);
                            if o != r {
                                // merge the smaller group into the larger one
                                let (big, small) = if visited[o].len() >= visited[r].len() { (o, r) } else { (r, o) };
                                parent[small] = big;
                                let q = std::mem::take(&mut queues[small]);
                                queues[big].extend(q);
                                let v = std::mem::take(&mut visited[small]);
                                visited[big].extend(v);
                                r = big;
                            }
                        }
                    }
                }
            }
        }

        let keep = roots
            .iter()
            .copied()
            .find(|&r| !queues[r].is_empty())
            .or_else(|| roots.iter().copied().max_by_key(|&r| (visited[r].len(), Reverse(r))))
            .unwrap_or(usize::MAX);
        roots
            .into_iter()
            .filter(|&r| r != keep)
            .map(|r| std::mem::take(&mut visited[r]))
            .collect()
    }
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Decomposes `g` into seed components, in extraction order. Each component
/// is a hub followed by its residual neighbours in ascending order.
pub fn decompose(g: &Graph, threshold: usize) -> Vec<Vec<NodeId>> {
    let threshold = threshold.max(2);
    let mut st = State::new(g);
    let mut out = Vec::new();
    while let Some(id) = st.largest(threshold) {
        let hub = st.hub_of(id);
        let neighbors = st.residual_neighbors(hub);
        let mut seed = Vec::with_capacity(neighbors.len() + 1);
        seed.push(hub);
        seed.extend(neighbors.iter().copied());
        out.push(seed);
        st.burn(hub, &neighbors);
    }
    out
}

/// Straightforward reference implementation that recomputes connected
/// components from scratch after every extraction.
pub fn decompose_naive(g: &Graph, threshold: usize) -> Vec<Vec<NodeId>> {
    let threshold = threshold.max(2);
    let n = g.node_count();
    let mut removed = vec![false; n];
    let mut out = Vec::new();
    loop {
        let mut comp = vec![usize::MAX; n];
        let mut best: Option<(usize, Reverse<NodeId>, Vec<NodeId>)> = None;
        for s in 0..n as NodeId {
            if removed[s as usize] || comp[s as usize] != usize::MAX {
                continue;
            }
            let mut members = vec![s];
            comp[s as usize] = s as usize;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for &w in g.neighbors(u) {
                    if !removed[w as usize] && comp[w as usize] == usize::MAX {
                        comp[w as usize] = s as usize;
                        members.push(w);
                    }
                }
            }
            let key = (members.len(), Reverse(s));
            if best.as_ref().is_none_or(|b| key > (b.0, b.1)) {
                best = Some((key.0, key.1, members));
            }
        }
        let Some((size, _, members)) = best else { break };
        if size < threshold || size < 2 {
            break;
        }
        let residual = |v: NodeId| g.neighbors(v).iter().filter(|&&w| !removed[w as usize]).count();
        let hub = members
            .iter()
            .copied()
            .max_by_key(|&v| (residual(v), Reverse(v)))
            .unwrap();
        let mut seed = vec![hub];
        seed.extend(g.neighbors(hub).iter().copied().filter(|&w| !removed[w as usize]));
        removed[hub as usize] = true;
        out.push(seed);
    }
    out
}
