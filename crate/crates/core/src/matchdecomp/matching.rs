use std::collections::VecDeque;

use crate::graph::SimpleGraph;
use crate::oracle::EdgeKey;

use super::MatchError;

const NONE: usize = usize::MAX;

/// A set of vertex-disjoint edges on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    mate: Vec<usize>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Matching { mate: vec![NONE; n] }
    }

    /// Fails if two edges share a vertex or an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: &[EdgeKey]) -> Result<Self, MatchError> {
        let mut mate = vec![NONE; n];
        for e in edges {
            let (u, v) = (e.u() as usize, e.v() as usize);
            if v >= n {
                return Err(MatchError::Input(format!("edge ({u},{v}) outside 0..{n}")));
            }
            if mate[u] != NONE || mate[v] != NONE {
                return Err(MatchError::NotAMatching(format!("edges share a vertex at ({u},{v})")));
            }
            mate[u] = v;
            mate[v] = u;
        }
        Ok(Matching { mate })
    }

    pub fn n(&self) -> usize {
        self.mate.len()
    }

    pub fn mate(&self, v: u32) -> Option<u32> {
        match self.mate[v as usize] {
            NONE => None,
            w => Some(w as u32),
        }
    }

    pub fn is_covered(&self, v: u32) -> bool {
        self.mate[v as usize] != NONE
    }

    pub fn size(&self) -> usize {
        self.mate.iter().filter(|&&w| w != NONE).count() / 2
    }

    pub fn is_perfect(&self) -> bool {
        self.mate.iter().all(|&w| w != NONE)
    }

    /// Edges with `u < v`, sorted.
    pub fn edges(&self) -> Vec<EdgeKey> {
        (0..self.n())
            .filter(|&u| self.mate[u] != NONE && u < self.mate[u])
            .map(|u| EdgeKey::ordered(u as u32, self.mate[u] as u32))
            .collect()
    }

    /// V_M, sorted.
    pub fn covered(&self) -> Vec<u32> {
        (0..self.n() as u32).filter(|&v| self.is_covered(v)).collect()
    }

    pub fn uncovered(&self) -> Vec<u32> {
        (0..self.n() as u32).filter(|&v| !self.is_covered(v)).collect()
    }

    pub fn is_subgraph_of(&self, g: &SimpleGraph) -> bool {
        g.n() == self.n() && self.edges().iter().all(|e| g.has_edge(e.u(), e.v()))
    }
}

/// Edmonds' blossom search, one root at a time.
struct Blossom<'a> {
    g: &'a SimpleGraph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(g: &'a SimpleGraph, mate: Vec<usize>) -> Self {
        let n = g.n();
        Blossom {
            g,
            mate,
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.g.n()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Exposed endpoint of an augmenting path from `root`, if any.
    fn search(&mut self, root: usize) -> Option<usize> {
        let n = self.g.n();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in self.g.neighbors(v as u32) {
                let to = to as usize;
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }
}

/// Maximum-cardinality matching. The result is re-checked for augmenting
/// paths before it is returned.
pub fn maximum_matching(g: &SimpleGraph) -> Matching {
    let n = g.n();
    let mut mate = vec![NONE; n];
    for u in 0..n {
        if mate[u] == NONE {
            if let Some(&v) = g.neighbors(u as u32).iter().find(|&&v| mate[v as usize] == NONE) {
                mate[u] = v as usize;
                mate[v as usize] = u;
            }
        }
    }
    let mut b = Blossom::new(g, mate);
    for root in 0..n {
        if b.mate[root] == NONE {
            if let Some(end) = b.search(root) {
                b.augment(end);
            }
        }
    }
    let m = Matching { mate: b.mate };
    assert!(!has_augmenting_path(g, &m), "blossom search left an augmenting path");
    m
}

/// Berge's criterion: `m` is maximum iff this returns false.
pub fn has_augmenting_path(g: &SimpleGraph, m: &Matching) -> bool {
    let mut b = Blossom::new(g, m.mate.clone());
    (0..g.n()).any(|root| m.mate[root] == NONE && b.search(root).is_some())
}

pub fn matching_number(g: &SimpleGraph) -> usize {
    maximum_matching(g).size()
}
