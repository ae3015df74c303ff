//! Exact maximum clique: branch and bound with a greedy-colouring bound.

use crate::graph::SimpleGraph;

#[derive(Clone, PartialEq, Eq, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }
}

struct Dense {
    adj: Vec<Bits>,
}

impl Dense {
    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Greedy sequential colouring of `p` in index order. Returns the
    /// vertices ordered by colour class with the colour of each.
    fn colour(&self, p: &Bits) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count());
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                uncoloured.clear(v);
                q.and_not_assign(&self.adj[v]);
                out.push((v, colour));
            }
        }
        out
    }

    fn colour_count(&self, p: &Bits) -> usize {
        self.colour(p).last().map_or(0, |&(_, c)| c)
    }

    fn omega(&self) -> usize {
        let mut p = Bits::new(self.n());
        for v in 0..self.n() {
            p.set(v);
        }
        let mut best = 0;
        self.expand(0, p, &mut best);
        best
    }

    fn expand(&self, size: usize, mut p: Bits, best: &mut usize) {
        let order = self.colour(&p);
        for &(v, c) in order.iter().rev() {
            if size + c <= *best {
                return;
            }
            let np = p.and(&self.adj[v]);
            if np.is_empty() {
                *best = (*best).max(size + 1);
            } else {
                self.expand(size + 1, np, best);
            }
            p.clear(v);
        }
    }

    /// First clique of size `target` in lexicographic order of sorted
    /// vertex lists.
    fn lex_first(&self, target: usize) -> Option<Vec<usize>> {
        let mut p = Bits::new(self.n());
        for v in 0..self.n() {
            p.set(v);
        }
        let mut chosen = Vec::with_capacity(target);
        if self.lex_search(&mut chosen, p, target) {
            Some(chosen)
        } else {
            None
        }
    }

    fn lex_search(&self, chosen: &mut Vec<usize>, p: Bits, target: usize) -> bool {
        if chosen.len() == target {
            return true;
        }
        if chosen.len() + self.colour_count(&p) < target {
            return false;
        }
        let mut rest = p.clone();
        for v in p.iter() {
            rest.clear(v);
            if chosen.len() + 1 + rest.count() < target {
                return false;
            }
            // candidates after v that are adjacent to v
            let np = rest.and(&self.adj[v]);
            chosen.push(v);
            if self.lex_search(chosen, np, target) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// Lexicographically smallest maximum clique, as a sorted vertex list.
/// Empty only for the empty graph.
pub fn max_clique(g: &SimpleGraph) -> Vec<u32> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    if g.edge_count() == 0 {
        return vec![0];
    }
    // A greedy clique gives a lower bound; vertices of lower degree cannot
    // lie in any maximum clique and are peeled off before the dense search.
    let lb = greedy_lower_bound(g);
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] + 1 < lb).collect();
    for &v in &stack {
        alive[v] = false;
    }
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v as u32) {
            let w = w as usize;
            if alive[w] {
                deg[w] -= 1;
                if deg[w] + 1 < lb {
                    alive[w] = false;
                    stack.push(w);
                }
            }
        }
    }
    let keep: Vec<u32> = (0..n as u32).filter(|&v| alive[v as usize]).collect();
    let sub = g.induced(&keep);
    let dense = Dense {
        adj: (0..sub.n())
            .map(|v| {
                let mut b = Bits::new(sub.n());
                for &w in sub.neighbors(v as u32) {
                    b.set(w as usize);
                }
                b
            })
            .collect(),
    };
    // omega on a degree-sorted copy is much faster; the lexicographic pass
    // then only has to hit the known target.
    let omega = degree_sorted(&sub).omega();
    let local = dense.lex_first(omega).expect("a clique of size omega exists");
    local.into_iter().map(|i| keep[i]).collect()
}

fn degree_sorted(g: &SimpleGraph) -> Dense {
    let n = g.n();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i;
    }
    Dense {
        adj: order
            .iter()
            .map(|&v| {
                let mut b = Bits::new(n);
                for &w in g.neighbors(v) {
                    b.set(pos[w as usize]);
                }
                b
            })
            .collect(),
    }
}

fn greedy_lower_bound(g: &SimpleGraph) -> usize {
    let start = (0..g.n() as u32).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).unwrap();
    let mut clique = vec![start];
    let mut cand: Vec<u32> = g.neighbors(start).to_vec();
    while !cand.is_empty() {
        let v = *cand
            .iter()
            .max_by_key(|&&v| (cand.iter().filter(|&&w| g.has_edge(v, w)).count(), std::cmp::Reverse(v)))
            .unwrap();
        clique.push(v);
        cand.retain(|&w| w != v && g.has_edge(v, w));
    }
    clique.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{EdgeKey, QueryOracle};

    fn oracle_graph(n: u32, seed: u64) -> SimpleGraph {
        let o = QueryOracle::new(n as u64, seed).unwrap();
        SimpleGraph::from_edges(
            n as usize,
            (0..n).flat_map(|u| (u + 1..n).map(move |v| EdgeKey::ordered(u, v))).filter(|&e| o.answer(e)),
        )
    }

    /// Independent oracle: plain Bron–Kerbosch over all maximal cliques,
    /// keeping the lexicographically smallest of maximum size.
    fn brute(g: &SimpleGraph) -> Vec<u32> {
        fn bk(g: &SimpleGraph, r: &mut Vec<u32>, p: Vec<u32>, x: Vec<u32>, best: &mut Vec<u32>) {
            if p.is_empty() && x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                if c.len() > best.len() || (c.len() == best.len() && c < *best) {
                    *best = c;
                }
                return;
            }
            let mut p2 = p.clone();
            let mut x2 = x;
            for v in p {
                r.push(v);
                let np = p2.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
                let nx = x2.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
                bk(g, r, np, nx, best);
                r.pop();
                p2.retain(|&w| w != v);
                x2.push(v);
            }
        }
        let mut best = Vec::new();
        bk(g, &mut Vec::new(), (0..g.n() as u32).collect(), Vec::new(), &mut best);
        best
    }

    #[test]
    fn complete_graph() {
        assert_eq!(max_clique(&SimpleGraph::complete(5)), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn five_cycle_lex_smallest() {
        assert_eq!(max_clique(&SimpleGraph::cycle(5)), vec![0, 1]);
    }

    #[test]
    fn edgeless_and_empty() {
        assert_eq!(max_clique(&SimpleGraph::new(4)), vec![0]);
        assert!(max_clique(&SimpleGraph::new(0)).is_empty());
    }

    #[test]
    fn matches_enumeration_on_g30() {
        for seed in 0..20 {
            let g = oracle_graph(30, seed);
            let got = max_clique(&g);
            assert!(g.is_clique(&got));
            assert_eq!(got, brute(&g), "seed {seed}");
        }
    }

    #[test]
    fn peeling_keeps_isolated_parts_out() {
        let mut g = SimpleGraph::complete(4);
        let mut big = SimpleGraph::new(100);
        for e in g.edges() {
            big.add_edge(e.u() + 50, e.v() + 50);
        }
        big.add_edge(0, 1);
        assert_eq!(max_clique(&big), vec![50, 51, 52, 53]);
        g.add_edge(0, 1);
        assert_eq!(max_clique(&g).len(), 4);
    }
}
