use crate::oracle::EdgeKey;

/// Undirected simple graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds from an edge list; duplicates are merged. Panics on an
    /// endpoint `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = EdgeKey>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            let (u, v) = (e.u() as usize, e.v() as usize);
            assert!(v < n, "edge ({u},{v}) outside 0..{n}");
            adj[u].push(e.v());
            adj[v].push(e.u());
        }
        let mut m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        SimpleGraph { adj, m: m / 2 }
    }

    pub fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        Self::from_edges(n, pairs.iter().map(|&(a, b)| EdgeKey::ordered(a, b)))
    }

    pub fn complete(n: usize) -> Self {
        let n32 = n as u32;
        Self::from_edges(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| EdgeKey::ordered(u, v))))
    }

    pub fn cycle(n: usize) -> Self {
        let n32 = n as u32;
        Self::from_edges(n, (0..n32).map(|u| EdgeKey::ordered(u, (u + 1) % n32)))
    }

    pub fn path(n: usize) -> Self {
        let n32 = n as u32;
        Self::from_edges(n, (1..n32).map(|u| EdgeKey::ordered(u - 1, u)))
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        assert!(u != v, "self-loop {u}");
        if let Err(i) = self.adj[u as usize].binary_search(&v) {
            self.adj[u as usize].insert(i, v);
            let j = self.adj[v as usize].binary_search(&u).unwrap_err();
            self.adj[v as usize].insert(j, u);
            self.m += 1;
        }
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter().filter(move |&&v| v as usize > u).map(move |&v| EdgeKey::ordered(u as u32, v))
        })
    }

    /// Subgraph induced on `vertices`; vertex `i` of the result is
    /// `vertices[i]`.
    pub fn induced(&self, vertices: &[u32]) -> SimpleGraph {
        let mut pos = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            pos.insert(v, i as u32);
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = pos.get(w) {
                    if (i as u32) < j {
                        edges.push(EdgeKey::ordered(i as u32, j));
                    }
                }
            }
        }
        SimpleGraph::from_edges(vertices.len(), edges)
    }

    pub fn complement(&self) -> SimpleGraph {
        let n = self.n() as u32;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    edges.push(EdgeKey::ordered(u, v));
                }
            }
        }
        SimpleGraph::from_edges(self.n(), edges)
    }

    pub fn is_clique(&self, vertices: &[u32]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// Connected components of the subgraph induced on `vertices`, each
    /// sorted, ordered by smallest member.
    pub fn components_within(&self, vertices: &[u32]) -> Vec<Vec<u32>> {
        let mut inside = vec![false; self.n()];
        for &v in vertices {
            inside[v as usize] = true;
        }
        let mut seen = vec![false; self.n()];
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        for &s in &sorted {
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in self.neighbors(v) {
                    if inside[w as usize] && !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
