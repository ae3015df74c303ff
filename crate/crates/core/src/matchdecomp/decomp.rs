use serde::Serialize;

use crate::graph::SimpleGraph;

use super::matching::{has_augmenting_path, matching_number, Matching};
use super::MatchError;

/// Gallai–Edmonds partition `V = C ⊔ S ⊔ R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GEDecomposition {
    /// Vertices missed by some maximum matching.
    pub c: Vec<u32>,
    /// `N(C) \ C`.
    pub s: Vec<u32>,
    pub r: Vec<u32>,
    /// Number of connected components of `G[C]`.
    pub odd_components: usize,
    pub nu: usize,
}

impl GEDecomposition {
    /// `c − |S| = |V| − 2ν`.
    pub fn deficiency_identity(&self, n: usize) -> bool {
        self.odd_components as i64 - self.s.len() as i64 == n as i64 - 2 * self.nu as i64
    }
}

fn without_vertex(g: &SimpleGraph, v: u32) -> SimpleGraph {
    let keep: Vec<u32> = (0..g.n() as u32).filter(|&w| w != v).collect();
    g.induced(&keep)
}

/// Computed from the avoidable-vertex characterisation: `v ∈ C` iff
/// `ν(G − v) = ν(G)`.
pub fn gallai_edmonds(g: &SimpleGraph) -> GEDecomposition {
    let n = g.n();
    let nu = matching_number(g);
    let mut in_c = vec![false; n];
    for v in 0..n as u32 {
        in_c[v as usize] = matching_number(&without_vertex(g, v)) == nu;
    }
    let mut in_s = vec![false; n];
    for v in 0..n as u32 {
        if in_c[v as usize] {
            for &w in g.neighbors(v) {
                if !in_c[w as usize] {
                    in_s[w as usize] = true;
                }
            }
        }
    }
    let c: Vec<u32> = (0..n as u32).filter(|&v| in_c[v as usize]).collect();
    let s: Vec<u32> = (0..n as u32).filter(|&v| in_s[v as usize]).collect();
    let r: Vec<u32> = (0..n as u32).filter(|&v| !in_c[v as usize] && !in_s[v as usize]).collect();
    let odd_components = g.components_within(&c).len();
    GEDecomposition { c, s, r, odd_components, nu }
}

/// Decomposition `C*⁺, C*⁻, S, D` relative to a fixed maximum matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecificDecomposition {
    pub c_plus: Vec<u32>,
    pub c_minus: Vec<u32>,
    pub s: Vec<u32>,
    pub d: Vec<u32>,
    /// The underlying Gallai–Edmonds `C`.
    pub c: Vec<u32>,
}

impl SpecificDecomposition {
    pub fn c_star(&self) -> Vec<u32> {
        let mut v = self.c_plus.clone();
        v.extend(&self.c_minus);
        v.sort_unstable();
        v
    }
}

pub fn specific_decomposition(g: &SimpleGraph, m: &Matching) -> Result<SpecificDecomposition, MatchError> {
    if !m.is_subgraph_of(g) {
        return Err(MatchError::NotAMatching("matching uses a non-edge or has the wrong vertex count".into()));
    }
    if has_augmenting_path(g, m) {
        return Err(MatchError::NotMaximum);
    }
    let ged = gallai_edmonds(g);
    let n = g.n();
    let mut tag = vec![0u8; n];
    for &v in &ged.s {
        tag[v as usize] = 1;
        let mate = m.mate(v).expect("separator vertices are covered by every maximum matching");
        tag[mate as usize] = 2;
    }
    let mut out = SpecificDecomposition { c_plus: vec![], c_minus: vec![], s: ged.s.clone(), d: vec![], c: ged.c };
    for v in 0..n as u32 {
        match tag[v as usize] {
            1 => {}
            2 => out.c_plus.push(v),
            _ if !m.is_covered(v) => out.c_minus.push(v),
            _ => out.d.push(v),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchdecomp::maximum_matching;
    use crate::oracle::EdgeKey;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star() -> SimpleGraph {
        SimpleGraph::from_pairs(4, &[(0, 1), (0, 2), (0, 3)])
    }

    #[test]
    fn ged_examples() {
        let k4 = gallai_edmonds(&SimpleGraph::complete(4));
        assert!(k4.c.is_empty() && k4.s.is_empty() && k4.r == vec![0, 1, 2, 3]);
        let st = gallai_edmonds(&star());
        assert_eq!((st.c.clone(), st.s.clone(), st.r.len()), (vec![1, 2, 3], vec![0], 0));
        assert_eq!(st.odd_components, 3);
        assert!(st.deficiency_identity(4));
        let c5 = gallai_edmonds(&SimpleGraph::cycle(5));
        assert_eq!(c5.c, vec![0, 1, 2, 3, 4]);
        assert_eq!(c5.odd_components, 1);
        assert!(c5.deficiency_identity(5));
    }

    #[test]
    fn specific_examples() {
        let k4 = SimpleGraph::complete(4);
        let m = Matching::from_edges(4, &[EdgeKey::ordered(0, 1), EdgeKey::ordered(2, 3)]).unwrap();
        let d = specific_decomposition(&k4, &m).unwrap();
        assert!(d.c_plus.is_empty() && d.c_minus.is_empty() && d.s.is_empty());
        assert_eq!(d.d, vec![0, 1, 2, 3]);

        let m = Matching::from_edges(4, &[EdgeKey::ordered(0, 1)]).unwrap();
        let d = specific_decomposition(&star(), &m).unwrap();
        assert_eq!(d.c_minus, vec![2, 3]);
        assert_eq!(d.s, vec![0]);
        assert_eq!(d.c_plus, vec![1]);
        assert!(d.d.is_empty());
    }

    #[test]
    fn rejects_non_maximum() {
        let p4 = SimpleGraph::path(4);
        let m = Matching::from_edges(4, &[EdgeKey::ordered(1, 2)]).unwrap();
        assert_eq!(specific_decomposition(&p4, &m), Err(MatchError::NotMaximum));
    }

    #[test]
    fn random_instances_satisfy_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = 20;
            let p: f64 = rng.gen_range(0.05..0.5);
            let mut pairs = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.gen_bool(p) {
                        pairs.push((u, v));
                    }
                }
            }
            let g = SimpleGraph::from_pairs(n, &pairs);
            let m = maximum_matching(&g);
            let ged = gallai_edmonds(&g);
            assert!(ged.deficiency_identity(n));
            assert_eq!(ged.r.len() % 2, 0);
            // every component of G[C] is odd
            assert!(g.components_within(&ged.c).iter().all(|c| c.len() % 2 == 1));
            // R is matched within itself
            assert!(ged.r.iter().all(|&v| m.mate(v).is_some_and(|w| ged.r.contains(&w))));

            let d = specific_decomposition(&g, &m).unwrap();
            let cs = d.c_star();
            assert!(cs.iter().all(|&a| cs.iter().all(|&b| !g.has_edge(a, b))));
            for &v in &d.d {
                assert!(g.neighbors(v).iter().filter(|w| cs.contains(w)).count() <= 1);
            }
            assert_eq!(cs.len(), ged.odd_components);
            assert_eq!(d.c_plus.len() + d.c_minus.len() + d.s.len() + d.d.len(), n);
        }
    }
}
