use num_rational::Ratio;
use rand::Rng;

use crate::clique::max_clique;
use crate::graph::SimpleGraph;
use crate::oracle::{EdgeKey, Transcript};

use super::decomp::specific_decomposition;
use super::matching::{matching_number, Matching};
use super::MatchError;

pub type Frac = Ratio<i64>;

/// Largest clique size the canonical-matching DP accepts (2^k table).
pub const MAX_CANONICAL_K: usize = 24;

/// A clique `K` on local vertices `0..k` with the round in which each pair
/// was queried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundLabeledClique {
    k: usize,
    l: u8,
    labels: Vec<u8>,
}

fn pair_index(k: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

impl RoundLabeledClique {
    /// `labels` lists the pairs `(a, b)`, `a < b`, in lexicographic order.
    pub fn new(k: usize, l: u8, labels: Vec<u8>) -> Result<Self, MatchError> {
        if l == 0 {
            return Err(MatchError::Input("round count l must be >= 1".into()));
        }
        if labels.len() != k * k.saturating_sub(1) / 2 {
            return Err(MatchError::Input(format!("{} labels for k = {k}", labels.len())));
        }
        if let Some(bad) = labels.iter().find(|&&r| r == 0 || r > l) {
            return Err(MatchError::Input(format!("label {bad} outside 1..={l}")));
        }
        Ok(RoundLabeledClique { k, l, labels })
    }

    pub fn from_fn(k: usize, l: u8, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self, MatchError> {
        let mut labels = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for a in 0..k {
            for b in a + 1..k {
                labels.push(f(a, b));
            }
        }
        Self::new(k, l, labels)
    }

    /// Uniformly random labels in `1..=l`.
    pub fn random<R: Rng>(k: usize, l: u8, rng: &mut R) -> Self {
        Self::from_fn(k, l, |_, _| rng.gen_range(1..=l)).expect("labels in range")
    }

    /// Labels from the first round that queried each pair of `clique`;
    /// every pair must have been answered positively.
    pub fn from_transcript(t: &Transcript, clique: &[u32]) -> Result<Self, MatchError> {
        let l = t.rounds_used().max(1) as u8;
        let k = clique.len();
        let mut labels = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let e = EdgeKey::new(clique[a], clique[b], t.n())
                    .map_err(|e| MatchError::Input(e.to_string()))?;
                match (t.first_round(e), t.answer(e)) {
                    (Some(r), Some(true)) => labels.push(r as u8),
                    _ => {
                        return Err(MatchError::Input(format!(
                            "pair ({},{}) is not a positive queried edge",
                            clique[a], clique[b]
                        )))
                    }
                }
            }
        }
        Self::new(k, l, labels)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rounds(&self) -> u8 {
        self.l
    }

    pub fn label(&self, a: u32, b: u32) -> u8 {
        assert!(a != b);
        self.labels[pair_index(self.k, a as usize, b as usize)]
    }

    fn graph_where(&self, keep: impl Fn(u8) -> bool) -> SimpleGraph {
        let mut edges = Vec::new();
        for a in 0..self.k as u32 {
            for b in a + 1..self.k as u32 {
                if keep(self.label(a, b)) {
                    edges.push(EdgeKey::ordered(a, b));
                }
            }
        }
        SimpleGraph::from_edges(self.k, edges)
    }

    /// `K_r`: pairs queried in rounds `1..=r`.
    pub fn state_after(&self, r: u8) -> SimpleGraph {
        self.graph_where(|x| x <= r)
    }

    /// `Q_r` restricted to `K`.
    pub fn queried_in(&self, r: u8) -> SimpleGraph {
        self.graph_where(|x| x == r)
    }

    fn pairs(&self) -> i64 {
        (self.k * self.k.saturating_sub(1) / 2) as i64
    }
}

/// The perfect matching of `K` maximising `(m₁ + m₂, m₁)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalMatching {
    pub matching: Matching,
    /// `|M_r|` for `r = 1..=l`.
    pub per_round: Vec<usize>,
}

impl CanonicalMatching {
    /// `m_r = |M_r| / k`.
    pub fn split(&self) -> Vec<Frac> {
        let k = self.matching.n() as i64;
        self.per_round.iter().map(|&c| Frac::new(c as i64, k)).collect()
    }
}

fn edge_weight(k: usize, r: u8) -> u16 {
    (if r <= 2 { k as u16 + 1 } else { 0 }) + u16::from(r == 1)
}

pub fn canonical_matching(labeled: &RoundLabeledClique) -> Result<CanonicalMatching, MatchError> {
    let k = labeled.k;
    if k % 2 == 1 {
        return Err(MatchError::OddClique(k));
    }
    if k > MAX_CANONICAL_K {
        return Err(MatchError::TooLarge(k, MAX_CANONICAL_K));
    }
    // best[mask]: largest total weight of a perfect matching on `mask`
    const UNSET: u16 = u16::MAX;
    let mut best = vec![UNSET; 1 << k];
    best[0] = 0;

    fn solve(mask: usize, k: usize, lab: &RoundLabeledClique, best: &mut [u16]) -> u16 {
        if best[mask] != UNSET {
            return best[mask];
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut top = 0;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let w = edge_weight(k, lab.label(i as u32, j as u32)) + solve(rest & !(1 << j), k, lab, best);
            top = top.max(w);
        }
        best[mask] = top;
        top
    }

    let full = (1usize << k) - 1;
    solve(full, k, labeled, &mut best);
    // walk back choosing the smallest partner that attains the optimum
    let mut edges = Vec::with_capacity(k / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut r = rest;
        loop {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let after = rest & !(1 << j);
            let w = edge_weight(k, labeled.label(i as u32, j as u32));
            if w + solve(after, k, labeled, &mut best) == best[mask] {
                edges.push(EdgeKey::ordered(i as u32, j as u32));
                mask = after;
                break;
            }
        }
    }
    let matching = Matching::from_edges(k, &edges)?;
    let mut per_round = vec![0; labeled.l as usize];
    for e in &edges {
        per_round[labeled.label(e.u(), e.v()) as usize - 1] += 1;
    }
    Ok(CanonicalMatching { matching, per_round })
}

/// Pair accounting for a split point `i*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeEdgeCount {
    pub i_star: u8,
    /// `e_1..e_{i*}`: pairs queried in round `i` inside `V_M^i ∪ V_free`.
    pub e: Vec<Frac>,
    pub e_free: Frac,
    /// Pairs first queried after round `i*`; their answers are fresh.
    pub e_late: Frac,
    /// `|V_free| / k`.
    pub v_free: Frac,
}

impl FreeEdgeCount {
    /// `Σ e_i + e_late + e_free = 1`.
    pub fn identity_holds(&self) -> bool {
        self.e.iter().copied().sum::<Frac>() + self.e_late + self.e_free == Frac::from_integer(1)
    }
}

pub fn free_edge_count(labeled: &RoundLabeledClique, m: &Matching, i_star: u8) -> Result<FreeEdgeCount, MatchError> {
    let k = labeled.k;
    if m.n() != k || !m.is_perfect() {
        return Err(MatchError::NotPerfect);
    }
    if k < 2 {
        return Err(MatchError::Input("need k >= 2".into()));
    }
    if i_star == 0 || i_star > labeled.l {
        return Err(MatchError::Input(format!("i* = {i_star} outside 1..={}", labeled.l)));
    }
    // round in which each vertex is covered; free vertices count as covered
    // from the start
    let covered_at: Vec<u8> = (0..k as u32)
        .map(|v| {
            let r = labeled.label(v, m.mate(v).unwrap());
            if r > i_star {
                0
            } else {
                r
            }
        })
        .collect();
    let mut e = vec![0i64; i_star as usize];
    let (mut free, mut late) = (0i64, 0i64);
    for a in 0..k as u32 {
        for b in a + 1..k as u32 {
            let r = labeled.label(a, b);
            if r > i_star {
                late += 1;
            } else if covered_at[a as usize] <= r && covered_at[b as usize] <= r {
                e[r as usize - 1] += 1;
            } else {
                free += 1;
            }
        }
    }
    let total = labeled.pairs();
    let v_free = covered_at.iter().filter(|&&c| c == 0).count() as i64;
    Ok(FreeEdgeCount {
        i_star,
        e: e.into_iter().map(|c| Frac::new(c, total)).collect(),
        e_free: Frac::new(free, total),
        e_late: Frac::new(late, total),
        v_free: Frac::new(v_free, k as i64),
    })
}

/// Parameters of a three-round clique under its canonical matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompSignature {
    pub k: usize,
    pub m: [Frac; 3],
    pub m1_prime: Frac,
    pub s1: Frac,
    pub d1: Frac,
    pub s2: Frac,
    pub d2: Frac,
    /// Independence number of `K_2`, over `k`.
    pub indep: Frac,
    pub free2: FreeEdgeCount,
    pub free3: FreeEdgeCount,
    /// Gallai–Edmonds `C̃` of `K_2[V_{M₂₃}]`, in clique vertex ids.
    pub c_tilde: Vec<u32>,
    /// `V_{M₂₃}`, sorted.
    pub v_m23: Vec<u32>,
}

impl DecompSignature {
    pub fn identities_hold(&self) -> bool {
        let half = Frac::new(1, 2);
        self.m[0] + self.m[1] + self.m[2] == half
            && self.m[0] == self.s1 + self.d1
            && self.m[1] == self.s2 + self.d2
            && self.free2.v_free == self.m[2] * 2
            && self.free3.v_free == Frac::from_integer(0)
            && self.free2.identity_holds()
            && self.free3.identity_holds()
    }

    /// Named values as floats, in a fixed order.
    pub fn to_f64_fields(&self) -> Vec<(&'static str, f64)> {
        let f = |x: Frac| *x.numer() as f64 / *x.denom() as f64;
        vec![
            ("m1", f(self.m[0])),
            ("m2", f(self.m[1])),
            ("m3", f(self.m[2])),
            ("m1_prime", f(self.m1_prime)),
            ("s1", f(self.s1)),
            ("d1", f(self.d1)),
            ("s2", f(self.s2)),
            ("d2", f(self.d2)),
            ("e_free2", f(self.free2.e_free)),
            ("e_free3", f(self.free3.e_free)),
            ("indep", f(self.indep)),
        ]
    }
}

pub fn signature(labeled: &RoundLabeledClique) -> Result<DecompSignature, MatchError> {
    if labeled.l != 3 {
        return Err(MatchError::Input(format!("signature needs l = 3, got {}", labeled.l)));
    }
    let k = labeled.k;
    if k < 2 {
        return Err(MatchError::Input("need k >= 2".into()));
    }
    let canon = canonical_matching(labeled)?;
    let m = &canon.matching;
    let round_of = |v: u32| labeled.label(v, m.mate(v).unwrap());
    let k2 = labeled.state_after(2);

    let m12: Vec<EdgeKey> = m.edges().into_iter().filter(|e| labeled.label(e.u(), e.v()) <= 2).collect();
    let dec = specific_decomposition(&k2, &Matching::from_edges(k, &m12)?)?;
    let s1 = dec.s.iter().filter(|&&v| round_of(v) == 1).count() as i64;
    let d1 = dec.d.iter().filter(|&&v| round_of(v) == 1).count() as i64;

    let v_m23: Vec<u32> = (0..k as u32).filter(|&v| round_of(v) >= 2).collect();
    let local = k2.induced(&v_m23);
    let pos = |v: u32| v_m23.binary_search(&v).unwrap() as u32;
    let m2_local: Vec<EdgeKey> = m
        .edges()
        .into_iter()
        .filter(|e| labeled.label(e.u(), e.v()) == 2)
        .map(|e| EdgeKey::ordered(pos(e.u()), pos(e.v())))
        .collect();
    let dec_t = specific_decomposition(&local, &Matching::from_edges(v_m23.len(), &m2_local)?)?;
    let s2 = dec_t.s.len() as i64;
    let d2 = dec_t.d.len() as i64;
    let c_tilde = dec_t.c.iter().map(|&i| v_m23[i as usize]).collect();

    let nu1 = matching_number(&labeled.queried_in(1).induced(&v_m23)) as i64;
    let indep = if k2.edge_count() == 0 { k } else { max_clique(&k2.complement()).len() };

    let kk = k as i64;
    let per = &canon.per_round;
    Ok(DecompSignature {
        k,
        m: [0, 1, 2].map(|i| Frac::new(per[i] as i64, kk)),
        m1_prime: Frac::new(nu1, kk),
        s1: Frac::new(s1, kk),
        d1: Frac::new(d1, 2 * kk),
        s2: Frac::new(s2, kk),
        d2: Frac::new(d2, 2 * kk),
        indep: Frac::new(indep as i64, kk),
        free2: free_edge_count(labeled, m, 2)?,
        free3: free_edge_count(labeled, m, 3)?,
        c_tilde,
        v_m23,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lab(k: usize, l: u8, f: impl FnMut(usize, usize) -> u8) -> RoundLabeledClique {
        RoundLabeledClique::from_fn(k, l, f).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let one = |a: usize, b: usize| if (a, b) == (0, 1) || (a, b) == (2, 3) { 1 } else { 3 };
        let c = canonical_matching(&lab(4, 3, one)).unwrap();
        assert_eq!(c.matching.edges(), vec![EdgeKey::ordered(0, 1), EdgeKey::ordered(2, 3)]);
        assert_eq!(c.split(), vec![Frac::new(1, 2), Frac::new(0, 1), Frac::new(0, 1)]);

        let c = canonical_matching(&lab(4, 3, |_, _| 2)).unwrap();
        assert_eq!(c.split(), vec![Frac::new(0, 1), Frac::new(1, 2), Frac::new(0, 1)]);
        assert!(c.matching.is_perfect());

        assert_eq!(canonical_matching(&lab(5, 3, |_, _| 1)), Err(MatchError::OddClique(5)));
    }

    /// All perfect matchings of `0..k` by recursive pairing of the lowest
    /// vertex.
    fn all_perfect(k: usize) -> Vec<Vec<(u32, u32)>> {
        fn rec(left: Vec<u32>, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
            if left.is_empty() {
                out.push(cur.clone());
                return;
            }
            let a = left[0];
            for i in 1..left.len() {
                let rest: Vec<u32> = left[1..].iter().copied().filter(|&x| x != left[i]).collect();
                cur.push((a, left[i]));
                rec(rest, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec((0..k as u32).collect(), &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn canonical_matches_enumeration() {
        assert_eq!(all_perfect(8).len(), 105);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let l = RoundLabeledClique::random(8, 3, &mut rng);
            let key = |pm: &[(u32, u32)]| {
                let m1 = pm.iter().filter(|&&(a, b)| l.label(a, b) == 1).count();
                let m2 = pm.iter().filter(|&&(a, b)| l.label(a, b) == 2).count();
                (m1 + m2, m1)
            };
            let best = all_perfect(8).iter().map(|pm| key(pm)).max().unwrap();
            let c = canonical_matching(&l).unwrap();
            let got: Vec<(u32, u32)> = c.matching.edges().iter().map(|e| (e.u(), e.v())).collect();
            assert_eq!(key(&got), best);
            assert_eq!((c.per_round[0] + c.per_round[1], c.per_round[0]), best);
        }
    }

    #[test]
    fn free_edge_examples() {
        let l = lab(4, 3, |_, _| 1);
        let m = canonical_matching(&l).unwrap().matching;
        let f = free_edge_count(&l, &m, 1).unwrap();
        assert_eq!((f.e_free, f.e[0]), (Frac::new(0, 1), Frac::new(1, 1)));

        // M₁ = {01}, M₂ = {23}, cross pairs in round 1
        let l = lab(4, 3, |a, b| if (a, b) == (2, 3) { 2 } else { 1 });
        let m = Matching::from_edges(4, &[EdgeKey::ordered(0, 1), EdgeKey::ordered(2, 3)]).unwrap();
        let f = free_edge_count(&l, &m, 2).unwrap();
        assert_eq!(f.e_free, Frac::new(4, 6));
        assert!(f.identity_holds());

        let bad = Matching::from_edges(4, &[EdgeKey::ordered(0, 1)]).unwrap();
        assert_eq!(free_edge_count(&l, &bad, 2), Err(MatchError::NotPerfect));
    }

    #[test]
    fn signature_identities_on_random_cliques() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in [2, 4, 6, 10, 12] {
            for _ in 0..20 {
                let l = RoundLabeledClique::random(k, 3, &mut rng);
                let s = signature(&l).unwrap();
                assert!(s.identities_hold(), "{s:?}");
            }
        }
    }

    #[test]
    fn from_transcript_reads_first_rounds() {
        use crate::oracle::{QueryOracle, Schedule};
        let o = QueryOracle::new(30, 1).unwrap();
        let mut t = Transcript::new(&o, Schedule::new(30, &[1.9, 1.9]).unwrap()).unwrap();
        let all: Vec<EdgeKey> = (0..30u32).flat_map(|a| (a + 1..30).map(move |b| EdgeKey::ordered(a, b))).collect();
        t.submit_round(&o, all[..100].to_vec()).unwrap();
        t.submit_round(&o, all.clone()).unwrap();
        let (_, pos) = t.extract_graphs(2).unwrap();
        let k = max_clique(&pos);
        let l = RoundLabeledClique::from_transcript(&t, &k).unwrap();
        for i in 0..k.len() {
            for j in i + 1..k.len() {
                let e = EdgeKey::ordered(k[i], k[j]);
                let early = all[..100].contains(&e);
                assert_eq!(l.label(i as u32, j as u32), if early { 1 } else { 2 });
            }
        }
        let non_edge = all.iter().find(|&&e| t.answer(e) == Some(false)).unwrap();
        assert!(RoundLabeledClique::from_transcript(&t, &[non_edge.u(), non_edge.v()]).is_err());
    }
}
