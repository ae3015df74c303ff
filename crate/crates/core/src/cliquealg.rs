//! Greedy baseline and the four bounded-round algorithms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clique::max_clique;
use crate::graph::SimpleGraph;
use crate::oracle::{floor_pow, EdgeKey, OracleError, QueryOracle, Schedule, Transcript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error("delta = {delta} outside the {variant} range {range}")]
    DeltaOutOfRange { variant: Variant, delta: f64, range: &'static str },
    #[error("pair ({s},{t}) was never queried")]
    MissingQuery { s: u32, t: u32 },
    #[error("S and T share vertex {0}")]
    Overlap(u32),
    #[error("{0} is not a two-round variant")]
    NotTwoRound(Variant),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Greedy,
    OneRound,
    TwoSmall,
    TwoLarge,
    ThreeRound,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::Greedy, Variant::OneRound, Variant::TwoSmall, Variant::TwoLarge, Variant::ThreeRound];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Greedy => "greedy",
            Variant::OneRound => "one_round",
            Variant::TwoSmall => "two_small",
            Variant::TwoLarge => "two_large",
            Variant::ThreeRound => "three_round",
        }
    }

    /// Clique size the algorithm aims for, as a multiple of log2 n.
    pub fn alpha(&self, delta: f64) -> f64 {
        match self {
            Variant::Greedy => 1.0,
            Variant::OneRound => delta,
            Variant::TwoSmall => 4.0 * delta / 3.0,
            Variant::TwoLarge | Variant::ThreeRound => 1.0 + delta / 2.0,
        }
    }

    pub fn check_delta(&self, delta: f64) -> Result<(), AlgorithmError> {
        let (ok, range) = match self {
            Variant::Greedy => (true, "any"),
            Variant::TwoSmall => ((1.0..=1.2).contains(&delta), "[1, 6/5]"),
            Variant::TwoLarge => ((1.2..2.0).contains(&delta), "[6/5, 2)"),
            Variant::OneRound | Variant::ThreeRound => ((1.0..2.0).contains(&delta), "[1, 2)"),
        };
        if ok {
            Ok(())
        } else {
            Err(AlgorithmError::DeltaOutOfRange { variant: *self, delta, range })
        }
    }

    /// Per-round budget exponents.
    pub fn exponents(&self, n: u64, delta: f64) -> Vec<f64> {
        match self {
            Variant::Greedy => vec![1.0; greedy_rounds(n)],
            Variant::OneRound => vec![delta],
            Variant::TwoSmall | Variant::TwoLarge => vec![delta, delta],
            Variant::ThreeRound => vec![1.0 - delta / 2.0, 1.0, delta],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .iter()
            .find(|v| v.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

fn greedy_rounds(n: u64) -> usize {
    4 * (64 - (n - 1).leading_zeros() as usize) + 16
}

/// Sizes of the intermediate sets, where the variant has them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SetSizes {
    pub s: Option<u64>,
    pub s_prime: Option<u64>,
    pub t: Option<u64>,
    pub t_prime: Option<u64>,
    /// |T'| before truncation to the round budget.
    pub t_prime_raw: Option<u64>,
    pub t_double_prime: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub variant: Variant,
    pub n: u64,
    pub delta: f64,
    pub clique: Vec<u32>,
    pub queries_per_round: Vec<u64>,
    pub budgets: Vec<u64>,
    pub sizes: SetSizes,
    pub target_size: f64,
    pub success: bool,
    pub truncated: bool,
    /// Greedy only: |T| after each round.
    pub greedy_trace: Vec<u64>,
    pub transcript: Transcript,
}

impl AlgorithmResult {
    pub fn clique_verified(&self) -> bool {
        self.transcript.is_positive_clique(&self.clique)
    }

    pub fn budgets_respected(&self) -> bool {
        let audit = self.transcript.audit(None);
        audit.budgets_ok
            && self.queries_per_round.iter().zip(&self.budgets).all(|(q, b)| q <= b)
    }
}

fn finish(
    variant: Variant,
    oracle: &QueryOracle,
    delta: f64,
    mut clique: Vec<u32>,
    sizes: SetSizes,
    truncated: bool,
    greedy_trace: Vec<u64>,
    transcript: Transcript,
) -> AlgorithmResult {
    clique.sort_unstable();
    let n = oracle.n();
    let target_size = variant.alpha(delta) * (n as f64).log2();
    AlgorithmResult {
        variant,
        n,
        delta,
        success: clique.len() as f64 >= target_size,
        clique,
        queries_per_round: transcript.queries_per_round(),
        budgets: transcript.schedule().budgets().to_vec(),
        sizes,
        target_size,
        truncated,
        greedy_trace,
        transcript,
    }
}

/// `T' = {t ∈ T : (s,t) positive for every s ∈ S}`.
pub fn common_neighbors(
    transcript: &Transcript,
    s: &[u32],
    t: &[u32],
) -> Result<Vec<u32>, AlgorithmError> {
    let s_set: std::collections::HashSet<u32> = s.iter().copied().collect();
    if let Some(&x) = t.iter().find(|x| s_set.contains(x)) {
        return Err(AlgorithmError::Overlap(x));
    }
    let mut out = Vec::new();
    for &x in t {
        let mut all = true;
        for &y in s {
            match transcript.answer(EdgeKey::ordered(x, y)) {
                None => return Err(AlgorithmError::MissingQuery { s: y, t: x }),
                Some(false) => {
                    all = false;
                    break;
                }
                Some(true) => {}
            }
        }
        if all {
            out.push(x);
        }
    }
    Ok(out)
}

fn pairs_within(vs: &[u32]) -> Vec<EdgeKey> {
    let mut out = Vec::with_capacity(vs.len() * vs.len().saturating_sub(1) / 2);
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            out.push(EdgeKey::ordered(a, b));
        }
    }
    out
}

fn pairs_between(a: &[u32], b: &[u32]) -> Vec<EdgeKey> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(EdgeKey::ordered(x, y));
        }
    }
    out
}

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Maximum clique of the positive graph induced on `vs` (original labels).
fn clique_within(transcript: &Transcript, vs: &[u32]) -> Vec<u32> {
    let mut edges = Vec::new();
    for (i, &a) in vs.iter().enumerate() {
        for (j, &b) in vs.iter().enumerate().skip(i + 1) {
            if transcript.answer(EdgeKey::ordered(a, b)) == Some(true) {
                edges.push(EdgeKey::ordered(i as u32, j as u32));
            }
        }
    }
    let g = SimpleGraph::from_edges(vs.len(), edges);
    max_clique(&g).into_iter().map(|i| vs[i as usize]).collect()
}

/// Largest prefix of `t_prime` whose internal pairs fit the next budget,
/// capped first at ⌊n^{δ/2}⌋.
fn truncate_t_prime(t_prime: &mut Vec<u32>, n: u64, delta: f64, budget: u64) -> bool {
    let before = t_prime.len();
    let mut cap = floor_pow(n, delta / 2.0).min(before as u64);
    while choose2(cap) > budget {
        cap -= 1;
    }
    t_prime.truncate(cap as usize);
    t_prime.len() < before
}

pub fn greedy_clique(oracle: &QueryOracle) -> Result<AlgorithmResult, AlgorithmError> {
    let n = oracle.n();
    let schedule = Schedule::new(n, &Variant::Greedy.exponents(n, 1.0))?;
    let mut transcript = Transcript::new(oracle, schedule)?;
    let mut k = Vec::new();
    let mut t: Vec<u32> = (0..n as u32).collect();
    let mut trace = vec![t.len() as u64];
    while let Some((&first, rest)) = t.split_first() {
        k.push(first);
        if rest.is_empty() || transcript.next_budget().is_none() {
            break;
        }
        let edges: Vec<EdgeKey> = rest.iter().map(|&x| EdgeKey::ordered(first, x)).collect();
        let round = transcript.submit_round(oracle, edges)?;
        let next: Vec<u32> =
            rest.iter().copied().filter(|&x| round.answer(EdgeKey::ordered(first, x)) == Some(true)).collect();
        t = next;
        trace.push(t.len() as u64);
    }
    Ok(finish(Variant::Greedy, oracle, 1.0, k, SetSizes::default(), false, trace, transcript))
}

pub fn run_algorithm(
    variant: Variant,
    oracle: &QueryOracle,
    delta: f64,
) -> Result<AlgorithmResult, AlgorithmError> {
    variant.check_delta(delta)?;
    match variant {
        Variant::Greedy => greedy_clique(oracle),
        Variant::OneRound => one_round(oracle, delta),
        Variant::TwoSmall | Variant::TwoLarge => two_round(variant, oracle, delta),
        Variant::ThreeRound => three_round(oracle, delta),
    }
}

fn one_round(oracle: &QueryOracle, delta: f64) -> Result<AlgorithmResult, AlgorithmError> {
    let n = oracle.n();
    let schedule = Schedule::new(n, &Variant::OneRound.exponents(n, delta))?;
    let budget = schedule.budgets()[0];
    let mut transcript = Transcript::new(oracle, schedule)?;
    let mut s_len = floor_pow(n, delta / 2.0).min(n);
    while choose2(s_len) > budget {
        s_len -= 1;
    }
    let s: Vec<u32> = (0..s_len as u32).collect();
    transcript.submit_round(oracle, pairs_within(&s))?;
    let k = clique_within(&transcript, &s);
    let sizes = SetSizes { s: Some(s_len), s_prime: Some(k.len() as u64), ..Default::default() };
    Ok(finish(Variant::OneRound, oracle, delta, k, sizes, false, Vec::new(), transcript))
}

/// First-round set sizes (|S|, |T|) of the two-round variants, shrinking S
/// until the round fits its budget.
pub fn two_round_first_sets(variant: Variant, n: u64, delta: f64) -> Result<(u64, u64), AlgorithmError> {
    variant.check_delta(delta)?;
    let (s_exp, t_exp) = match variant {
        Variant::TwoSmall => (delta / 6.0, Some(5.0 * delta / 6.0)),
        Variant::TwoLarge => ((1.0 - delta / 2.0) / 2.0, None),
        _ => return Err(AlgorithmError::NotTwoRound(variant)),
    };
    let b1 = Schedule::new(n, &variant.exponents(n, delta))?.budgets()[0];
    let t_len_for = |s_len: u64| match t_exp {
        Some(x) => floor_pow(n, x).min(n - s_len),
        None => n - s_len,
    };
    let mut s_len = floor_pow(n, s_exp).clamp(1, n - 1);
    while s_len > 1 && choose2(s_len) + s_len * t_len_for(s_len) > b1 {
        s_len -= 1;
    }
    Ok((s_len, t_len_for(s_len)))
}

fn two_round(variant: Variant, oracle: &QueryOracle, delta: f64) -> Result<AlgorithmResult, AlgorithmError> {
    let n = oracle.n();
    let schedule = Schedule::new(n, &variant.exponents(n, delta))?;
    let b2 = schedule.budgets()[1];
    let mut transcript = Transcript::new(oracle, schedule)?;
    let (s_len, t_len) = two_round_first_sets(variant, n, delta)?;
    let s: Vec<u32> = (0..s_len as u32).collect();
    let t: Vec<u32> = (s_len as u32..(s_len + t_len) as u32).collect();
    let mut edges = pairs_within(&s);
    edges.extend(pairs_between(&s, &t));
    transcript.submit_round(oracle, edges)?;
    let s_prime = clique_within(&transcript, &s);
    let mut t_prime = common_neighbors(&transcript, &s_prime, &t)?;
    let raw = t_prime.len() as u64;
    let truncated = truncate_t_prime(&mut t_prime, n, delta, b2);
    transcript.submit_round(oracle, pairs_within(&t_prime))?;
    let t2 = clique_within(&transcript, &t_prime);
    let sizes = SetSizes {
        s: Some(s_len),
        s_prime: Some(s_prime.len() as u64),
        t: Some(t.len() as u64),
        t_prime: Some(t_prime.len() as u64),
        t_prime_raw: Some(raw),
        t_double_prime: Some(t2.len() as u64),
    };
    let mut k = s_prime;
    k.extend(t2);
    Ok(finish(variant, oracle, delta, k, sizes, truncated, Vec::new(), transcript))
}

fn three_round(oracle: &QueryOracle, delta: f64) -> Result<AlgorithmResult, AlgorithmError> {
    let n = oracle.n();
    let schedule = Schedule::new(n, &Variant::ThreeRound.exponents(n, delta))?;
    let (b1, b3) = (schedule.budgets()[0], schedule.budgets()[2]);
    let mut transcript = Transcript::new(oracle, schedule)?;
    let mut s_len = floor_pow(n, (1.0 - delta / 2.0) / 2.0).clamp(1, n - 1);
    while s_len > 1 && choose2(s_len) > b1 {
        s_len -= 1;
    }
    let s: Vec<u32> = (0..s_len as u32).collect();
    transcript.submit_round(oracle, pairs_within(&s))?;
    let s_prime = clique_within(&transcript, &s);
    let t_len = (n / s_prime.len() as u64).min(n - s_len);
    let t: Vec<u32> = (s_len as u32..(s_len + t_len) as u32).collect();
    transcript.submit_round(oracle, pairs_between(&s_prime, &t))?;
    let mut t_prime = common_neighbors(&transcript, &s_prime, &t)?;
    let raw = t_prime.len() as u64;
    let truncated = truncate_t_prime(&mut t_prime, n, delta, b3);
    transcript.submit_round(oracle, pairs_within(&t_prime))?;
    let t2 = clique_within(&transcript, &t_prime);
    let sizes = SetSizes {
        s: Some(s_len),
        s_prime: Some(s_prime.len() as u64),
        t: Some(t_len),
        t_prime: Some(t_prime.len() as u64),
        t_prime_raw: Some(raw),
        t_double_prime: Some(t2.len() as u64),
    };
    let mut k = s_prime;
    k.extend(t2);
    Ok(finish(Variant::ThreeRound, oracle, delta, k, sizes, truncated, Vec::new(), transcript))
}
