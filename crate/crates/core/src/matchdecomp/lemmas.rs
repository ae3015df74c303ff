use std::fmt;

use serde::Serialize;

use crate::graph::SimpleGraph;

use super::labeled::{signature, Frac, RoundLabeledClique};
use super::matching::maximum_matching;
use super::MatchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `|E⁻| ≤ ½|V_M||V_M⁻|`.
    UnmatchedEdges,
    /// `e_free³ ≤ ½` under the canonical matching.
    FreeEdgesHalf,
    /// No round-1 pair from `C̃` into `V_{M₂₃}`.
    Deg1Zero,
    FreeEdgeBound2,
    FreeEdgeBound3,
}

impl Lemma {
    pub fn name(&self) -> &'static str {
        match self {
            Lemma::UnmatchedEdges => "unmatched_edges",
            Lemma::FreeEdgesHalf => "free_edges_half",
            Lemma::Deg1Zero => "deg1_zero",
            Lemma::FreeEdgeBound2 => "free_edge_bound_2",
            Lemma::FreeEdgeBound3 => "free_edge_bound_3",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub lemma: Lemma,
    pub holds: bool,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
}

fn to_f64(x: Frac) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn check(lemma: Lemma, measured: Frac, bound: Frac, slack: Frac) -> LemmaCheck {
    LemmaCheck {
        lemma,
        holds: measured <= bound + slack,
        measured: to_f64(measured),
        bound: to_f64(bound),
        slack: to_f64(slack),
    }
}

#[derive(Debug, Clone)]
pub enum LemmaInstance {
    Graph(SimpleGraph),
    Labeled(RoundLabeledClique),
}

/// Edges with an endpoint outside a maximum matching, against
/// `½|V_M||V_M⁻|`. Requires an even vertex count.
pub fn check_unmatched_edges(g: &SimpleGraph) -> Result<LemmaCheck, MatchError> {
    if g.n() % 2 == 1 {
        return Err(MatchError::Input(format!("graph has an odd vertex count {}", g.n())));
    }
    let m = maximum_matching(g);
    let e_minus = g.edges().filter(|e| !m.is_covered(e.u()) || !m.is_covered(e.v())).count() as i64;
    let vm = m.covered().len() as i64;
    let vm_minus = g.n() as i64 - vm;
    Ok(check(Lemma::UnmatchedEdges, Frac::from_integer(e_minus), Frac::new(vm * vm_minus, 2), Frac::from_integer(0)))
}

/// The free-edge lemmas on a three-round labeled clique, with additive
/// slack `slack_c / k` where the argument drops linear terms.
pub fn check_free_edge_lemmas(labeled: &RoundLabeledClique, slack_c: f64) -> Result<Vec<LemmaCheck>, MatchError> {
    let c = Frac::approximate_float(slack_c)
        .filter(|c| *c >= Frac::from_integer(0))
        .ok_or_else(|| MatchError::Input(format!("slack constant {slack_c} is not a non-negative number")))?;
    let sig = signature(labeled)?;
    let k = labeled.k() as i64;
    let slack = c / k;
    let zero = Frac::from_integer(0);
    let two = Frac::from_integer(2);

    let q1 = labeled.queried_in(1);
    let deg1 = sig
        .c_tilde
        .iter()
        .map(|&v| q1.neighbors(v).iter().filter(|w| sig.v_m23.binary_search(w).is_ok()).count())
        .max()
        .unwrap_or(0);

    let cross = two * (sig.s1 + sig.d1) * (sig.s2 + sig.d2) + sig.m1_prime * (sig.s2 + two * sig.d2);
    let b2 = two * cross;
    let b3 = two * (two * sig.m[2] * (sig.s1 + sig.s2) + cross);
    Ok(vec![
        check(Lemma::FreeEdgesHalf, sig.free3.e_free, Frac::new(1, 2), slack),
        check(Lemma::Deg1Zero, Frac::from_integer(deg1 as i64), zero, zero),
        check(Lemma::FreeEdgeBound2, sig.free2.e_free, b2, slack),
        check(Lemma::FreeEdgeBound3, sig.free3.e_free, b3, slack),
    ])
}

pub fn verify_structure_lemmas(instance: &LemmaInstance, slack_c: f64) -> Result<Vec<LemmaCheck>, MatchError> {
    match instance {
        LemmaInstance::Graph(g) => Ok(vec![check_unmatched_edges(g)?]),
        LemmaInstance::Labeled(l) => check_free_edge_lemmas(l, slack_c),
    }
}
