//! Seeded G(n,½) oracle, round budgets and the query transcript.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::SimpleGraph;

/// Largest supported vertex count; a transcript entry packs `u`, `v` and the
/// answer bit into one `u64`.
pub const MAX_N: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid vertex count {0}: need 2 <= n <= 2^31")]
    InvalidSize(u64),
    #[error("invalid edge ({u},{v}) for n = {n}")]
    InvalidEdge { u: u64, v: u64, n: u64 },
    #[error("invalid exponent {0}: need 0 < x < 2")]
    InvalidExponent(f64),
    #[error("schedule has no rounds")]
    EmptySchedule,
    #[error("round {round}: {submitted} queries exceed the budget {budget} by {}", submitted - budget)]
    BudgetExceeded { round: usize, submitted: u64, budget: u64 },
    #[error("schedule exhausted: all {0} rounds used")]
    ScheduleExhausted(usize),
    #[error("oracle (n={n}, seed={seed}) does not match the transcript")]
    OracleMismatch { n: u64, seed: u64 },
    #[error("round index {upto} out of range: {used} rounds used")]
    RoundOutOfRange { upto: usize, used: usize },
    #[error("transcript line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An unordered vertex pair stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    u: u32,
    v: u32,
}

impl EdgeKey {
    pub fn new(a: u32, b: u32, n: u64) -> Result<Self, OracleError> {
        if a == b || a as u64 >= n || b as u64 >= n {
            return Err(OracleError::InvalidEdge { u: a as u64, v: b as u64, n });
        }
        Ok(Self::ordered(a, b))
    }

    /// Builds a key without range checks. Panics on a self-loop.
    pub fn ordered(a: u32, b: u32) -> Self {
        assert!(a != b, "self-loop {a}");
        if a < b {
            EdgeKey { u: a, v: b }
        } else {
            EdgeKey { u: b, v: a }
        }
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    fn packed(&self) -> u64 {
        ((self.u as u64) << 31) | self.v as u64
    }

    fn from_packed(key: u64) -> Self {
        EdgeKey { u: (key >> 31) as u32, v: (key & (MAX_N - 1)) as u32 }
    }
}

/// `⌊n^x⌋`, snapping to the nearest integer when `n^x` is within rounding
/// noise of it (so `(2^16)^0.5` is 256, not 255).
pub fn floor_pow(n: u64, x: f64) -> u64 {
    let p = (n as f64).powf(x);
    let r = p.round();
    if (p - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        p.floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    n: u64,
    exponents: Vec<f64>,
    budgets: Vec<u64>,
}

impl Schedule {
    pub fn new(n: u64, exponents: &[f64]) -> Result<Self, OracleError> {
        if !(2..=MAX_N).contains(&n) {
            return Err(OracleError::InvalidSize(n));
        }
        if exponents.is_empty() {
            return Err(OracleError::EmptySchedule);
        }
        let mut budgets = Vec::with_capacity(exponents.len());
        for &x in exponents {
            if !(x > 0.0 && x < 2.0) {
                return Err(OracleError::InvalidExponent(x));
            }
            budgets.push(floor_pow(n, x).max(1));
        }
        Ok(Schedule { n, exponents: exponents.to_vec(), budgets })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn budgets(&self) -> &[u64] {
        &self.budgets
    }

    pub fn rounds(&self) -> usize {
        self.budgets.len()
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Lazy G(n,½): the answer for `{u,v}` is one bit of a keyed mix of
/// `(seed, u, v)`, so nothing is materialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOracle {
    n: u64,
    seed: u64,
    key: u64,
}

impl QueryOracle {
    pub fn new(n: u64, seed: u64) -> Result<Self, OracleError> {
        if !(2..=MAX_N).contains(&n) {
            return Err(OracleError::InvalidSize(n));
        }
        Ok(QueryOracle { n, seed, key: mix64(seed ^ GOLDEN) })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn answer(&self, e: EdgeKey) -> bool {
        let h = mix64(self.key ^ mix64(e.packed().wrapping_add(GOLDEN)));
        h >> 63 == 1
    }
}

/// Answers of one round, sorted by `(u,v)`.
#[derive(Debug, Clone, Copy)]
pub struct RoundView<'a> {
    entries: &'a [u64],
}

impl<'a> RoundView<'a> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn answer(&self, e: EdgeKey) -> Option<bool> {
        lookup(self.entries, e.packed())
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, bool)> + 'a {
        self.entries.iter().map(|&x| (EdgeKey::from_packed(x >> 1), x & 1 == 1))
    }

    pub fn positives(&self) -> usize {
        self.entries.iter().filter(|&&x| x & 1 == 1).count()
    }
}

fn lookup(entries: &[u64], key: u64) -> Option<bool> {
    entries.binary_search_by(|x| (x >> 1).cmp(&key)).ok().map(|i| entries[i] & 1 == 1)
}

/// Per-round query sets and answers against one oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    n: u64,
    seed: u64,
    schedule: Schedule,
    rounds: Vec<Vec<u64>>,
}

impl Transcript {
    pub fn new(oracle: &QueryOracle, schedule: Schedule) -> Result<Self, OracleError> {
        if schedule.n() != oracle.n() {
            return Err(OracleError::OracleMismatch { n: oracle.n(), seed: oracle.seed() });
        }
        Ok(Transcript { n: oracle.n(), seed: oracle.seed(), schedule, rounds: Vec::new() })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn rounds_used(&self) -> usize {
        self.rounds.len()
    }

    /// Budget of the next round, if one is left.
    pub fn next_budget(&self) -> Option<u64> {
        self.schedule.budgets().get(self.rounds.len()).copied()
    }

    /// Submits one round of queries. Duplicates inside `edges` count once;
    /// pairs answered in an earlier round are re-answered from the transcript
    /// but still count against this round's budget.
    pub fn submit_round(
        &mut self,
        oracle: &QueryOracle,
        mut edges: Vec<EdgeKey>,
    ) -> Result<RoundView<'_>, OracleError> {
        if oracle.n() != self.n || oracle.seed() != self.seed {
            return Err(OracleError::OracleMismatch { n: oracle.n(), seed: oracle.seed() });
        }
        let round = self.rounds.len();
        let Some(budget) = self.next_budget() else {
            return Err(OracleError::ScheduleExhausted(self.schedule.rounds()));
        };
        edges.sort_unstable();
        edges.dedup();
        if edges.len() as u64 > budget {
            return Err(OracleError::BudgetExceeded {
                round: round + 1,
                submitted: edges.len() as u64,
                budget,
            });
        }
        if let Some(e) = edges.iter().find(|e| e.v() as u64 >= self.n) {
            return Err(OracleError::InvalidEdge { u: e.u() as u64, v: e.v() as u64, n: self.n });
        }
        let entries: Vec<u64> = edges
            .iter()
            .map(|&e| {
                let key = e.packed();
                let bit = self
                    .rounds
                    .iter()
                    .find_map(|r| lookup(r, key))
                    .unwrap_or_else(|| oracle.answer(e));
                (key << 1) | bit as u64
            })
            .collect();
        self.rounds.push(entries);
        Ok(RoundView { entries: &self.rounds[round] })
    }

    /// Round `i`, 1-based.
    pub fn round(&self, i: usize) -> Option<RoundView<'_>> {
        if i == 0 {
            return None;
        }
        self.rounds.get(i - 1).map(|r| RoundView { entries: r })
    }

    pub fn queries_per_round(&self) -> Vec<u64> {
        self.rounds.iter().map(|r| r.len() as u64).collect()
    }

    /// Answer for `e` from the earliest round that queried it.
    pub fn answer(&self, e: EdgeKey) -> Option<bool> {
        let key = e.packed();
        self.rounds.iter().find_map(|r| lookup(r, key))
    }

    /// First round (1-based) in which `e` was queried.
    pub fn first_round(&self, e: EdgeKey) -> Option<usize> {
        let key = e.packed();
        self.rounds.iter().position(|r| lookup(r, key).is_some()).map(|i| i + 1)
    }

    /// True when every pair of `vertices` was queried and answered positive.
    pub fn is_positive_clique(&self, vertices: &[u32]) -> bool {
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                if a == b || self.answer(EdgeKey::ordered(a, b)) != Some(true) {
                    return false;
                }
            }
        }
        true
    }

    /// Query graph Q_{≤upto} and positive graph G'_{≤upto}, both on `[n]`.
    pub fn extract_graphs(&self, upto: usize) -> Result<(SimpleGraph, SimpleGraph), OracleError> {
        if upto > self.rounds.len() {
            return Err(OracleError::RoundOutOfRange { upto, used: self.rounds.len() });
        }
        let n = self.n as usize;
        let mut all: Vec<u64> = self.rounds[..upto].iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup_by_key(|x| *x >> 1);
        let q = SimpleGraph::from_edges(n, all.iter().map(|&x| EdgeKey::from_packed(x >> 1)));
        let g = SimpleGraph::from_edges(
            n,
            all.iter().filter(|&&x| x & 1 == 1).map(|&x| EdgeKey::from_packed(x >> 1)),
        );
        Ok((q, g))
    }

    pub fn to_log(&self) -> TranscriptLog {
        TranscriptLog {
            n: self.n,
            seed: self.seed,
            rounds: self
                .rounds
                .iter()
                .map(|r| r.iter().map(|&x| (EdgeKey::from_packed(x >> 1), x & 1 == 1)).collect())
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_log().to_text()
    }

    /// Rebuilds a transcript from a parsed log, rejecting logs that break the
    /// schedule.
    pub fn from_log(log: &TranscriptLog, schedule: Schedule) -> Result<Self, OracleError> {
        if schedule.n() != log.n {
            return Err(OracleError::OracleMismatch { n: log.n, seed: log.seed });
        }
        if log.rounds.len() > schedule.rounds() {
            return Err(OracleError::ScheduleExhausted(schedule.rounds()));
        }
        for (i, r) in log.rounds.iter().enumerate() {
            if r.len() as u64 > schedule.budgets()[i] {
                return Err(OracleError::BudgetExceeded {
                    round: i + 1,
                    submitted: r.len() as u64,
                    budget: schedule.budgets()[i],
                });
            }
        }
        let rounds = log
            .rounds
            .iter()
            .map(|r| r.iter().map(|&(e, b)| (e.packed() << 1) | b as u64).collect())
            .collect();
        Ok(Transcript { n: log.n, seed: log.seed, schedule, rounds })
    }

    /// Post-hoc check of budgets, cross-round consistency and (optionally)
    /// agreement of first answers with the oracle.
    pub fn audit(&self, oracle: Option<&QueryOracle>) -> TranscriptAudit {
        self.to_log().audit(self.schedule.budgets(), oracle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptAudit {
    pub budgets_ok: bool,
    pub consistent: bool,
    pub oracle_agrees: Option<bool>,
    pub problems: Vec<String>,
}

impl TranscriptAudit {
    pub fn ok(&self) -> bool {
        self.budgets_ok && self.consistent && self.oracle_agrees != Some(false)
    }
}

/// Plain form of a transcript as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptLog {
    pub n: u64,
    pub seed: u64,
    pub rounds: Vec<Vec<(EdgeKey, bool)>>,
}

impl TranscriptLog {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.n, self.seed, self.rounds.len()).unwrap();
        for (i, r) in self.rounds.iter().enumerate() {
            writeln!(s, "round {} {}", i + 1, r.len()).unwrap();
            for (e, b) in r {
                writeln!(s, "{} {} {}", e.u(), e.v(), *b as u8).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, OracleError> {
        let err = |line: usize, msg: &str| OracleError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (ln, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let h: Vec<&str> = header.split(' ').collect();
        if h.len() != 3 {
            return Err(err(ln, "header must be `n seed rounds`"));
        }
        let n: u64 = parse_num(h[0]).ok_or_else(|| err(ln, "bad n"))?;
        let seed: u64 = parse_num(h[1]).ok_or_else(|| err(ln, "bad seed"))?;
        let count: usize = parse_num(h[2]).ok_or_else(|| err(ln, "bad round count"))?;
        if !(2..=MAX_N).contains(&n) {
            return Err(err(ln, "n out of range"));
        }
        let mut rounds = Vec::with_capacity(count);
        for i in 1..=count {
            let (ln, line) = lines.next().ok_or_else(|| err(0, "missing round header"))?;
            let p: Vec<&str> = line.split(' ').collect();
            if p.len() != 3 || p[0] != "round" || parse_num::<usize>(p[1]) != Some(i) {
                return Err(err(ln, &format!("expected `round {i} count`")));
            }
            let m: usize = parse_num(p[2]).ok_or_else(|| err(ln, "bad count"))?;
            let mut r: Vec<(EdgeKey, bool)> = Vec::with_capacity(m);
            for _ in 0..m {
                let (ln, line) = lines.next().ok_or_else(|| err(0, "truncated round"))?;
                let t: Vec<&str> = line.split(' ').collect();
                if t.len() != 3 {
                    return Err(err(ln, "expected `u v bit`"));
                }
                let u: u32 = parse_num(t[0]).ok_or_else(|| err(ln, "bad u"))?;
                let v: u32 = parse_num(t[1]).ok_or_else(|| err(ln, "bad v"))?;
                let b = match t[2] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(err(ln, "answer must be 0 or 1")),
                };
                if u >= v || v as u64 >= n {
                    return Err(err(ln, "need u < v < n"));
                }
                let e = EdgeKey { u, v };
                if let Some(&(prev, _)) = r.last() {
                    if prev >= e {
                        return Err(err(ln, "entries must be strictly sorted by (u,v)"));
                    }
                }
                r.push((e, b));
            }
            rounds.push(r);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, "trailing data"));
        }
        if !text.ends_with('\n') {
            return Err(err(0, "missing final newline"));
        }
        Ok(TranscriptLog { n, seed, rounds })
    }

    pub fn audit(&self, budgets: &[u64], oracle: Option<&QueryOracle>) -> TranscriptAudit {
        let mut problems = Vec::new();
        let mut budgets_ok = true;
        if self.rounds.len() > budgets.len() {
            budgets_ok = false;
            problems.push(format!("{} rounds but schedule has {}", self.rounds.len(), budgets.len()));
        }
        for (i, r) in self.rounds.iter().enumerate() {
            if let Some(&b) = budgets.get(i) {
                if r.len() as u64 > b {
                    budgets_ok = false;
                    problems.push(format!("round {}: {} queries > budget {}", i + 1, r.len(), b));
                }
            }
        }
        let mut seen: std::collections::HashMap<EdgeKey, bool> = std::collections::HashMap::new();
        let mut consistent = true;
        let mut agrees = true;
        for (i, r) in self.rounds.iter().enumerate() {
            for &(e, b) in r {
                match seen.get(&e) {
                    Some(&prev) if prev != b => {
                        consistent = false;
                        problems.push(format!("round {}: ({},{}) answered differently", i + 1, e.u(), e.v()));
                    }
                    Some(_) => {}
                    None => {
                        if let Some(o) = oracle {
                            if o.answer(e) != b {
                                agrees = false;
                                problems.push(format!("round {}: ({},{}) disagrees with oracle", i + 1, e.u(), e.v()));
                            }
                        }
                        seen.insert(e, b);
                    }
                }
            }
        }
        if let Some(o) = oracle {
            if o.n() != self.n || o.seed() != self.seed {
                agrees = false;
                problems.push("oracle parameters differ from transcript header".into());
            }
        }
        TranscriptAudit {
            budgets_ok,
            consistent,
            oracle_agrees: oracle.map(|_| agrees),
            problems,
        }
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Option<T> {
    // reject forms that would not survive a round trip ("+1", "01")
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) || !s.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(n: u64, x: &[f64]) -> Schedule {
        Schedule::new(n, x).unwrap()
    }

    #[test]
    fn create_rejects_small_n() {
        assert_eq!(QueryOracle::new(1, 0), Err(OracleError::InvalidSize(1)));
        assert!(QueryOracle::new(2, 0).is_ok());
    }

    #[test]
    fn same_edge_same_answer() {
        let o = QueryOracle::new(100, 7).unwrap();
        let e = EdgeKey::new(3, 41, 100).unwrap();
        assert_eq!(o.answer(e), o.answer(e));
        assert_eq!(EdgeKey::new(41, 3, 100).unwrap(), e);
    }

    #[test]
    fn seeds_give_different_streams() {
        let a = QueryOracle::new(100, 7).unwrap();
        let b = QueryOracle::new(100, 8).unwrap();
        let mut diff = 0;
        let mut total = 0;
        'outer: for u in 0..100u32 {
            for v in u + 1..100 {
                let e = EdgeKey::ordered(u, v);
                diff += (a.answer(e) != b.answer(e)) as usize;
                total += 1;
                if total == 10_000 {
                    break 'outer;
                }
            }
        }
        assert!(diff > 0);
    }

    #[test]
    fn positive_fraction_near_half() {
        // 1e5 fair coins: sd = 158, so [0.495,0.505] is a 3.16 sigma window
        let o = QueryOracle::new(10_000, 1).unwrap();
        let mut pos = 0u32;
        let mut count = 0u32;
        'outer: for u in 0..10_000u32 {
            for v in u + 1..10_000 {
                pos += o.answer(EdgeKey::ordered(u, v)) as u32;
                count += 1;
                if count == 100_000 {
                    break 'outer;
                }
            }
        }
        let frac = pos as f64 / count as f64;
        assert!((0.495..=0.505).contains(&frac), "{frac}");
    }

    #[test]
    fn edge_key_validation() {
        assert!(EdgeKey::new(3, 3, 10).is_err());
        assert!(EdgeKey::new(3, 10, 10).is_err());
        let e = EdgeKey::new(9, 2, 10).unwrap();
        assert_eq!((e.u(), e.v()), (2, 9));
    }

    #[test]
    fn floor_pow_snaps_exact_powers() {
        assert_eq!(floor_pow(1 << 16, 0.5), 256);
        assert_eq!(floor_pow(1 << 16, 0.25), 16);
        assert_eq!(floor_pow(1 << 20, 1.2 / 6.0), 16);
        assert_eq!(floor_pow(100, 1.0), 100);
        assert_eq!(floor_pow(10, 0.5), 3);
    }

    #[test]
    fn budget_violation_names_round_and_overflow() {
        let o = QueryOracle::new(100, 7).unwrap();
        let mut t = Transcript::new(&o, sched(100, &[1.0])).unwrap();
        let mut edges = Vec::new();
        'outer: for u in 0..100u32 {
            for v in u + 1..100 {
                edges.push(EdgeKey::ordered(u, v));
                if edges.len() == 101 {
                    break 'outer;
                }
            }
        }
        let err = t.submit_round(&o, edges).unwrap_err();
        assert_eq!(err, OracleError::BudgetExceeded { round: 1, submitted: 101, budget: 100 });
        assert!(err.to_string().contains("by 1"));
        assert_eq!(t.rounds_used(), 0);
    }

    #[test]
    fn empty_round_is_consumed() {
        let o = QueryOracle::new(100, 7).unwrap();
        let mut t = Transcript::new(&o, sched(100, &[1.0])).unwrap();
        assert!(t.submit_round(&o, vec![]).unwrap().is_empty());
        assert_eq!(t.rounds_used(), 1);
        assert_eq!(t.submit_round(&o, vec![]).unwrap_err(), OracleError::ScheduleExhausted(1));
    }

    #[test]
    fn requery_same_answer() {
        let o = QueryOracle::new(100, 7).unwrap();
        let mut t = Transcript::new(&o, sched(100, &[1.0, 1.0])).unwrap();
        let e = EdgeKey::ordered(4, 5);
        let a1 = t.submit_round(&o, vec![e]).unwrap().answer(e).unwrap();
        let a2 = t.submit_round(&o, vec![e, e]).unwrap().answer(e).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(t.queries_per_round(), vec![1, 1]);
        assert!(t.audit(Some(&o)).ok());
    }

    #[test]
    fn mismatched_oracle_rejected() {
        let o = QueryOracle::new(100, 7).unwrap();
        let other = QueryOracle::new(100, 8).unwrap();
        let mut t = Transcript::new(&o, sched(100, &[1.0])).unwrap();
        assert!(matches!(t.submit_round(&other, vec![]), Err(OracleError::OracleMismatch { .. })));
    }

    #[test]
    fn extract_graphs_basic() {
        let o = QueryOracle::new(10, 3).unwrap();
        let mut t = Transcript::new(&o, sched(10, &[1.0])).unwrap();
        let (q, g) = t.extract_graphs(0).unwrap();
        assert_eq!((q.edge_count(), g.edge_count()), (0, 0));
        assert!(t.extract_graphs(1).is_err());
        // pick a pair the oracle answers positively
        let e = (1..10u32).map(|v| EdgeKey::ordered(0, v)).find(|&e| o.answer(e)).unwrap();
        t.submit_round(&o, vec![e]).unwrap();
        let (q, g) = t.extract_graphs(1).unwrap();
        assert_eq!((q.edge_count(), g.edge_count()), (1, 1));
        assert_eq!(q.n(), 10);
    }

    #[test]
    fn positive_graph_counts_positive_answers() {
        let o = QueryOracle::new(1000, 11).unwrap();
        let mut t = Transcript::new(&o, sched(1000, &[1.0, 1.0])).unwrap();
        let r1: Vec<EdgeKey> = (1..1000u32).map(|v| EdgeKey::ordered(0, v)).collect();
        let r2: Vec<EdgeKey> = (2..1000u32).map(|v| EdgeKey::ordered(1, v)).chain([EdgeKey::ordered(0, 1)]).collect();
        t.submit_round(&o, r1).unwrap();
        t.submit_round(&o, r2).unwrap();
        let (q, g) = t.extract_graphs(2).unwrap();
        // recount from the stored answers, counting each pair once
        let mut seen = std::collections::BTreeMap::new();
        for i in 1..=2 {
            for (e, b) in t.round(i).unwrap().iter() {
                seen.entry(e).or_insert(b);
            }
        }
        assert_eq!(q.edge_count(), seen.len());
        assert_eq!(g.edge_count(), seen.values().filter(|&&b| b).count());
    }

    #[test]
    fn text_round_trip() {
        let o = QueryOracle::new(50, 99).unwrap();
        let mut t = Transcript::new(&o, sched(50, &[1.0, 1.0, 1.0])).unwrap();
        t.submit_round(&o, (1..30u32).map(|v| EdgeKey::ordered(0, v)).collect()).unwrap();
        t.submit_round(&o, vec![]).unwrap();
        t.submit_round(&o, (5..40u32).map(|v| EdgeKey::ordered(v, 3)).collect()).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("50 99 3\nround 1 29\n0 1 "));
        let log = TranscriptLog::from_text(&text).unwrap();
        assert_eq!(log.to_text(), text);
        let back = Transcript::from_log(&log, sched(50, &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn parse_rejects_noncanonical() {
        assert!(TranscriptLog::from_text("10 1 1\nround 1 2\n2 3 1\n1 2 0\n").is_err());
        assert!(TranscriptLog::from_text("10 1 1\nround 1 1\n3 2 1\n").is_err());
        assert!(TranscriptLog::from_text("10 1 1\nround 1 1\n2 3 2\n").is_err());
        assert!(TranscriptLog::from_text("10 01 0\n").is_err());
        assert!(TranscriptLog::from_text("10 1 0\nextra\n").is_err());
        assert!(TranscriptLog::from_text("10 1 0").is_err());
        assert!(TranscriptLog::from_text("10 1 0\n").is_ok());
    }

    #[test]
    fn audit_flags_inconsistency_and_budget() {
        let e = EdgeKey::ordered(0, 1);
        let log = TranscriptLog { n: 4, seed: 0, rounds: vec![vec![(e, true)], vec![(e, false)]] };
        let a = log.audit(&[1, 1], None);
        assert!(a.budgets_ok && !a.consistent);
        let a = log.audit(&[0, 1], None);
        assert!(!a.budgets_ok);
    }
}
