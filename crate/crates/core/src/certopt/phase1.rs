//! Adaptive hypercube elimination for the restricted problem over
//! `(s₁, s̃₂, d̃₂, δ) ∈ [0,½]³ × [1,2]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::interval::{Box4, Interval};
use super::lipschitz::PADDED_SUM;
use super::problem::{gap, restricted_constraints, restricted_parts};
use super::CertError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phase1Config {
    pub eps_target: f64,
    /// Initial edge; a power of two no larger than ½.
    pub eps0: f64,
    pub slack: f64,
    pub l2: f64,
    pub l3: f64,
}

/// A dyadic cube: edge `eps0 / 2^level`, lower corner `ix · edge` on the
/// `s` axes and `1 + ix₃ · edge` on the δ axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub level: u8,
    pub ix: [u32; 4],
}

impl Cell {
    pub fn edge(&self, eps0: f64) -> f64 {
        eps0 / (1u64 << self.level) as f64
    }

    pub fn to_box(&self, eps0: f64) -> Box4 {
        let e = self.edge(eps0);
        Box4(std::array::from_fn(|j| {
            let base = if j == 3 { 1.0 } else { 0.0 };
            let lo = base + self.ix[j] as f64 * e;
            Interval::new(lo, base + (self.ix[j] + 1) as f64 * e)
        }))
    }

    pub fn children(&self) -> [Cell; 16] {
        std::array::from_fn(|mask| Cell {
            level: self.level + 1,
            ix: std::array::from_fn(|j| 2 * self.ix[j] + (mask as u32 >> j & 1)),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Phase1Stats {
    pub evaluated: u64,
    pub pruned_infeasible: u64,
    pub eliminated_by_alpha2: u64,
    pub eliminated_by_alpha3: u64,
    pub split: u64,
    pub survivors: u64,
    /// Boxes handled at each level, starting from `eps0`.
    pub per_level: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase1Result {
    pub config: Phase1Config,
    pub stats: Phase1Stats,
    pub survivors: Vec<Cell>,
    #[serde(skip)]
    pub eliminated: Vec<Cell>,
}

enum Outcome {
    Pruned,
    Eliminated(usize),
    Split,
    Survives,
}

/// No point of the box satisfies the domain constraints.
fn box_infeasible(b: &Box4) -> bool {
    let [s1, s2, d2, d] = b.0;
    let sum_lo = s1.lo + s2.lo + d2.lo;
    let reach = (Interval::point(2.0) * s1 + s2 + Interval::point(2.0) * d2).hi;
    // the gap is decreasing in δ, so its smallest value is at δ.hi
    let need = gap(Interval::point(d.hi)).lo;
    sum_lo > 0.5 || reach < need
}

fn classify(cell: &Cell, cfg: &Phase1Config, last: bool) -> Outcome {
    let b = cell.to_box(cfg.eps0);
    if box_infeasible(&b) {
        return Outcome::Pruned;
    }
    let y = b.center();
    if y[0] + y[1] + y[2] > PADDED_SUM {
        return if last { Outcome::Survives } else { Outcome::Split };
    }
    let r = Interval::point(b.half_diagonal());
    let thr = (Interval::point(1.0) + Interval::point(0.5) * Interval::point(b.0[3].lo) + Interval::point(cfg.slack)).lo;
    let parts = restricted_parts(y.map(Interval::point));
    for (i, l) in [cfg.l2, cfg.l3].into_iter().enumerate() {
        let (f, g) = parts[i];
        let bound = f / g + Interval::point(l) * r;
        if bound.hi <= thr {
            return Outcome::Eliminated(i);
        }
    }
    if last {
        Outcome::Survives
    } else {
        Outcome::Split
    }
}

fn validate(cfg: &Phase1Config) -> Result<(), CertError> {
    let k = (1.0 / cfg.eps0).log2();
    if !(cfg.eps0 > 0.0 && cfg.eps0 <= 0.5 && k.fract() == 0.0) {
        return Err(CertError::Invalid(format!("eps0 = {} must be 2^-k with k >= 1", cfg.eps0)));
    }
    if !(cfg.eps_target > 0.0 && cfg.eps_target <= cfg.eps0) {
        return Err(CertError::Invalid(format!("eps_target = {} must lie in (0, eps0]", cfg.eps_target)));
    }
    if !(cfg.slack >= 0.0) {
        return Err(CertError::Invalid(format!("slack = {} must be non-negative", cfg.slack)));
    }
    if !(cfg.l2 > 0.0 && cfg.l3 > 0.0) {
        return Err(CertError::Invalid("Lipschitz constants must be positive".into()));
    }
    Ok(())
}

/// Level-synchronous elimination. Each level is classified in parallel and
/// collected in input order, so the output does not depend on scheduling.
pub fn phase1_eliminate(cfg: &Phase1Config) -> Result<Phase1Result, CertError> {
    validate(cfg)?;
    let ns = (0.5 / cfg.eps0).round() as u32;
    let nd = (1.0 / cfg.eps0).round() as u32;
    let mut level: Vec<Cell> = Vec::new();
    for a in 0..ns {
        for b in 0..ns {
            for c in 0..ns {
                for d in 0..nd {
                    level.push(Cell { level: 0, ix: [a, b, c, d] });
                }
            }
        }
    }
    let mut stats = Phase1Stats::default();
    let mut survivors = Vec::new();
    let mut eliminated = Vec::new();
    let mut edge = cfg.eps0;
    while !level.is_empty() {
        let last = edge <= cfg.eps_target;
        let outcomes: Vec<Outcome> = level.par_iter().map(|c| classify(c, cfg, last)).collect();
        stats.per_level.push(level.len() as u64);
        let mut next = Vec::new();
        for (cell, o) in level.iter().zip(outcomes) {
            match o {
                Outcome::Pruned => stats.pruned_infeasible += 1,
                Outcome::Eliminated(i) => {
                    stats.evaluated += 1;
                    if i == 0 {
                        stats.eliminated_by_alpha2 += 1;
                    } else {
                        stats.eliminated_by_alpha3 += 1;
                    }
                    eliminated.push(*cell);
                }
                Outcome::Split => {
                    stats.evaluated += 1;
                    stats.split += 1;
                    next.extend(cell.children());
                }
                Outcome::Survives => {
                    stats.evaluated += 1;
                    stats.survivors += 1;
                    survivors.push(*cell);
                }
            }
        }
        level = next;
        edge *= 0.5;
    }
    Ok(Phase1Result { config: *cfg, stats, survivors, eliminated })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub samples: u64,
    pub violations: u64,
    /// Largest `min{α₂,α₃} − (1+δ/2+slack)` seen; negative when all pass.
    pub max_excess: f64,
    pub worst_point: [f64; 4],
}

/// Uniform random points in eliminated boxes (intersected with the
/// domain), checked against `min{α₂,α₃} ≤ 1+δ/2+slack`. Half the draws pick
/// a box uniformly, half by volume.
pub fn audit_eliminated(result: &Phase1Result, samples: u64, seed: u64) -> AuditReport {
    let mut report = AuditReport { samples: 0, violations: 0, max_excess: f64::NEG_INFINITY, worst_point: [0.0; 4] };
    let cells = &result.eliminated;
    if cells.is_empty() || samples == 0 {
        return report;
    }
    let eps0 = result.config.eps0;
    let mut cum = Vec::with_capacity(cells.len());
    let mut total = 0.0;
    for c in cells {
        total += c.edge(eps0).powi(4);
        cum.push(total);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = 0u64;
    while report.samples < samples && draw < samples.saturating_mul(100) {
        draw += 1;
        let idx = if draw % 2 == 0 {
            rng.gen_range(0..cells.len())
        } else {
            let u = rng.gen_range(0.0..total);
            cum.partition_point(|&w| w <= u).min(cells.len() - 1)
        };
        let b = cells[idx].to_box(eps0);
        for _ in 0..64 {
            let x: [f64; 4] = std::array::from_fn(|j| rng.gen_range(b.0[j].lo..=b.0[j].hi));
            if restricted_constraints(x).iter().any(|(_, v)| *v < 0.0) {
                continue;
            }
            let a = restricted_parts(x).map(|(f, g)| f / g);
            let excess = a[0].min(a[1]) - (1.0 + 0.5 * x[3] + result.config.slack);
            report.samples += 1;
            if excess > report.max_excess {
                report.max_excess = excess;
                report.worst_point = x;
            }
            if excess > 1e-12 {
                report.violations += 1;
            }
            break;
        }
    }
    report
}
