//! Local refinement of a box with the SQP optimizer.
//!
//! For the restricted problem the box is searched for points with
//! `α₂, α₃ ≥ 1+δ/2` that are as far as possible from γ (or from `v`); a
//! maximum at distance zero means no such point exists off the locus.

use serde::Serialize;

use super::interval::Box4;
use super::kkt::{kkt_residual, KktReport};
use super::problem::{dist_gamma, dist_v, gap, restricted_parts, unrestricted_constraints, unrestricted_parts};
use super::scalar::Scalar;
use super::sqp::{solve_sqp, Nlp, SqpOptions, SqpStatus};

/// A maximum this close to γ or `v` counts as on it.
pub const ON_LOCUS_TOL: f64 = 1e-6;
/// Required first-order residual.
pub const KKT_TOL: f64 = 1e-6;
const ACTIVE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    DistGamma,
    DistV,
    /// The unrestricted problem at fixed δ over `(s₁, s̃₂, d̃₂, m₁′)`.
    MaxT { delta: f64, enforce_cap: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase2Status {
    /// Distance objectives: the maximum lies on γ or at `v`.
    OnLocus,
    /// Distance objectives: a feasible point off the locus was found.
    OffLocus,
    NoFeasiblePoint,
    /// `MaxT`: a KKT point was found.
    Converged,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase2Result {
    pub objective: Objective,
    pub start: Vec<f64>,
    pub point: Vec<f64>,
    /// Distance to the locus, or `min{α₁,α₂,α₃}` for `MaxT`.
    pub value: f64,
    pub kkt: KktReport,
    pub sqp_status: SqpStatus,
    pub iterations: usize,
    pub status: Phase2Status,
}

struct DistProblem {
    to_v: bool,
    lo: [f64; 4],
    hi: [f64; 4],
}

impl Nlp<4> for DistProblem {
    fn eval<T: Scalar>(&self, x: [T; 4], cons: &mut Vec<T>) -> T {
        let [s1, s2, d2, delta] = x;
        let target = T::cst(1.0) + T::cst(0.5) * delta;
        for (f, g) in restricted_parts(x) {
            cons.push(f - target * g);
        }
        cons.push(T::cst(0.5) - (s1 + s2 + d2));
        cons.push(T::cst(2.0) * s1 + s2 + T::cst(2.0) * d2 - gap(delta));
        let d = if self.to_v { dist_v(x) } else { dist_gamma(x) };
        -d
    }
    fn bounds(&self) -> ([f64; 4], [f64; 4]) {
        (self.lo, self.hi)
    }
}

pub(crate) struct MaxTProblem {
    pub delta: f64,
    pub enforce_cap: bool,
    pub lo: [f64; 5],
    pub hi: [f64; 5],
}

pub(crate) const MAX_T_NAMES: [&str; 3] = ["t <= alpha1", "t <= alpha2", "t <= alpha3"];

impl Nlp<5> for MaxTProblem {
    fn eval<T: Scalar>(&self, x: [T; 5], cons: &mut Vec<T>) -> T {
        let y = [x[0], x[1], x[2], x[3]];
        let t = x[4];
        let delta = T::cst(self.delta);
        for (f, g) in unrestricted_parts(y, delta) {
            cons.push(f - t * g);
        }
        let dom = unrestricted_constraints(y, delta);
        // the first four are the bounds
        cons.push(dom[4].1);
        cons.push(dom[5].1);
        if self.enforce_cap {
            cons.push(dom[6].1);
        }
        -t
    }
    fn bounds(&self) -> ([f64; 5], [f64; 5]) {
        (self.lo, self.hi)
    }
}

/// `min{α₁,α₂,α₃}` of the unrestricted problem (no feasibility check).
pub(crate) fn min_alpha_unrestricted(y: [f64; 4], delta: f64) -> f64 {
    unrestricted_parts(y, delta).iter().map(|(f, g)| f / g).fold(f64::INFINITY, f64::min)
}

pub(crate) fn run_max_t(start: [f64; 4], delta: f64, enforce_cap: bool, lo4: [f64; 4], hi4: [f64; 4]) -> Phase2Result {
    let mut lo = [0.0; 5];
    let mut hi = [2.0; 5];
    lo[..4].copy_from_slice(&lo4);
    hi[..4].copy_from_slice(&hi4);
    let p = MaxTProblem { delta, enforce_cap, lo, hi };
    let t0 = min_alpha_unrestricted(start, delta);
    let t0 = if t0.is_finite() { t0.clamp(0.0, 2.0) } else { 0.0 };
    let x0 = [start[0], start[1], start[2], start[3], t0];
    let r = solve_sqp(&p, x0, &SqpOptions::default());
    let kkt = kkt_residual(&p, r.x, ACTIVE_TOL);
    let point: Vec<f64> = r.x[..4].to_vec();
    let value = min_alpha_unrestricted([r.x[0], r.x[1], r.x[2], r.x[3]], delta);
    let status = match r.status {
        SqpStatus::Converged if kkt.residual <= KKT_TOL => Phase2Status::Converged,
        SqpStatus::Infeasible => Phase2Status::NoFeasiblePoint,
        _ => Phase2Status::NotConverged,
    };
    Phase2Result {
        objective: Objective::MaxT { delta, enforce_cap },
        start: x0.to_vec(),
        point,
        value,
        kkt,
        sqp_status: r.status,
        iterations: r.iterations,
        status,
    }
}

/// Runs the optimizer from the box center with the box (clipped to the
/// domain) as bounds.
pub fn phase2_refine(b: &Box4, objective: Objective) -> Phase2Result {
    let y = b.center();
    match objective {
        Objective::DistGamma | Objective::DistV => {
            let lo: [f64; 4] = std::array::from_fn(|j| b.0[j].lo.max(if j == 3 { 1.0 } else { 0.0 }));
            let hi: [f64; 4] = std::array::from_fn(|j| b.0[j].hi.min(if j == 3 { 2.0 } else { 0.5 }));
            let p = DistProblem { to_v: objective == Objective::DistV, lo, hi };
            let r = solve_sqp(&p, y, &SqpOptions::default());
            let kkt = kkt_residual(&p, r.x, ACTIVE_TOL);
            let value = (-r.objective).max(0.0).sqrt();
            let status = match r.status {
                SqpStatus::Infeasible => Phase2Status::NoFeasiblePoint,
                SqpStatus::Converged if kkt.residual <= KKT_TOL => {
                    if value <= ON_LOCUS_TOL {
                        Phase2Status::OnLocus
                    } else {
                        Phase2Status::OffLocus
                    }
                }
                _ => Phase2Status::NotConverged,
            };
            Phase2Result {
                objective,
                start: y.to_vec(),
                point: r.x.to_vec(),
                value,
                kkt,
                sqp_status: r.status,
                iterations: r.iterations,
                status,
            }
        }
        Objective::MaxT { delta, enforce_cap } => {
            let lo = b.0.map(|i| i.lo.max(0.0));
            let hi = b.0.map(|i| i.hi.min(0.5));
            run_max_t(y, delta, enforce_cap, lo, hi)
        }
    }
}

/// The closer of the two loci to `x` and the distance to it.
pub(crate) fn nearest_locus(x: [f64; 4]) -> (Objective, f64) {
    let g = dist_gamma(x).sqrt();
    let v = dist_v(x).sqrt();
    if g <= v {
        (Objective::DistGamma, g)
    } else {
        (Objective::DistV, v)
    }
}
