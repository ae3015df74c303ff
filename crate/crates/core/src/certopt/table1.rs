//! Multi-start solver for the unrestricted three-round problem.

use rayon::prelude::*;
use serde::Serialize;

use super::phase2::{min_alpha_unrestricted, run_max_t, MaxTProblem, Phase2Status, MAX_T_NAMES};
use super::problem::{unrestricted_constraints, FEAS_TOL};
use super::sqp::Nlp;
use super::CertError;

pub const TABLE1_DELTAS: [f64; 10] = [1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Options {
    pub net_eps: f64,
    pub enforce_cap: bool,
    /// Number of best runs that get a local restart grid.
    pub refine_top: usize,
}

impl Default for Table1Options {
    fn default() -> Self {
        Table1Options { net_eps: 0.05, enforce_cap: false, refine_top: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Result {
    pub delta: f64,
    pub alpha_bound: f64,
    pub best_point: [f64; 4],
    pub starts: usize,
    pub converged: usize,
    pub failed: usize,
    pub active: Vec<String>,
    pub enforce_cap: bool,
    pub net_eps: f64,
    /// Always false: this is the best local value found.
    pub certified_global: bool,
}

fn linearly_feasible(y: [f64; 4], delta: f64, cap: bool) -> bool {
    let c = unrestricted_constraints(y, delta);
    let used = if cap { &c[..] } else { &c[..6] };
    used.iter().all(|(_, v)| *v >= -FEAS_TOL)
}

fn net(step: f64, delta: f64, cap: bool) -> Vec<[f64; 4]> {
    let k = (0.5 / step + 1e-9).floor() as usize;
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for c in 0..=k {
                for d in 0..=k {
                    let y = [a, b, c, d].map(|i| i as f64 * step);
                    if linearly_feasible(y, delta, cap) {
                        out.push(y);
                    }
                }
            }
        }
    }
    out
}

struct Run {
    value: f64,
    point: [f64; 4],
    ok: bool,
}

fn run_all(starts: &[[f64; 4]], delta: f64, cap: bool) -> Vec<Run> {
    starts
        .par_iter()
        .map(|&s| {
            let r = run_max_t(s, delta, cap, [0.0; 4], [0.5; 4]);
            let point = [r.point[0], r.point[1], r.point[2], r.point[3]];
            let ok = r.status == Phase2Status::Converged && linearly_feasible(point, delta, cap);
            Run { value: r.value, point, ok }
        })
        .collect()
}

fn best_index(runs: &[Run]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in runs.iter().enumerate() {
        if r.ok && best.map_or(true, |b| r.value > runs[b].value) {
            best = Some(i);
        }
    }
    best
}

pub fn solve_table1(delta: f64, opt: &Table1Options) -> Result<Table1Result, CertError> {
    if !(1.0..2.0).contains(&delta) {
        return Err(CertError::Invalid(format!("delta = {delta} outside [1, 2)")));
    }
    if !(opt.net_eps > 0.0 && opt.net_eps <= 0.25) {
        return Err(CertError::Invalid(format!("net_eps = {} outside (0, 0.25]", opt.net_eps)));
    }
    let cap = opt.enforce_cap;
    let starts = net(opt.net_eps, delta, cap);
    let mut runs = run_all(&starts, delta, cap);

    let mut order: Vec<usize> = (0..runs.len()).filter(|&i| runs[i].ok).collect();
    order.sort_by(|&a, &b| runs[b].value.total_cmp(&runs[a].value).then(a.cmp(&b)));
    let h = opt.net_eps / 4.0;
    let mut local = Vec::new();
    for &i in order.iter().take(opt.refine_top) {
        let p = runs[i].point;
        for mask in 0..81usize {
            let mut m = mask;
            let y: [f64; 4] = std::array::from_fn(|j| {
                let step = (m % 3) as f64 - 1.0;
                m /= 3;
                (p[j] + step * h).clamp(0.0, 0.5)
            });
            if linearly_feasible(y, delta, cap) {
                local.push(y);
            }
        }
    }
    runs.extend(run_all(&local, delta, cap));

    let total = starts.len() + local.len();
    let converged = runs.iter().filter(|r| r.ok).count();
    let Some(b) = best_index(&runs) else {
        return Err(CertError::Invalid(format!("no run converged at delta = {delta}")));
    };
    let best = &runs[b];
    Ok(Table1Result {
        delta,
        alpha_bound: best.value,
        best_point: best.point,
        starts: total,
        converged,
        failed: total - converged,
        active: active_constraints(best.point, best.value, delta, cap),
        enforce_cap: cap,
        net_eps: opt.net_eps,
        certified_global: false,
    })
}

fn active_constraints(y: [f64; 4], t: f64, delta: f64, cap: bool) -> Vec<String> {
    let p = MaxTProblem { delta, enforce_cap: cap, lo: [0.0; 5], hi: [0.5, 0.5, 0.5, 0.5, 2.0] };
    let mut cons = Vec::new();
    p.eval([y[0], y[1], y[2], y[3], t], &mut cons);
    let dom = unrestricted_constraints(y, delta);
    let mut names: Vec<&str> = MAX_T_NAMES.to_vec();
    names.extend([dom[4].0, dom[5].0]);
    if cap {
        names.push(dom[6].0);
    }
    let mut out: Vec<String> = names.iter().zip(&cons).filter(|(_, v)| v.abs() <= 1e-7).map(|(n, _)| n.to_string()).collect();
    for (n, v) in dom[..4].iter() {
        if v.abs() <= 1e-9 {
            out.push(n.to_string());
        }
    }
    out
}

/// Value of an explicit point, for floors and oracles.
pub fn table1_point_value(y: [f64; 4], delta: f64, cap: bool) -> Option<f64> {
    linearly_feasible(y, delta, cap).then(|| min_alpha_unrestricted(y, delta))
}
