//! Phase 1 + phase 2 pipeline for the restricted three-round problem.

use rayon::prelude::*;
use serde::Serialize;

use super::interval::{Box4, Interval};
use super::lipschitz::{lipschitz_constants, LipschitzReport};
use super::phase1::{audit_eliminated, phase1_eliminate, AuditReport, Phase1Config, Phase1Result, Phase1Stats};
use super::phase2::{nearest_locus, phase2_refine, Objective, Phase2Result, Phase2Status, ON_LOCUS_TOL};
use super::problem::{gamma_point, V_POINT};
use super::CertError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub eps_target: f64,
    pub eps0: f64,
    pub slack: f64,
    pub audit_samples: u64,
    pub audit_seed: u64,
    /// δ values at which an extra phase-2 run starts beside γ(δ); a run
    /// beside `v` is added when non-empty.
    pub probe_deltas: Vec<f64>,
    /// Edge of the probe boxes.
    pub probe_edge: f64,
}

impl VerifyConfig {
    /// Desk-scale defaults: `ε_target = slack / L₃`, `ε₀ = 1/8`.
    pub fn desk(slack: f64) -> Self {
        VerifyConfig {
            eps_target: slack / super::lipschitz::L3,
            eps0: 0.125,
            slack,
            audit_samples: 100_000,
            audit_seed: 1,
            probe_deltas: vec![1.0, 1.2, 1.4, 1.6, 1.8, 2.0],
            probe_edge: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStatus {
    Certified,
    /// Some phase-2 run did not converge, found an off-locus point, or the
    /// audit found a violation.
    Incomplete,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Phase2Summary {
    pub on_locus: usize,
    pub no_feasible_point: usize,
    pub off_locus: usize,
    pub not_converged: usize,
}

impl Phase2Summary {
    fn of(runs: &[Phase2Result]) -> Self {
        let mut s = Phase2Summary::default();
        for r in runs {
            match r.status {
                Phase2Status::OnLocus => s.on_locus += 1,
                Phase2Status::NoFeasiblePoint => s.no_feasible_point += 1,
                Phase2Status::OffLocus => s.off_locus += 1,
                Phase2Status::Converged | Phase2Status::NotConverged => s.not_converged += 1,
            }
        }
        s
    }

    fn clean(&self) -> bool {
        self.off_locus == 0 && self.not_converged == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub problem: &'static str,
    pub delta_range: [f64; 2],
    pub eps_target: f64,
    pub eps0: f64,
    pub slack: f64,
    pub l2: f64,
    pub l3: f64,
    pub lipschitz: LipschitzReport,
    pub phase1: Phase1Stats,
    /// Largest distance from a surviving box center to γ or `v`.
    pub survivor_max_distance: f64,
    pub phase2: Vec<Phase2Result>,
    pub phase2_summary: Phase2Summary,
    pub probes: Vec<Phase2Result>,
    pub probe_summary: Phase2Summary,
    pub audit: AuditReport,
    pub status: VerifyStatus,
    pub statement: String,
    #[serde(skip)]
    pub survivor_centers: Vec<[f64; 4]>,
}

fn probe_box(center: [f64; 4], edge: f64) -> Box4 {
    // start off the locus, inside the domain
    let h = 0.5 * edge;
    let c = [center[0] + 0.3 * h, center[1] - 0.2 * h, center[2] + 0.4 * h, center[3]];
    Box4(std::array::from_fn(|j| {
        let (lo, hi) = if j == 3 { (1.0, 2.0) } else { (0.0, 0.5) };
        Interval::new((c[j] - h).max(lo), (c[j] + h).min(hi))
    }))
}

pub fn verify_lemma_c1(cfg: &VerifyConfig) -> Result<(OptimizationReport, Phase1Result), CertError> {
    let lipschitz = lipschitz_constants();
    let (l2, l3) = lipschitz.constants()?;
    let p1cfg = Phase1Config { eps_target: cfg.eps_target, eps0: cfg.eps0, slack: cfg.slack, l2, l3 };
    let p1 = phase1_eliminate(&p1cfg)?;

    let centers: Vec<[f64; 4]> = p1.survivors.iter().map(|c| c.to_box(cfg.eps0).center()).collect();
    let survivor_max_distance = centers.iter().map(|&y| nearest_locus(y).1).fold(0.0, f64::max);
    let phase2: Vec<Phase2Result> = p1
        .survivors
        .par_iter()
        .map(|c| {
            let b = c.to_box(cfg.eps0);
            phase2_refine(&b, nearest_locus(b.center()).0)
        })
        .collect();

    let mut probe_boxes: Vec<(Box4, Objective)> =
        cfg.probe_deltas.iter().map(|&d| (probe_box(gamma_point(d), cfg.probe_edge), Objective::DistGamma)).collect();
    if !cfg.probe_deltas.is_empty() {
        probe_boxes.push((probe_box(V_POINT, cfg.probe_edge), Objective::DistV));
    }
    let probes: Vec<Phase2Result> = probe_boxes.par_iter().map(|(b, o)| phase2_refine(b, *o)).collect();

    let audit = audit_eliminated(&p1, cfg.audit_samples, cfg.audit_seed);
    let phase2_summary = Phase2Summary::of(&phase2);
    let probe_summary = Phase2Summary::of(&probes);
    let status = if phase2_summary.clean() && probe_summary.clean() && audit.violations == 0 {
        VerifyStatus::Certified
    } else {
        VerifyStatus::Incomplete
    };
    let statement = format!(
        "for all delta in [1,2] and feasible (s1,s2,d2): min(alpha2,alpha3) <= 1+delta/2+{} on every box eliminated \
         at resolution eps_target={} (eps0={}, L2={}, L3={}); in the {} remaining boxes every point with \
         alpha2, alpha3 >= 1+delta/2 found by the local optimizer lies within {} of gamma or v",
        cfg.slack,
        cfg.eps_target,
        cfg.eps0,
        l2,
        l3,
        p1.survivors.len(),
        ON_LOCUS_TOL
    );
    let report = OptimizationReport {
        problem: "restricted3",
        delta_range: [1.0, 2.0],
        eps_target: cfg.eps_target,
        eps0: cfg.eps0,
        slack: cfg.slack,
        l2,
        l3,
        lipschitz,
        phase1: p1.stats.clone(),
        survivor_max_distance,
        phase2,
        phase2_summary,
        probes,
        probe_summary,
        audit,
        status,
        statement,
        survivor_centers: centers,
    };
    Ok((report, p1))
}
