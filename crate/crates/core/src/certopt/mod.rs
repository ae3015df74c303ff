//! Certified numerics for the three-round bound problems: interval
//! arithmetic, Lipschitz certificates, hypercube elimination, a local
//! SQP optimizer and the multi-start solver for the unrestricted problem.

mod interval;
mod kkt;
mod lipschitz;
mod phase1;
mod phase2;
mod problem;
mod qp;
mod scalar;
mod sqp;
mod table1;
mod verify;

use thiserror::Error;

pub use interval::{Box4, Interval, ENTIRE};
pub use kkt::{kkt_residual, KktReport};
pub use lipschitz::{lipschitz_constants, CertifiedNorm, LipschitzReport, PartialBounds, PAPER_BULLETS};
pub use phase1::{audit_eliminated, phase1_eliminate, AuditReport, Cell, Phase1Config, Phase1Result, Phase1Stats};
pub use phase2::{phase2_refine, Objective, Phase2Result, Phase2Status, ON_LOCUS_TOL};
pub use problem::{
    dist_gamma, dist_v, gamma_point, gap, point_eval, restricted_constraints, restricted_parts, unrestricted_constraints,
    unrestricted_parts, Alphas, ProblemKind, FEAS_TOL, V_POINT,
};
pub use qp::{solve_qp, QpError, QpSolution};
pub use scalar::{Dual, Scalar};
pub use sqp::{solve_sqp, Nlp, SqpOptions, SqpResult, SqpStatus};
pub use table1::{solve_table1, table1_point_value, Table1Options, Table1Result, TABLE1_DELTAS};
pub use verify::{verify_lemma_c1, OptimizationReport, VerifyConfig, VerifyStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("division by an interval containing zero: [{0}, {1}]")]
    DivisionByZero(f64, f64),
    #[error("infeasible point, violated constraints: {}", .0.join(", "))]
    Infeasible(Vec<String>),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("Lipschitz bound could not be certified: {0}")]
    Uncertified(String),
}
