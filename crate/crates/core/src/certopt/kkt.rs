//! First-order optimality residual of a candidate point, computed from
//! scratch (nonnegative least-squares multipliers on near-active
//! constraints) rather than taken from the optimizer.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::qp::solve_qp;
use super::scalar::Dual;
use super::sqp::Nlp;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    pub stationarity: f64,
    pub feasibility: f64,
    pub complementarity: f64,
    /// Max of the three parts.
    pub residual: f64,
    pub active: usize,
}

/// Constraints with value at most `active_tol` (and bounds within it) are
/// treated as active.
pub fn kkt_residual<const N: usize, P: Nlp<N>>(p: &P, x: [f64; N], active_tol: f64) -> KktReport {
    let mut cons = Vec::new();
    let f = p.eval(Dual::<f64, N>::vars(x), &mut cons);
    let (lo, hi) = p.bounds();

    let mut normals: Vec<[f64; N]> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for c in &cons {
        if c.v <= active_tol {
            normals.push(c.d);
            values.push(c.v);
        }
    }
    for j in 0..N {
        if x[j] - lo[j] <= active_tol {
            normals.push(std::array::from_fn(|i| if i == j { 1.0 } else { 0.0 }));
            values.push(x[j] - lo[j]);
        }
        if hi[j] - x[j] <= active_tol {
            normals.push(std::array::from_fn(|i| if i == j { -1.0 } else { 0.0 }));
            values.push(hi[j] - x[j]);
        }
    }
    let feasibility = cons
        .iter()
        .map(|c| -c.v)
        .chain((0..N).flat_map(|j| [lo[j] - x[j], x[j] - hi[j]]))
        .fold(0.0f64, f64::max);

    let k = normals.len();
    let grad = DVector::from_fn(N, |j, _| f.d[j]);
    let lambda = if k == 0 {
        DVector::zeros(0)
    } else {
        let a = DMatrix::from_fn(N, k, |i, j| normals[j][i]);
        let g = a.transpose() * &a + DMatrix::identity(k, k) * 1e-12;
        let lin = -(a.transpose() * &grad);
        match solve_qp(&g, &lin, &DMatrix::identity(k, k), &DVector::zeros(k)) {
            Ok(s) => s.x,
            Err(_) => DVector::zeros(k),
        }
    };
    let mut r = grad.clone();
    for (j, nj) in normals.iter().enumerate() {
        for i in 0..N {
            r[i] -= lambda[j] * nj[i];
        }
    }
    let stationarity = r.amax();
    let complementarity = values.iter().zip(lambda.iter()).fold(0.0f64, |m, (v, l)| m.max((v * l).abs()));
    KktReport { stationarity, feasibility, complementarity, residual: stationarity.max(feasibility).max(complementarity), active: k }
}
