//! Dense strictly convex QP by the dual active-set method of Goldfarb and
//! Idnani:
//!
//! minimize ½xᵀGx + aᵀx subject to Cᵀx ≥ b (columns of C are normals).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QpError {
    #[error("QP is infeasible")]
    Infeasible,
    #[error("QP Hessian is not positive definite")]
    NotConvex,
    #[error("singular KKT system")]
    Singular,
    #[error("QP did not finish within {0} iterations")]
    IterationLimit(usize),
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// One multiplier per constraint, zero for inactive ones.
    pub lambda: DVector<f64>,
    pub active: Vec<usize>,
    pub iterations: usize,
}

const TOL: f64 = 1e-12;

/// Primal step `z` and dual change `du` for adding constraint `p` with the
/// current active set held tight.
fn directions(g: &DMatrix<f64>, c: &DMatrix<f64>, active: &[usize], p: usize) -> Result<(DVector<f64>, DVector<f64>), QpError> {
    let n = g.nrows();
    let k = active.len();
    let mut m = DMatrix::zeros(n + k, n + k);
    m.view_mut((0, 0), (n, n)).copy_from(g);
    for (j, &a) in active.iter().enumerate() {
        for i in 0..n {
            m[(i, n + j)] = -c[(i, a)];
            m[(n + j, i)] = c[(i, a)];
        }
    }
    let mut rhs = DVector::zeros(n + k);
    rhs.rows_mut(0, n).copy_from(&c.column(p));
    let sol = m.lu().solve(&rhs).ok_or(QpError::Singular)?;
    Ok((sol.rows(0, n).into_owned(), sol.rows(n, k).into_owned()))
}

pub fn solve_qp(g: &DMatrix<f64>, a: &DVector<f64>, c: &DMatrix<f64>, b: &DVector<f64>) -> Result<QpSolution, QpError> {
    let n = g.nrows();
    let m = c.ncols();
    assert!(g.ncols() == n && a.len() == n && c.nrows() == n && b.len() == m, "QP dimension mismatch");
    let chol = g.clone().cholesky().ok_or(QpError::NotConvex)?;
    let mut x = -chol.solve(a);
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let limit = 20 * (m + n) + 50;
    let scale: Vec<f64> = (0..m).map(|j| 1.0 + c.column(j).amax() + b[j].abs()).collect();

    for it in 0..limit {
        let slack = |x: &DVector<f64>, j: usize| c.column(j).dot(x) - b[j];
        let mut p = None;
        let mut worst = -TOL;
        for j in 0..m {
            if active.contains(&j) {
                continue;
            }
            let s = slack(&x, j) / scale[j];
            if s < worst {
                worst = s;
                p = Some(j);
            }
        }
        let Some(p) = p else {
            let mut lambda = DVector::zeros(m);
            for (&j, &uj) in active.iter().zip(&u) {
                lambda[j] = uj;
            }
            return Ok(QpSolution { x, lambda, active, iterations: it });
        };
        let mut up = 0.0;
        loop {
            let (z, du) = directions(g, c, &active, p)?;
            let r: Vec<f64> = du.iter().map(|v| -v).collect();
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for (j, &rj) in r.iter().enumerate() {
                if rj > TOL {
                    let t = u[j] / rj;
                    if t < t1 {
                        t1 = t;
                        drop = Some(j);
                    }
                }
            }
            let zn = z.dot(&c.column(p));
            let t2 = if z.amax() > TOL && zn > TOL { -slack(&x, p) / zn } else { f64::INFINITY };
            if t1.is_infinite() && t2.is_infinite() {
                return Err(QpError::Infeasible);
            }
            if t2.is_infinite() {
                for (uj, rj) in u.iter_mut().zip(&r) {
                    *uj -= t1 * rj;
                }
                up += t1;
                let k = drop.unwrap();
                active.remove(k);
                u.remove(k);
                continue;
            }
            let t = t1.min(t2);
            x += &z * t;
            for (uj, rj) in u.iter_mut().zip(&r) {
                *uj -= t * rj;
            }
            up += t;
            if t2 <= t1 {
                active.push(p);
                u.push(up);
                break;
            }
            let k = drop.unwrap();
            active.remove(k);
            u.remove(k);
        }
        for uj in u.iter_mut() {
            *uj = uj.max(0.0);
        }
    }
    Err(QpError::IterationLimit(limit))
}
