//! Small dense SQP: damped BFGS Hessian, elastic QP subproblems solved by
//! the dual active-set method, ℓ∞ merit function with backtracking.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::qp::solve_qp;
use super::scalar::{Dual, Scalar};

/// A problem `min f(x)` subject to `c(x) ≥ 0` and simple bounds.
pub trait Nlp<const N: usize>: Sync {
    /// Returns the objective and pushes every constraint value onto `cons`.
    fn eval<T: Scalar>(&self, x: [T; N], cons: &mut Vec<T>) -> T;
    fn bounds(&self) -> ([f64; N], [f64; N]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqpOptions {
    pub max_iter: usize,
    /// Step length (∞-norm) below which the iteration stops.
    pub step_tol: f64,
    /// Constraint violation accepted as feasible.
    pub feas_tol: f64,
    pub rho0: f64,
    pub rho_max: f64,
}

impl Default for SqpOptions {
    fn default() -> Self {
        SqpOptions { max_iter: 300, step_tol: 1e-11, feas_tol: 1e-9, rho0: 10.0, rho_max: 1e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SqpStatus {
    Converged,
    /// Stationary for the constraint violation with the violation positive.
    Infeasible,
    IterationLimit,
    /// The line search or a QP subproblem broke down.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqpResult<const N: usize> {
    #[serde(with = "arr")]
    pub x: [f64; N],
    pub objective: f64,
    pub max_violation: f64,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub status: SqpStatus,
}

mod arr {
    use serde::Serializer;
    pub fn serialize<S: Serializer, const N: usize>(x: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter())
    }
}

struct Eval {
    f: f64,
    grad: Vec<f64>,
    c: Vec<f64>,
    jac: Vec<Vec<f64>>,
}

/// Objective, constraints and their gradients at a point.
trait Model {
    fn eval(&self, x: &[f64]) -> Eval;
}

struct Wrapped<'a, P, const N: usize>(&'a P);

impl<P: Nlp<N>, const N: usize> Model for Wrapped<'_, P, N> {
    fn eval(&self, x: &[f64]) -> Eval {
        let mut cons = Vec::new();
        let f = self.0.eval(Dual::<f64, N>::vars(std::array::from_fn(|j| x[j])), &mut cons);
        Eval { f: f.v, grad: f.d.to_vec(), c: cons.iter().map(|c| c.v).collect(), jac: cons.iter().map(|c| c.d.to_vec()).collect() }
    }
}

/// `min ζ` subject to `c(x) + ζ ≥ 0`; the last coordinate is ζ.
struct Restoration<'a>(&'a dyn Model);

impl Model for Restoration<'_> {
    fn eval(&self, x: &[f64]) -> Eval {
        let n = x.len() - 1;
        let e = self.0.eval(&x[..n]);
        let mut grad = vec![0.0; n + 1];
        grad[n] = 1.0;
        let jac = e
            .jac
            .into_iter()
            .map(|mut r| {
                r.push(1.0);
                r
            })
            .collect();
        Eval { f: x[n], grad, c: e.c.iter().map(|c| c + x[n]).collect(), jac }
    }
}

fn violation(c: &[f64]) -> f64 {
    c.iter().fold(0.0, |m, &v| m.max(-v))
}

/// Elastic QP: `min ½dᵀBd + ∇fᵀd + ρ(ζ + ½μζ²)` subject to
/// `c + Jd + ζ ≥ 0`, `ζ ≥ 0` and the bounds. Returns `(d, ζ, λ)`.
fn subproblem(e: &Eval, b: &DMatrix<f64>, x: &[f64], lo: &[f64], hi: &[f64], rho: f64) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let nx = x.len();
    let n = nx + 1;
    let m = e.c.len();
    let rows = m + 1 + 2 * nx;
    let mut g = DMatrix::zeros(n, n);
    g.view_mut((0, 0), (nx, nx)).copy_from(b);
    // scaled with ρ so the unconstrained start -1/μ stays moderate
    g[(nx, nx)] = 1e-3 * rho;
    let mut a = DVector::zeros(n);
    for j in 0..nx {
        a[j] = e.grad[j];
    }
    a[nx] = rho;
    let mut c = DMatrix::zeros(n, rows);
    let mut rhs = DVector::zeros(rows);
    for (i, (ci, ji)) in e.c.iter().zip(&e.jac).enumerate() {
        for j in 0..nx {
            c[(j, i)] = ji[j];
        }
        c[(nx, i)] = 1.0;
        rhs[i] = -ci;
    }
    c[(nx, m)] = 1.0;
    for j in 0..nx {
        c[(j, m + 1 + 2 * j)] = 1.0;
        rhs[m + 1 + 2 * j] = lo[j] - x[j];
        c[(j, m + 2 + 2 * j)] = -1.0;
        rhs[m + 2 + 2 * j] = x[j] - hi[j];
    }
    let s = solve_qp(&g, &a, &c, &rhs).ok()?;
    Some((s.x.rows(0, nx).iter().copied().collect(), s.x[nx].max(0.0), s.lambda.iter().take(m).copied().collect()))
}

fn lagrangian_grad(e: &Eval, lambda: &[f64]) -> Vec<f64> {
    (0..e.grad.len()).map(|j| e.grad[j] - e.jac.iter().zip(lambda).map(|(r, l)| l * r[j]).sum::<f64>()).collect()
}

struct Core {
    x: Vec<f64>,
    e: Eval,
    lambda: Vec<f64>,
    iterations: usize,
    status: SqpStatus,
}

fn sqp_core(p: &dyn Model, x0: Vec<f64>, lo: &[f64], hi: &[f64], opt: &SqpOptions, max_iter: usize) -> Core {
    let n = x0.len();
    let mut x: Vec<f64> = x0.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| v.clamp(*l, *h)).collect();
    let mut e = p.eval(&x);
    let mut b = DMatrix::<f64>::identity(n, n);
    let mut rho = opt.rho0;
    let mut lambda = vec![0.0; e.c.len()];
    let mut resets = 0;

    for it in 0..max_iter {
        let Some((mut d, mut zeta, mut lam)) = subproblem(&e, &b, &x, lo, hi, rho) else {
            return Core { x, e, lambda, iterations: it, status: SqpStatus::Failed };
        };
        // raise the penalty while that still reduces the linearized violation
        while zeta > opt.feas_tol && rho < opt.rho_max {
            let before = zeta;
            rho = (rho * 10.0).min(opt.rho_max);
            match subproblem(&e, &b, &x, lo, hi, rho) {
                Some(r) => (d, zeta, lam) = r,
                None => break,
            }
            if zeta >= before * (1.0 - 1e-6) {
                break;
            }
        }
        lambda = lam;
        let v = violation(&e.c);
        let step = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let phi = e.f + rho * v;
        let gd: f64 = e.grad.iter().zip(&d).map(|(g, d)| g * d).sum();
        let pred = (-gd + rho * (v - zeta)).max(0.0);
        if step <= opt.step_tol || (step <= 1e-8 && pred <= 1e-15 * phi.abs().max(1.0)) {
            let status = if v <= opt.feas_tol { SqpStatus::Converged } else { SqpStatus::Infeasible };
            return Core { x, e, lambda, iterations: it, status };
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-12 {
            let xn: Vec<f64> = (0..n).map(|j| (x[j] + t * d[j]).clamp(lo[j], hi[j])).collect();
            let en = p.eval(&xn);
            let phin = en.f + rho * violation(&en.c);
            if phin <= phi - 1e-4 * t * pred && xn != x {
                accepted = Some((xn, en));
                break;
            }
            if t == 1.0 {
                // second-order correction against curvature of the constraints
                let shifted = Eval {
                    f: e.f,
                    grad: e.grad.clone(),
                    c: en.c.iter().zip(&e.jac).map(|(c, r)| c - r.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>()).collect(),
                    jac: e.jac.clone(),
                };
                if let Some((dc, _, _)) = subproblem(&shifted, &b, &x, lo, hi, rho) {
                    let xc: Vec<f64> = (0..n).map(|j| (x[j] + dc[j]).clamp(lo[j], hi[j])).collect();
                    let ec = p.eval(&xc);
                    if ec.f + rho * violation(&ec.c) <= phi - 1e-4 * pred && xc != x {
                        accepted = Some((xc, ec));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let Some((xn, en)) = accepted else {
            // the model is poor: restart the curvature a few times, then stop
            if resets < 3 {
                resets += 1;
                b = DMatrix::identity(n, n);
                continue;
            }
            let status = if v <= opt.feas_tol && step < 1e-7 { SqpStatus::Converged } else { SqpStatus::Failed };
            return Core { x, e, lambda, iterations: it, status };
        };
        let s = DVector::from_fn(n, |j, _| xn[j] - x[j]);
        let gl0 = lagrangian_grad(&e, &lambda);
        let gl1 = lagrangian_grad(&en, &lambda);
        let mut y = DVector::from_fn(n, |j, _| gl1[j] - gl0[j]);
        let bs = &b * &s;
        let sbs = s.dot(&bs);
        let sy = s.dot(&y);
        if sbs > 1e-300 {
            if sy < 0.2 * sbs {
                let theta = 0.8 * sbs / (sbs - sy);
                y = &y * theta + &bs * (1.0 - theta);
            }
            let sy = s.dot(&y);
            b = &b - &bs * bs.transpose() / sbs + &y * y.transpose() / sy;
        }
        x = xn;
        e = en;
    }
    Core { x, e, lambda, iterations: max_iter, status: SqpStatus::IterationLimit }
}

/// Runs SQP from `x0` (clamped into the bounds). An infeasible start first
/// goes through a restoration phase that minimizes the largest violation;
/// if that stalls above `feas_tol` the result is `Infeasible`.
pub fn solve_sqp<const N: usize, P: Nlp<N>>(p: &P, x0: [f64; N], opt: &SqpOptions) -> SqpResult<N> {
    let (lo, hi) = p.bounds();
    let model = Wrapped(p);
    let mut start: Vec<f64> = (0..N).map(|j| x0[j].clamp(lo[j], hi[j])).collect();
    let v0 = violation(&model.eval(&start).c);
    let mut used = 0;
    if v0 > opt.feas_tol {
        let mut rlo = lo.to_vec();
        let mut rhi = hi.to_vec();
        rlo.push(0.0);
        rhi.push(v0 + 1.0);
        let mut z0 = start.clone();
        z0.push(v0);
        let r = sqp_core(&Restoration(&model), z0, &rlo, &rhi, opt, opt.max_iter);
        used = r.iterations;
        let xr = r.x[..N].to_vec();
        let vr = violation(&model.eval(&xr).c);
        if vr > opt.feas_tol {
            let status = match r.status {
                SqpStatus::Converged | SqpStatus::Infeasible => SqpStatus::Infeasible,
                s => s,
            };
            let e = model.eval(&xr);
            return SqpResult {
                x: std::array::from_fn(|j| xr[j]),
                objective: e.f,
                max_violation: vr,
                multipliers: vec![0.0; e.c.len()],
                iterations: used,
                status,
            };
        }
        start = xr;
    }
    let r = sqp_core(&model, start, &lo, &hi, opt, opt.max_iter);
    SqpResult {
        x: std::array::from_fn(|j| r.x[j]),
        objective: r.e.f,
        max_violation: violation(&r.e.c),
        multipliers: r.lambda,
        iterations: used + r.iterations,
        status: r.status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Circle;
    impl Nlp<2> for Circle {
        // min x + y on the unit disk
        fn eval<T: Scalar>(&self, x: [T; 2], cons: &mut Vec<T>) -> T {
            cons.push(T::cst(1.0) - x[0] * x[0] - x[1] * x[1]);
            x[0] + x[1]
        }
        fn bounds(&self) -> ([f64; 2], [f64; 2]) {
            ([-2.0; 2], [2.0; 2])
        }
    }

    struct Rosen;
    impl Nlp<2> for Rosen {
        fn eval<T: Scalar>(&self, x: [T; 2], _: &mut Vec<T>) -> T {
            let a = T::cst(1.0) - x[0];
            let b = x[1] - x[0] * x[0];
            a * a + T::cst(100.0) * b * b
        }
        fn bounds(&self) -> ([f64; 2], [f64; 2]) {
            ([-2.0, -2.0], [2.0, 0.5])
        }
    }

    struct Empty;
    impl Nlp<1> for Empty {
        fn eval<T: Scalar>(&self, x: [T; 1], cons: &mut Vec<T>) -> T {
            cons.push(x[0] - T::cst(2.0));
            x[0] * x[0]
        }
        fn bounds(&self) -> ([f64; 1], [f64; 1]) {
            ([0.0], [1.0])
        }
    }

    #[test]
    fn disk_linear_objective() {
        let r = solve_sqp(&Circle, [0.3, -0.2], &SqpOptions::default());
        let h = -(0.5f64).sqrt();
        assert_eq!(r.status, SqpStatus::Converged);
        assert!((r.x[0] - h).abs() < 1e-8 && (r.x[1] - h).abs() < 1e-8, "{:?}", r.x);
        assert!((r.multipliers[0] - (0.5f64).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn bounded_rosenbrock() {
        // bound y <= 1/2 is active: minimizer on x² ≈ 1/2 region
        let r = solve_sqp(&Rosen, [-1.2, 0.0], &SqpOptions::default());
        assert_eq!(r.status, SqpStatus::Converged);
        assert!((r.x[1] - 0.5).abs() < 1e-9);
        // stationarity in x: -2(1-x) - 400x(y-x²) = 0 at y = 1/2
        let x = r.x[0];
        assert!((-2.0 * (1.0 - x) - 400.0 * x * (0.5 - x * x)).abs() < 1e-5);
    }

    #[test]
    fn reports_infeasible() {
        let r = solve_sqp(&Empty, [0.5], &SqpOptions::default());
        assert_eq!(r.status, SqpStatus::Infeasible);
        assert!((r.x[0] - 1.0).abs() < 1e-12 && (r.max_violation - 1.0).abs() < 1e-12);
    }
}
