//! Bound expressions of the two three-round problems.
//!
//! Restricted: coordinates `(s₁, s̃₂, d̃₂, δ)`, with `m₁′` eliminated at its
//! largest admissible value `c/2 − s₁` where `c = (2−δ)/(2+δ)`.
//! Unrestricted: coordinates `(s₁, s̃₂, d̃₂, m₁′)` at a fixed δ.

use serde::Serialize;

use super::scalar::Scalar;
use super::CertError;

/// Constraint violations up to this size are accepted as rounding noise.
pub const FEAS_TOL: f64 = 1e-12;

/// The point `v` where both restricted bounds equal 3/2.
pub const V_POINT: [f64; 4] = [0.0, 0.0, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Restricted3,
    Unrestricted3,
}

/// `(2−δ)/(2+δ)`, written with δ occurring once.
pub fn gap<T: Scalar>(delta: T) -> T {
    T::cst(4.0) / (T::cst(2.0) + delta) - T::cst(1.0)
}

/// `[(f₂, g₂), (f₃, g₃)]` with `α_i = f_i / g_i` for the restricted problem.
pub fn restricted_parts<T: Scalar>(x: [T; 4]) -> [(T, T); 2] {
    let [s1, s2, d2, delta] = x;
    let one = T::cst(1.0);
    let two = T::cst(2.0);
    let m1p = T::cst(0.5) * gap(delta) - s1;
    let cross = two * s1 * (s2 + d2) + m1p * (s2 + two * d2);
    let f2 = two - (two + delta) * s1 - two * (s2 + d2);
    let g2 = one - two * cross;
    let f3 = delta - (T::cst(3.0) * delta - two) * s1 - (two * delta - two) * (s2 + d2);
    let g3 = one - two * (two * (T::cst(0.5) - (s1 + s2 + d2)) * (s1 + s2) + cross);
    [(f2, g2), (f3, g3)]
}

/// `[(f₁, 1), (f₂, g₂), (f₃, g₃)]` for the unrestricted problem at `delta`.
pub fn unrestricted_parts<T: Scalar>(x: [T; 4], delta: T) -> [(T, T); 3] {
    let [s1, s2, d2, m] = x;
    let one = T::cst(1.0);
    let two = T::cst(2.0);
    let sum = s1 + s2 + d2;
    let slope = T::cst(4.0) - two * delta;
    let cross = two * s1 * (s2 + d2) + m * (s2 + two * d2);
    let f1 = two - slope * (s1 + m);
    let f2 = two - slope * sum;
    let g2 = one - two * cross;
    let g3 = one - two * (two * (T::cst(0.5) - sum) * (s1 + s2) + cross);
    [(f1, one), (f2, g2), (delta, g3)]
}

/// Domain constraints of the restricted problem, each required `≥ 0`.
pub fn restricted_constraints<T: Scalar>(x: [T; 4]) -> [(&'static str, T); 7] {
    let [s1, s2, d2, delta] = x;
    [
        ("s1 >= 0", s1),
        ("s2 >= 0", s2),
        ("d2 >= 0", d2),
        ("s1+s2+d2 <= 1/2", T::cst(0.5) - (s1 + s2 + d2)),
        ("2s1+s2+2d2 >= (2-delta)/(2+delta)", T::cst(2.0) * s1 + s2 + T::cst(2.0) * d2 - gap(delta)),
        ("delta >= 1", delta - T::cst(1.0)),
        ("delta <= 2", T::cst(2.0) - delta),
    ]
}

/// Domain constraints of the unrestricted problem; the last one is the
/// optional cap `m₁′ ≤ s̃₂/2 + d̃₂`.
pub fn unrestricted_constraints<T: Scalar>(x: [T; 4], delta: T) -> [(&'static str, T); 7] {
    let [s1, s2, d2, m] = x;
    [
        ("s1 >= 0", s1),
        ("s2 >= 0", s2),
        ("d2 >= 0", d2),
        ("m1' >= 0", m),
        ("s1+s2+d2 <= 1/2", T::cst(0.5) - (s1 + s2 + d2)),
        ("2s1+s2+2d2 >= (2-delta)/(2+delta)", T::cst(2.0) * s1 + s2 + T::cst(2.0) * d2 - gap(delta)),
        ("m1' <= s2/2+d2", T::cst(0.5) * s2 + d2 - m),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alphas {
    /// Absent for the restricted problem, where it is absorbed.
    pub alpha1: Option<f64>,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl Alphas {
    pub fn min(&self) -> f64 {
        let m = self.alpha2.min(self.alpha3);
        self.alpha1.map_or(m, |a| a.min(m))
    }
}

fn violated(cons: &[(&'static str, f64)]) -> Vec<String> {
    cons.iter().filter(|(_, v)| *v < -FEAS_TOL || v.is_nan()).map(|(n, v)| format!("{n} (by {:.3e})", -v)).collect()
}

/// Evaluates the bounds at a feasible point. `point` is `(s₁, s̃₂, d̃₂)` for
/// the restricted problem and `(s₁, s̃₂, d̃₂, m₁′)` for the unrestricted one.
/// The cap on `m₁′` is checked only when `enforce_cap` is set.
pub fn point_eval(kind: ProblemKind, point: &[f64], delta: f64, enforce_cap: bool) -> Result<Alphas, CertError> {
    match kind {
        ProblemKind::Restricted3 => {
            let &[s1, s2, d2] = point else {
                return Err(CertError::Invalid(format!("restricted point needs 3 coordinates, got {}", point.len())));
            };
            let x = [s1, s2, d2, delta];
            let bad = violated(&restricted_constraints(x));
            if !bad.is_empty() {
                return Err(CertError::Infeasible(bad));
            }
            let [(f2, g2), (f3, g3)] = restricted_parts(x);
            Ok(Alphas { alpha1: None, alpha2: f2 / g2, alpha3: f3 / g3 })
        }
        ProblemKind::Unrestricted3 => {
            let &[s1, s2, d2, m] = point else {
                return Err(CertError::Invalid(format!("unrestricted point needs 4 coordinates, got {}", point.len())));
            };
            if !(1.0..2.0).contains(&delta) {
                return Err(CertError::Invalid(format!("delta = {delta} outside [1, 2)")));
            }
            let x = [s1, s2, d2, m];
            let cons = unrestricted_constraints(x, delta);
            let used = if enforce_cap { &cons[..] } else { &cons[..6] };
            let bad = violated(used);
            if !bad.is_empty() {
                return Err(CertError::Infeasible(bad));
            }
            let [(f1, _), (f2, g2), (f3, g3)] = unrestricted_parts(x, delta);
            Ok(Alphas { alpha1: Some(f1), alpha2: f2 / g2, alpha3: f3 / g3 })
        }
    }
}

/// `γ(δ) = (0, (2−δ)/(2+δ), 0, δ)`.
pub fn gamma_point(delta: f64) -> [f64; 4] {
    [0.0, gap(delta), 0.0, delta]
}

/// Squared distance to γ at the same δ, the phase-2 objective.
pub fn dist_gamma<T: Scalar>(x: [T; 4]) -> T {
    let [s1, s2, d2, delta] = x;
    let e = s2 - gap(delta);
    s1 * s1 + e * e + d2 * d2
}

/// Squared distance to `v`.
pub fn dist_v<T: Scalar>(x: [T; 4]) -> T {
    let [s1, s2, d2, delta] = x;
    let e = T::cst(0.5) - d2;
    let h = T::cst(1.0) - delta;
    s1 * s1 + s2 * s2 + e * e + h * h
}
