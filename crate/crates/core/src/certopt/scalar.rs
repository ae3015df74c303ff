//! Number types the bound expressions are generic over: plain floats,
//! intervals, and forward-mode duals of either.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::interval::Interval;

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// An exactly representable constant.
    fn cst(x: f64) -> Self;
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
}

impl Scalar for Interval {
    fn cst(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Value with its gradient with respect to `N` seeded inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T, const N: usize> {
    pub v: T,
    pub d: [T; N],
}

impl<T: Scalar, const N: usize> Dual<T, N> {
    pub fn constant(v: T) -> Self {
        Dual { v, d: [T::cst(0.0); N] }
    }

    /// The `i`-th input variable.
    pub fn var(v: T, i: usize) -> Self {
        let mut d = [T::cst(0.0); N];
        d[i] = T::cst(1.0);
        Dual { v, d }
    }

    /// All inputs seeded in order.
    pub fn vars(x: [T; N]) -> [Self; N] {
        std::array::from_fn(|i| Self::var(x[i], i))
    }
}

impl<T: Scalar, const N: usize> Add for Dual<T, N> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Dual { v: self.v + r.v, d: std::array::from_fn(|i| self.d[i] + r.d[i]) }
    }
}

impl<T: Scalar, const N: usize> Sub for Dual<T, N> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Dual { v: self.v - r.v, d: std::array::from_fn(|i| self.d[i] - r.d[i]) }
    }
}

impl<T: Scalar, const N: usize> Neg for Dual<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}

impl<T: Scalar, const N: usize> Mul for Dual<T, N> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Dual { v: self.v * r.v, d: std::array::from_fn(|i| self.d[i] * r.v + self.v * r.d[i]) }
    }
}

impl<T: Scalar, const N: usize> Div for Dual<T, N> {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let q = self.v / r.v;
        let rr = r.v * r.v;
        Dual { v: q, d: std::array::from_fn(|i| (self.d[i] * r.v - self.v * r.d[i]) / rr) }
    }
}

impl<T: Scalar, const N: usize> Scalar for Dual<T, N> {
    fn cst(x: f64) -> Self {
        Dual::constant(T::cst(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Scalar>(x: T, y: T) -> T {
        (x * x * y - T::cst(3.0)) / (T::cst(1.0) + y * y)
    }

    #[test]
    fn dual_matches_finite_differences() {
        let (x, y) = (0.7, -1.3);
        let [dx, dy] = Dual::<f64, 2>::vars([x, y]);
        let r = f(dx, dy);
        let h = 1e-6;
        let gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
        assert!((r.v - f(x, y)).abs() < 1e-15);
        assert!((r.d[0] - gx).abs() < 1e-8 && (r.d[1] - gy).abs() < 1e-8);
    }

    #[test]
    fn interval_dual_encloses_gradient() {
        let bx = Interval::new(0.5, 0.6);
        let by = Interval::new(1.0, 1.1);
        let [dx, dy] = Dual::<Interval, 2>::vars([bx, by]);
        let r = f(dx, dy);
        for i in 0..=10 {
            for j in 0..=10 {
                let (x, y) = (0.5 + 0.01 * i as f64, 1.0 + 0.01 * j as f64);
                let [px, py] = Dual::<f64, 2>::vars([x, y]);
                let p = f(px, py);
                assert!(r.v.contains(p.v) && r.d[0].contains(p.d[0]) && r.d[1].contains(p.d[1]));
            }
        }
    }
}
