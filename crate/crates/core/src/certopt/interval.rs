use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

use super::CertError;

/// Closed interval `[lo, hi]`. Every arithmetic result is widened by one ulp
/// on each side, so it encloses the exact real result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

impl Interval {
    /// Panics if `lo > hi` or either end is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Enclosure of `p / q` for integers too large to matter.
    pub fn ratio(p: f64, q: f64) -> Self {
        Interval::point(p) / Interval::point(q)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval { lo: down(a.lo * a.lo).max(0.0), hi: up(a.hi * a.hi) }
    }

    /// Square root of the non-negative part.
    pub fn sqrt(self) -> Interval {
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        Interval { lo: down(lo.sqrt()).max(0.0), hi: up(hi.sqrt()) }
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, CertError> {
        if rhs.contains_zero() {
            Err(CertError::DivisionByZero(rhs.lo, rhs.hi))
        } else {
            Ok(self / rhs)
        }
    }

    /// Enclosure of `√(a² + b² + c² + d²)`.
    pub fn norm4(v: [Interval; 4]) -> Interval {
        let s = v.iter().fold(Interval::point(0.0), |acc, x| acc + x.sqr());
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, r: Interval) -> Interval {
        Interval { lo: down(self.lo + r.lo), hi: up(self.hi + r.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, r: Interval) -> Interval {
        Interval { lo: down(self.lo - r.hi), hi: up(self.hi - r.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

fn hull4(p: [f64; 4]) -> Interval {
    if p.iter().any(|x| x.is_nan()) {
        return ENTIRE;
    }
    let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Interval { lo: down(lo), hi: up(hi) }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, r: Interval) -> Interval {
        hull4([self.lo * r.lo, self.lo * r.hi, self.hi * r.lo, self.hi * r.hi])
    }
}

impl Div for Interval {
    type Output = Interval;
    /// Division by an interval containing zero gives the whole line.
    fn div(self, r: Interval) -> Interval {
        if r.contains_zero() {
            return ENTIRE;
        }
        hull4([self.lo / r.lo, self.lo / r.hi, self.hi / r.lo, self.hi / r.hi])
    }
}

/// Axis-aligned box in four coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Box4(pub [Interval; 4]);

impl Box4 {
    pub fn center(&self) -> [f64; 4] {
        self.0.map(|i| i.mid())
    }

    /// Largest distance from the center to a point of the box, rounded up.
    pub fn half_diagonal(&self) -> f64 {
        let s: f64 = self.0.iter().map(|i| (0.5 * i.width()).powi(2)).sum();
        up(s.sqrt())
    }

    pub fn contains(&self, x: &[f64; 4]) -> bool {
        self.0.iter().zip(x).all(|(i, &v)| i.contains(v))
    }

    /// The 16 halves along every axis, in a fixed order.
    pub fn split(&self) -> [Box4; 16] {
        std::array::from_fn(|mask| {
            Box4(std::array::from_fn(|axis| {
                let i = self.0[axis];
                let m = i.mid();
                if mask >> axis & 1 == 0 {
                    Interval::new(i.lo, m)
                } else {
                    Interval::new(m, i.hi)
                }
            }))
        })
    }
}
