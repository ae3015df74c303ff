//! Gradient-norm bounds for the restricted `α₂`, `α₃`.
//!
//! Three routes are computed. The literal one reproduces the printed
//! per-partial bullets (`f ∈ [0,2]`, `g ∈ [½,1]`, `∂g/∂δ` taken as 0). The
//! coarse-corrected one keeps `∂g/∂δ`. The certified one bounds the exact
//! gradient with interval forward differentiation on an adaptive
//! subdivision, and is what phase 1 relies on.

use serde::Serialize;

use super::interval::{Box4, Interval};
use super::problem::restricted_parts;
use super::scalar::Dual;
use super::CertError;

/// Printed bullets for `|∂α₂|` and `|∂α₃|` over `(s₁, s̃₂, d̃₂, δ)`.
pub const PAPER_BULLETS: [[(f64, f64); 4]; 2] =
    [[(0.0, 16.0), (0.0, 8.0), (0.0, 8.0), (0.0, 1.0)], [(0.0, 32.0), (0.0, 24.0), (0.0, 24.0), (0.0, 2.0)]];

/// The constants phase 1 uses.
pub const L2: f64 = 19.7;
pub const L3: f64 = 46.7;

/// Upper end of `s₁+s̃₂+d̃₂` on the region where the certified bound holds.
pub const PADDED_SUM: f64 = 0.5 + 1.0 / 32.0;

const BULLET_TOL: f64 = 1e-12;

/// A partial of `f` or `g` that splits into an affine function of
/// `(s₁, s̃₂, d̃₂)` and a function of δ alone.
struct Separable {
    s: [f64; 3],
    k: f64,
    del: fn(Interval) -> Interval,
}

fn zero(_: Interval) -> Interval {
    Interval::point(0.0)
}

impl Separable {
    /// Exact range of the affine part over `{s ≥ 0, s₁+s̃₂+d̃₂ ≤ ½}` (attained
    /// at the vertices `0`, `½eᵢ`) plus the δ-part over `[1,2]`.
    fn range(&self) -> Interval {
        let vals = [self.k, self.k + 0.5 * self.s[0], self.k + 0.5 * self.s[1], self.k + 0.5 * self.s[2]];
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi) + (self.del)(Interval::new(1.0, 2.0))
    }
}

fn sep(s: [f64; 3], k: f64, del: fn(Interval) -> Interval) -> Separable {
    Separable { s, k, del }
}

fn c_of(d: Interval) -> Interval {
    Interval::point(4.0) / (Interval::point(2.0) + d) - Interval::point(1.0)
}

/// `[∂f, ∂g]` for α₂ then α₃, each over `(s₁, s̃₂, d̃₂, δ)`, with `∂g/∂δ` as 0.
fn partials() -> [[[Separable; 4]; 2]; 2] {
    [
        [
            [
                sep([0.0; 3], 0.0, |d| -(Interval::point(2.0) + d)),
                sep([0.0; 3], -2.0, zero),
                sep([0.0; 3], -2.0, zero),
                sep([-1.0, 0.0, 0.0], 0.0, zero),
            ],
            [
                sep([0.0, -2.0, 0.0], 0.0, zero),
                sep([-2.0, 0.0, 0.0], 0.0, |d| -c_of(d)),
                sep([0.0; 3], 0.0, |d| Interval::point(-2.0) * c_of(d)),
                sep([0.0; 3], 0.0, zero),
            ],
        ],
        [
            [
                sep([0.0; 3], 2.0, |d| Interval::point(-3.0) * d),
                sep([0.0; 3], 2.0, |d| Interval::point(-2.0) * d),
                sep([0.0; 3], 2.0, |d| Interval::point(-2.0) * d),
                sep([-3.0, -2.0, -2.0], 1.0, zero),
            ],
            [
                sep([8.0, 6.0, 4.0], -2.0, zero),
                sep([6.0, 8.0, 4.0], -1.0, |d| -(Interval::point(4.0) / (Interval::point(2.0) + d))),
                sep([4.0, 4.0, 0.0], 0.0, |d| Interval::point(-2.0) * c_of(d)),
                sep([0.0; 3], 0.0, zero),
            ],
        ],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialBounds {
    pub f: [Interval; 4],
    pub g: [Interval; 4],
    /// Enclosures of `|∂α/∂x_j|`.
    pub alpha: [Interval; 4],
    pub norm: Interval,
}

fn quotient_partials(f: [Interval; 4], g: [Interval; 4], delta_uses_g: bool) -> PartialBounds {
    let fr = Interval::new(0.0, 2.0);
    let gr = Interval::new(0.5, 1.0);
    let g2 = Interval::new(0.25, 1.0);
    let alpha: [Interval; 4] = std::array::from_fn(|j| {
        if j == 3 && !delta_uses_g {
            (f[3] / gr).abs()
        } else {
            ((f[j] * gr - g[j] * fr) / g2).abs()
        }
    });
    PartialBounds { f, g, alpha, norm: Interval::norm4(alpha) }
}

fn paper_literal() -> [PartialBounds; 2] {
    let p = partials();
    std::array::from_fn(|i| {
        let f = std::array::from_fn(|j| p[i][0][j].range());
        let g = std::array::from_fn(|j| p[i][1][j].range());
        quotient_partials(f, g, false)
    })
}

/// Same as the literal route but with `∂g/∂δ = 4(s̃₂+2d̃₂)/(2+δ)²`, which
/// is the same for both denominators.
fn corrected_coarse() -> [PartialBounds; 2] {
    let p = partials();
    let two_plus = Interval::point(2.0) + Interval::new(1.0, 2.0);
    let g_delta = Interval::point(4.0) / two_plus.sqr() * Interval::new(0.0, 1.0);
    std::array::from_fn(|i| {
        let f = std::array::from_fn(|j| p[i][0][j].range());
        let mut g: [Interval; 4] = std::array::from_fn(|j| p[i][1][j].range());
        g[3] = g_delta;
        quotient_partials(f, g, true)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedNorm {
    pub target: f64,
    /// Largest certified upper bound over the final boxes.
    pub bound: f64,
    pub boxes: u64,
    pub certified: bool,
}

const MAX_DEPTH: u32 = 8;

/// Interval enclosure of `‖∇α_i‖` over a box.
fn grad_norm_hi(b: &Box4, i: usize) -> f64 {
    let x = Dual::<Interval, 4>::vars(b.0);
    let (f, g) = restricted_parts(x)[i];
    let a = f / g;
    let n = Interval::norm4(a.d);
    if n.hi.is_nan() {
        f64::INFINITY
    } else {
        n.hi
    }
}

/// Depth-first subdivision of `[0,½]³ × [1,2]` clipped to the padded sum
/// constraint until every box has gradient norm at most `target`.
fn certify(i: usize, target: f64) -> CertifiedNorm {
    let q = Interval::new(0.0, 0.25);
    let h = Interval::new(0.25, 0.5);
    let mut stack: Vec<(Box4, u32)> = Vec::new();
    for mask in (0..32u32).rev() {
        let pick = |bit: u32| if mask >> bit & 1 == 0 { q } else { h };
        let lo_d = 1.0 + 0.25 * (mask >> 3) as f64;
        stack.push((Box4([pick(0), pick(1), pick(2), Interval::new(lo_d, lo_d + 0.25)]), 0));
    }
    let mut bound: f64 = 0.0;
    let mut boxes = 0u64;
    let mut certified = true;
    while let Some((b, depth)) = stack.pop() {
        if b.0[0].lo + b.0[1].lo + b.0[2].lo > PADDED_SUM {
            continue;
        }
        boxes += 1;
        let n = grad_norm_hi(&b, i);
        if n <= target {
            bound = bound.max(n);
        } else if depth < MAX_DEPTH {
            for k in b.split().into_iter().rev() {
                stack.push((k, depth + 1));
            }
        } else {
            certified = false;
            bound = bound.max(n);
        }
    }
    CertifiedNorm { target, bound, boxes, certified }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub paper_literal: [PartialBounds; 2],
    pub corrected_coarse: [PartialBounds; 2],
    pub certified: [CertifiedNorm; 2],
    /// Each literal partial contains the printed bullet and exceeds it by
    /// at most rounding noise.
    pub matches_bullets: bool,
    pub l2: f64,
    pub l3: f64,
}

impl LipschitzReport {
    /// The certified `(L₂, L₃)`, or an error naming the failed one.
    pub fn constants(&self) -> Result<(f64, f64), CertError> {
        for (c, name) in self.certified.iter().zip(["alpha2", "alpha3"]) {
            if !c.certified {
                return Err(CertError::Uncertified(format!("{name}: bound {} above target {}", c.bound, c.target)));
            }
        }
        Ok((self.l2, self.l3))
    }
}

fn matches_bullets(p: &[PartialBounds; 2]) -> bool {
    p.iter().zip(PAPER_BULLETS).all(|(b, bullets)| {
        b.alpha.iter().zip(bullets).all(|(a, (lo, hi))| {
            let bullet = Interval::new(lo, hi);
            bullet.subset_of(a) && a.subset_of(&Interval::new(lo - BULLET_TOL, hi + BULLET_TOL))
        })
    })
}

pub fn lipschitz_constants() -> LipschitzReport {
    let paper_literal = paper_literal();
    let corrected_coarse = corrected_coarse();
    let certified = [certify(0, L2), certify(1, L3)];
    LipschitzReport {
        matches_bullets: matches_bullets(&paper_literal),
        paper_literal,
        corrected_coarse,
        certified,
        l2: L2,
        l3: L3,
    }
}
