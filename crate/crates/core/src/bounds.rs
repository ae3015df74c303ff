//! Closed-form upper and lower bound curves for α*(δ, l).

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("delta = {0} outside {1}")]
    Domain(f64, &'static str),
    #[error("{0} needs a round count l >= 1")]
    MissingRounds(BoundKind),
    #[error("w[{0}] = 0: division by zero")]
    ZeroWeight(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    OneRound,
    TwoSmall,
    TwoLarge,
    TwoRestricted,
    ThreeRestricted,
    PriorLRounds,
    PriorDelta1,
    Alweiss,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::OneRound,
        BoundKind::TwoSmall,
        BoundKind::TwoLarge,
        BoundKind::TwoRestricted,
        BoundKind::ThreeRestricted,
        BoundKind::PriorLRounds,
        BoundKind::PriorDelta1,
        BoundKind::Alweiss,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::OneRound => "one_round",
            BoundKind::TwoSmall => "two_small",
            BoundKind::TwoLarge => "two_large",
            BoundKind::TwoRestricted => "two_restricted",
            BoundKind::ThreeRestricted => "three_restricted",
            BoundKind::PriorLRounds => "prior_l_rounds",
            BoundKind::PriorDelta1 => "prior_delta1",
            BoundKind::Alweiss => "alweiss",
        }
    }

    pub fn needs_rounds(&self) -> bool {
        matches!(self, BoundKind::PriorLRounds | BoundKind::PriorDelta1)
    }

    /// Where the curve is meaningful for plotting: `two_small` ends at 6/5,
    /// `two_large`/`two_restricted` start there and `prior_delta1` is a
    /// single value at δ = 1.
    pub fn plotted_at(&self, delta: f64) -> bool {
        match self {
            BoundKind::TwoSmall => delta <= 1.2 + 1e-12,
            BoundKind::TwoLarge | BoundKind::TwoRestricted => delta >= 1.2 - 1e-12,
            BoundKind::PriorDelta1 => (delta - 1.0).abs() < 1e-12,
            _ => true,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundKind::ALL.iter().find(|k| k.name() == s).copied().ok_or_else(|| format!("unknown bound kind `{s}`"))
    }
}

fn check_delta(delta: f64) -> Result<(), BoundError> {
    if (1.0..2.0).contains(&delta) {
        Ok(())
    } else {
        Err(BoundError::Domain(delta, "[1, 2)"))
    }
}

pub fn closed_form_bound(kind: BoundKind, delta: f64, l: Option<u32>) -> Result<f64, BoundError> {
    check_delta(delta)?;
    let rounds = || match l {
        Some(l) if l >= 1 => Ok(l as i32),
        _ => Err(BoundError::MissingRounds(kind)),
    };
    Ok(match kind {
        BoundKind::OneRound => delta,
        BoundKind::TwoSmall => 4.0 * delta / 3.0,
        BoundKind::TwoLarge => 1.0 + ((delta - 1.0) * (3.0 - delta)).sqrt(),
        BoundKind::TwoRestricted | BoundKind::ThreeRestricted => 1.0 + delta / 2.0,
        BoundKind::PriorLRounds => 2.0 - delta * ((2.0 - delta) / 2.0).powi(rounds()?),
        BoundKind::PriorDelta1 => {
            let l = rounds()?;
            2f64.powf(1.0 - 1.0 / (2f64.powi(l) - 1.0))
        }
        BoundKind::Alweiss => 1.0 + (1.0 - (2.0 - delta).powi(2) / 2.0).sqrt(),
    })
}

fn rational_sqrt(x: Ratio<i64>) -> Option<Ratio<i64>> {
    fn isqrt(n: i64) -> Option<i64> {
        if n < 0 {
            return None;
        }
        let mut r = (n as f64).sqrt() as i64;
        while r * r > n {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= n {
            r += 1;
        }
        (r * r == n).then_some(r)
    }
    Some(Ratio::new(isqrt(*x.numer())?, isqrt(*x.denom())?))
}

/// `two_small` and `two_large` in exact arithmetic at a rational δ. The
/// second is `None` when `(δ−1)(3−δ)` is not the square of a rational.
pub fn two_round_exact(delta: Ratio<i64>) -> (Ratio<i64>, Option<Ratio<i64>>) {
    let one = Ratio::from_integer(1);
    let small = Ratio::from_integer(4) * delta / 3;
    let large = rational_sqrt((delta - one) * (Ratio::from_integer(3) - delta)).map(|r| one + r);
    (small, large)
}

/// `min_i (2 − (4 − 2·max_{j≤i} δ_j)·m_i) / w_{i−1}` with `w = [w_0, …, w_{l−1}]`.
pub fn gen_lemma_bound(deltas: &[f64], ms: &[f64], ws: &[f64]) -> Result<f64, BoundError> {
    let l = deltas.len();
    if l == 0 || ms.len() != l || ws.len() != l {
        return Err(BoundError::Invalid(format!(
            "lengths differ or are zero: {} deltas, {} m, {} w",
            l,
            ms.len(),
            ws.len()
        )));
    }
    if ws[0] != 1.0 {
        return Err(BoundError::Invalid(format!("w_0 must be 1, got {}", ws[0])));
    }
    if let Some(m) = ms.iter().find(|m| !(0.0..=0.5).contains(*m)) {
        return Err(BoundError::Invalid(format!("m = {m} outside [0, 1/2]")));
    }
    let mut best = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for i in 0..l {
        dmax = dmax.max(deltas[i]);
        let w = ws[i];
        if w == 0.0 {
            return Err(BoundError::ZeroWeight(i));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(BoundError::Invalid(format!("w = {w} outside (0, 1]")));
        }
        best = best.min((2.0 - (4.0 - 2.0 * dmax) * ms[i]) / w);
    }
    Ok(best)
}

/// `(α₁, α₂)` along the matching fraction `m₁` in the two-round proofs.
pub fn two_round_curves(delta: f64, m1: f64, restricted: bool) -> Result<(f64, f64), BoundError> {
    check_delta(delta)?;
    if !(0.0..=0.5).contains(&m1) {
        return Err(BoundError::Invalid(format!("m1 = {m1} outside [0, 1/2]")));
    }
    if restricted {
        let d1 = 1.5 - delta / 4.0;
        let a1 = 2.0 - (4.0 - 2.0 * d1) * m1;
        let a2 = (delta - (2.5 * delta - 3.0) * m1) / (4.0 * m1 * m1 - 2.0 * m1 + 1.0);
        Ok((a1, a2))
    } else {
        let a1 = 2.0 - (4.0 - 2.0 * delta) * m1;
        let a2 = delta / (1.0 - 4.0 * m1 * (0.5 - m1));
        Ok((a1, a2))
    }
}

fn check_open_six_fifths(delta: f64) -> Result<(), BoundError> {
    if delta > 1.2 && delta < 2.0 {
        Ok(())
    } else {
        Err(BoundError::Domain(delta, "(6/5, 2)"))
    }
}

/// Crossing point of the unrestricted two-round curves,
/// `(1 − √((δ−1)(3−δ)))/(4−2δ)`, evaluated as `x / (2(1 + √(1−x²)))` with
/// `x = 2 − δ` to avoid cancellation.
pub fn crossing_root(delta: f64) -> Result<f64, BoundError> {
    check_open_six_fifths(delta)?;
    let x = 2.0 - delta;
    Ok(x / (2.0 * (1.0 + ((delta - 1.0) * (3.0 - delta)).sqrt())))
}

/// The cubic whose roots are the crossings (one root is always ½).
pub fn crossing_cubic(delta: f64, m: f64) -> f64 {
    -(16.0 - 8.0 * delta) * m.powi(3) + (16.0 - 4.0 * delta) * m * m - (8.0 - 2.0 * delta) * m + 2.0 - delta
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixBReport {
    pub delta: f64,
    pub m_star: f64,
    pub alpha2_at_m_star: f64,
    pub identity_residual: f64,
    pub derivative_root: f64,
    pub identity_holds: bool,
    pub root_beyond_m_star: bool,
}

/// Restricted two-round algebra: α₂(m*) = 1 + δ/2 and the derivative root of
/// α₂ lies at or beyond m*.
pub fn appendix_b_check(delta: f64) -> Result<AppendixBReport, BoundError> {
    check_open_six_fifths(delta)?;
    let m_star = (1.0 - delta / 2.0) / (1.0 + delta / 2.0);
    let (_, a2) = two_round_curves(delta, m_star, true)?;
    let residual = (a2 - (1.0 + delta / 2.0)).abs();
    let root = derivative_root(delta);
    Ok(AppendixBReport {
        delta,
        m_star,
        alpha2_at_m_star: a2,
        identity_residual: residual,
        derivative_root: root,
        identity_holds: residual < 1e-12,
        root_beyond_m_star: root >= m_star,
    })
}

/// `(4δ − √(21δ² − 36δ + 36)) / (2(5δ − 6))`, rewritten as
/// `(6 − δ) / (2(4δ + √(21δ² − 36δ + 36)))` which stays finite at δ = 6/5.
pub fn derivative_root(delta: f64) -> f64 {
    let disc = (21.0 * delta * delta - 36.0 * delta + 36.0).sqrt();
    (6.0 - delta) / (2.0 * (4.0 * delta + disc))
}
