//! Quadratic fits of a texture coordinate along one rasterization row.

use super::{ProjectiveTexMap, exact_uv};
use crate::analysis::counter::Real;
use crate::error::{Error, Result};

/// `p(t) = A t^2 + B t + C` on the normalized row parameter `t` in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadApproxCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x_int: f64,
    pub r: f64,
    pub s: f64,
    pub q: f64,
}

impl QuadApproxCoeffs {
    pub fn eval(&self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }

    pub fn eval_r<R: Real>(&self, t: R) -> R {
        (R::lit(self.a) * t + R::lit(self.b)) * t + R::lit(self.c)
    }
}

/// Which linear coefficient the midpoint fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadFitVariant {
    /// B = -3 u0 + 4 u_mid - u1, exact at t = 1.
    #[default]
    Corrected,
    /// B = -3 u0 + 4 u_mid - 2 u1. Misses u1 at t = 1 by -u1; kept for comparison.
    Uncorrected,
}

pub fn quad_fit_normalized(u0: f64, u_mid: f64, u1: f64) -> QuadApproxCoeffs {
    quad_fit_normalized_variant(u0, u_mid, u1, QuadFitVariant::Corrected)
}

pub fn quad_fit_normalized_variant(u0: f64, u_mid: f64, u1: f64, variant: QuadFitVariant) -> QuadApproxCoeffs {
    let b = match variant {
        QuadFitVariant::Corrected => -3.0 * u0 + 4.0 * u_mid - u1,
        QuadFitVariant::Uncorrected => -3.0 * u0 + 4.0 * u_mid - 2.0 * u1,
    };
    let r = 0.5 * (u1 - u0);
    let s = u0 - u_mid;
    QuadApproxCoeffs {
        a: 2.0 * u0 - 4.0 * u_mid + 2.0 * u1,
        b,
        c: u0,
        x_int: 0.5,
        r,
        s,
        q: -4.0,
    }
}

/// Fit through (0, u0), (x_int, u_int), (1, u1).
pub fn quad_fit_anchored(x_int: f64, u0: f64, u_int: f64, u1: f64) -> Result<QuadApproxCoeffs> {
    if !(x_int > 0.0 && x_int < 1.0) {
        return Err(Error::AnchorOutOfRange(x_int));
    }
    let r = x_int * (u1 - u0);
    let s = u0 - u_int;
    let q = 1.0 / (x_int * x_int - x_int);
    Ok(QuadApproxCoeffs {
        a: -q * (r + s),
        b: q * (r * x_int + s),
        c: u0,
        x_int,
        r,
        s,
        q,
    })
}

/// Weights of (u1, u0, u_int) in A and in B for a fixed anchor.
pub fn anchor_weights(x_int: f64) -> Result<([f64; 3], [f64; 3])> {
    if !(x_int > 0.0 && x_int < 1.0) {
        return Err(Error::AnchorOutOfRange(x_int));
    }
    let q = 1.0 / (x_int * x_int - x_int);
    let a = [-q * x_int, -q * (1.0 - x_int), q];
    let b = [q * x_int * x_int, q * (1.0 - x_int * x_int), -q];
    Ok((a, b))
}

/// Anchor choice from the coordinate values at the row ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorRule {
    /// How close to 0 or 1 counts as "at" 0 or 1.
    pub near: f64,
}

impl Default for AnchorRule {
    fn default() -> Self {
        AnchorRule { near: 0.05 }
    }
}

impl AnchorRule {
    pub fn pick(&self, u0: f64, u1: f64) -> f64 {
        let band = |d: f64, lo: f64, mid: f64, hi: f64| -> Option<f64> {
            if (0.0..0.35).contains(&d) {
                Some(lo)
            } else if (0.35..0.75).contains(&d) {
                Some(mid)
            } else if (0.75..=0.95).contains(&d) {
                Some(hi)
            } else {
                None
            }
        };
        if u0 <= self.near {
            return 0.25;
        }
        if u1 <= self.near {
            return 0.75;
        }
        if u0 >= 1.0 - self.near && u1 >= self.near
            && let Some(x) = band(u0 - u1, 0.5, 0.6, 0.7) {
                return x;
            }
        if u1 >= 1.0 - self.near && u0 >= self.near
            && let Some(x) = band(u1 - u0, 0.5, 0.4, 0.3) {
                return x;
            }
        if u0 < 0.5 && u1 < 0.5 {
            if u0 < u1 {
                return 0.4;
            }
            if u0 > u1 {
                return 0.6;
            }
        }
        0.5
    }
}

pub fn recommend_anchor(u0: f64, u1: f64) -> f64 {
    AnchorRule::default().pick(u0, u1)
}

/// Fit in raw screen x through three nodes. One division.
pub fn quad_fit_unnormalized<R: Real>(x: [R; 3], u: [R; 3]) -> Result<[R; 3]> {
    let [x0, x1, x2] = x;
    let [u0, u1, u2] = u;
    if x0 == x1 || x1 == x2 || x0 == x2 {
        return Err(Error::CoincidentNodes);
    }
    let (s0, s1, s2) = (x0 * x0, x1 * x1, x2 * x2);
    let d = R::lit(1.0) / (s0 * (x1 - x2) + s1 * (x2 - x0) + s2 * (x0 - x1));
    let a1 = d * (u0 * (x1 - x2) + u1 * (x2 - x0) + u2 * (x0 - x1));
    let a2 = d * (s0 * (u1 - u2) + s1 * (u2 - u0) + s2 * (u0 - u1));
    let a3 = d * (s0 * (x1 * u2 - x2 * u1) + s1 * (x2 * u0 - x0 * u2) + s2 * (x0 * u1 - x1 * u0));
    Ok([a1, a2, a3])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    Fixed(f64),
    Recommended(AnchorRule),
}

/// Quadratic-in-t approximation of (u, v) for x_s..=x_e on row y. Divisions
/// happen only per row: the exact node values and the parameter step.
pub fn quad_row<R: Real>(m: &ProjectiveTexMap, y: i64, xs: i64, xe: i64, anchor: Anchor) -> Result<Vec<(R, R)>> {
    let yf = y as f64;
    if xe <= xs {
        return (xs..=xe).map(|x| exact_uv(m, R::lit(x as f64), R::lit(yf))).collect();
    }
    let len = (xe - xs) as f64;
    let (u0, v0) = exact_uv(m, xs as f64, yf)?;
    let (u1, v1) = exact_uv(m, xe as f64, yf)?;
    let fit = |c0: f64, c1: f64, pick: usize| -> Result<QuadApproxCoeffs> {
        let xi = match anchor {
            Anchor::Fixed(x) => x,
            Anchor::Recommended(rule) => rule.pick(c0, c1),
        };
        let (iu, iv) = exact_uv(m, xs as f64 + xi * len, yf)?;
        quad_fit_anchored(xi, c0, if pick == 0 { iu } else { iv }, c1)
    };
    let fu = fit(u0, u1, 0)?;
    let fv = fit(v0, v1, 1)?;
    let step = R::lit(1.0) / R::lit(len);
    let mut t = R::lit(0.0);
    let mut out = Vec::with_capacity((xe - xs + 1) as usize);
    for _ in xs..=xe {
        out.push((fu.eval_r(t), fv.eval_r(t)));
        t += step;
    }
    Ok(out)
}
