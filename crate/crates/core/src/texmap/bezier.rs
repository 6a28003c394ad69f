//! Second-order Bézier approximation of a projective row.
//!
//! The curve `r(t) = (x(t), u(t))` runs from the exact row endpoints with end
//! tangents equal to the true derivative `A / (g x + B)^2`, `B = h y + i`.
//! Its middle control abscissa does not depend on A, so u and v share it.

use super::{ProjectiveTexMap, exact_uv};
use crate::analysis::counter::Real;
use crate::error::{Error, Result};

/// Per-row constants that advance by additions only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowCoeffs {
    pub y: i64,
    /// a B - g (b y + c)
    pub a_u: f64,
    /// d B - g (e y + f)
    pub a_v: f64,
    /// h y + i
    pub b: f64,
}

impl RowCoeffs {
    pub fn new(m: &ProjectiveTexMap, y: i64) -> Self {
        let yf = y as f64;
        let b = m.h * yf + m.i;
        RowCoeffs {
            y,
            a_u: m.a * b - m.g * (m.b * yf + m.c),
            a_v: m.d * b - m.g * (m.e * yf + m.f),
            b,
        }
    }

    /// Next row: A += a h - g b, B += h.
    pub fn advance(&mut self, m: &ProjectiveTexMap) {
        self.a_u += m.a * m.h - m.g * m.b;
        self.a_v += m.d * m.h - m.g * m.e;
        self.b += m.h;
        self.y += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BezierRow {
    pub y: i64,
    pub x: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub coeffs: RowCoeffs,
    /// (g x0 + B)^2
    pub c0: f64,
    /// (g x2 + B)^2
    pub c2: f64,
}

/// Relative tolerance below which the end tangents count as parallel.
pub const AFFINE_ROW_TOL: f64 = 1e-9;

pub fn bezier_row<R: Real>(m: &ProjectiveTexMap, y: i64, x0: i64, x2: i64) -> Result<BezierRow> {
    bezier_row_from::<R>(m, RowCoeffs::new(m, y), x0, x2)
}

pub fn bezier_row_from<R: Real>(m: &ProjectiveTexMap, rc: RowCoeffs, x0: i64, x2: i64) -> Result<BezierRow> {
    let (xa, xb) = (R::lit(x0 as f64), R::lit(x2 as f64));
    let yr = R::lit(rc.y as f64);
    let (u0, v0) = exact_uv(m, xa, yr)?;
    let (u2, v2) = exact_uv(m, xb, yr)?;
    let g = R::lit(m.g);
    let b = R::lit(rc.b);
    let p = g * xa + b;
    let q = g * xb + b;
    let pm = p.get().abs().max(q.get().abs());
    if (p - q).get().abs() <= AFFINE_ROW_TOL * pm || x0 == x2 {
        return Err(Error::AffineRow);
    }
    // tangent intersection: g x1 + B = 2 p q / (p + q)
    let x1 = (R::lit(2.0) * p * q / (p + q) - b) / g;
    let c0 = p * p;
    let k = (x1 - xa) / c0;
    let u1 = u0 + R::lit(rc.a_u) * k;
    let v1 = v0 + R::lit(rc.a_v) * k;
    Ok(BezierRow {
        y: rc.y,
        x: [x0 as f64, x1.get(), x2 as f64],
        u: [u0.get(), u1.get(), u2.get()],
        v: [v0.get(), v1.get(), v2.get()],
        coeffs: rc,
        c0: c0.get(),
        c2: (q * q).get(),
    })
}

fn bern<R: Real>(p: [f64; 3], t: R) -> R {
    // p0 + t (2 (p1 - p0) + t (p0 - 2 p1 + p2))
    let s = R::lit(p[0] - 2.0 * p[1] + p[2]);
    let d = R::lit(2.0 * (p[1] - p[0]));
    R::lit(p[0]) + t * (d + t * s)
}

impl BezierRow {
    pub fn x_at<R: Real>(&self, t: R) -> R {
        bern(self.x, t)
    }

    pub fn u_at<R: Real>(&self, t: R) -> R {
        bern(self.u, t)
    }

    pub fn v_at<R: Real>(&self, t: R) -> R {
        bern(self.v, t)
    }

    /// S_x = x0 - 2 x1 + x2
    pub fn s_x(&self) -> f64 {
        self.x[0] - 2.0 * self.x[1] + self.x[2]
    }

    /// Curve parameter at screen x, from the quadratic's stable root.
    pub fn t_exact(&self, x: f64) -> f64 {
        let p = 2.0 * (self.x[1] - self.x[0]);
        let s = self.s_x();
        let dx = x - self.x[0];
        let disc = (p * p + 4.0 * s * dx).max(0.0);
        let den = p + p.signum() * disc.sqrt();
        if den == 0.0 { 0.0 } else { 2.0 * dx / den }
    }
}

/// Forward-difference walker over the curve: two adds per coordinate per step.
#[derive(Debug, Clone, Copy)]
pub struct FdStepper {
    pub t: f64,
    pub dt: f64,
    pub x: f64,
    pub u: f64,
    pub v: f64,
    delta: [f64; 3],
    second: [f64; 3],
}

impl FdStepper {
    pub fn new(row: &BezierRow, t0: f64, dt: f64) -> Self {
        let ctrl = [row.x, row.u, row.v];
        // delta(t) = dt (2 (p1 - p0) + (2 t + dt) S); second difference 2 dt^2 S
        let s = ctrl.map(|p| p[0] - 2.0 * p[1] + p[2]);
        let delta = std::array::from_fn(|k| dt * (2.0 * (ctrl[k][1] - ctrl[k][0]) + (2.0 * t0 + dt) * s[k]));
        let second = s.map(|s| 2.0 * dt * dt * s);
        FdStepper {
            t: t0,
            dt,
            x: row.x_at(t0),
            u: row.u_at(t0),
            v: row.v_at(t0),
            delta,
            second,
        }
    }

    pub fn step(&mut self) {
        self.x += self.delta[0];
        self.u += self.delta[1];
        self.v += self.delta[2];
        for k in 0..3 {
            self.delta[k] += self.second[k];
        }
        self.t += self.dt;
    }
}

/// `(x, u, v)` at t0, t0 + dt, ..., n steps.
pub fn bezier_eval_fd(row: &BezierRow, t0: f64, dt: f64, n: usize) -> Vec<(f64, f64, f64)> {
    let mut s = FdStepper::new(row, t0, dt);
    let mut out = Vec::with_capacity(n + 1);
    out.push((s.x, s.u, s.v));
    for _ in 0..n {
        s.step();
        out.push((s.x, s.u, s.v));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterParams {
    pub eps: f64,
    /// None means 1 / (4 * row length).
    pub dt0: Option<f64>,
    pub max_halvings: u32,
}

impl Default for IterParams {
    fn default() -> Self {
        IterParams {
            eps: 1e-3,
            dt0: None,
            max_halvings: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterTrace {
    /// Parameter per pixel, t[0] = 0.
    pub t: Vec<f64>,
    /// Curve abscissa at each accepted t.
    pub x: Vec<f64>,
    /// Signed sum of the dt/2^n terms removed from the increment.
    pub t_kor: Vec<f64>,
    /// Whole dt steps added (negative: removed) before the halvings.
    pub dt_steps: Vec<i64>,
    /// dt/2^n halvings used per pixel.
    pub halvings: Vec<u32>,
}

/// Walks t so each accepted x lands within eps of the next integer pixel.
///
/// Each pixel starts from the previous pixel's increment, adds or removes
/// whole dt steps to bracket the target, then refines with signed dt/2^n
/// terms.
pub fn bezier_param_iterative<R: Real>(row: &BezierRow, p: IterParams) -> Result<IterTrace> {
    let len = row.x[2] - row.x[0];
    let n_px = len.round() as i64;
    let dt = R::lit(p.dt0.unwrap_or(1.0 / (4.0 * len)));
    let eps = R::lit(p.eps);
    let mut tr = IterTrace {
        t: vec![0.0],
        x: vec![row.x[0]],
        t_kor: vec![0.0],
        dt_steps: vec![0],
        halvings: vec![0],
    };
    let mut t = R::lit(0.0);
    let mut inc = R::lit(0.0);
    for i in 1..=n_px {
        let target = R::lit(row.x[0] + i as f64);
        let (lo, hi) = (target - eps, target + eps);
        let mut cand = inc;
        let mut whole = 0i64;
        let mut x = row.x_at(t + cand);
        while x < lo {
            cand += dt;
            whole += 1;
            x = row.x_at(t + cand);
        }
        while x > hi && row.x_at(t + cand - dt) >= lo {
            cand -= dt;
            whole -= 1;
            x = row.x_at(t + cand);
        }
        let bracketed = cand;
        let mut step = dt;
        let mut n = 0u32;
        while x > hi || x < lo {
            n += 1;
            if n > p.max_halvings {
                return Err(Error::NonConvergence(format!(
                    "pixel {i}: {} halvings did not reach eps {}",
                    p.max_halvings, p.eps
                )));
            }
            step = step * R::lit(0.5);
            if x > hi {
                cand -= step;
            } else {
                cand += step;
            }
            x = row.x_at(t + cand);
        }
        t += cand;
        inc = cand;
        tr.t.push(t.get());
        tr.x.push(x.get());
        tr.t_kor.push((bracketed - cand).get());
        tr.dt_steps.push(whole);
        tr.halvings.push(n);
    }
    Ok(tr)
}

/// `t(x) = A1 x^2 + A2 x + A3` through (x0, 0), (x_mid, t1), (x2, 1).
pub fn bezier_param_quadratic<R: Real>(x0: R, x_mid: R, x2: R, t1: R) -> Result<[R; 3]> {
    if x0 == x_mid || x_mid == x2 || x0 == x2 {
        return Err(Error::CoincidentNodes);
    }
    let x1 = x_mid;
    let (s0, s1, s2) = (x0 * x0, x1 * x1, x2 * x2);
    let d = R::lit(1.0) / (s0 * (x1 - x2) + s1 * (x2 - x0) + s2 * (x0 - x1));
    let a1 = d * (t1 * (x2 - x0) + x0 - x1);
    let a2 = d * (t1 * (s0 - s2) - s0 + s1);
    let a3 = d * (s0 * (x1 - x2 * t1) - x0 * s1 + x0 * s2 * t1);
    Ok([a1, a2, a3])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BezierParam {
    /// Closed-form inverse of x(t).
    Exact,
    Iterative(IterParams),
    /// Quadratic t(x) through t = 0, t1, 1.
    Quadratic { t1: f64 },
}

/// (u, v) for xs..=xe on row y through the Bézier row. Rows too short or
/// too flat for a curve fall back to exact evaluation.
pub fn bezier_row_uv<R: Real>(m: &ProjectiveTexMap, y: i64, xs: i64, xe: i64, param: BezierParam) -> Result<Vec<(R, R)>> {
    let row = match bezier_row::<R>(m, y, xs, xe) {
        Ok(r) => r,
        Err(Error::AffineRow) => {
            let yr = R::lit(y as f64);
            return (xs..=xe).map(|x| exact_uv(m, R::lit(x as f64), yr)).collect();
        }
        Err(e) => return Err(e),
    };
    let ts: Vec<R> = match param {
        BezierParam::Exact => (xs..=xe).map(|x| R::lit(row.t_exact(x as f64))).collect(),
        BezierParam::Iterative(p) => bezier_param_iterative::<R>(&row, p)?
            .t
            .into_iter()
            .map(R::lit)
            .collect(),
        BezierParam::Quadratic { t1 } => {
            let t1r = R::lit(t1);
            let xm = row.x_at(t1r);
            let [a1, a2, a3] = bezier_param_quadratic(R::lit(row.x[0]), xm, R::lit(row.x[2]), t1r)?;
            (xs..=xe)
                .map(|x| {
                    let xr = R::lit(x as f64);
                    (a1 * xr + a2) * xr + a3
                })
                .collect()
        }
    };
    Ok(ts.into_iter().map(|t| (row.u_at(t), row.v_at(t))).collect())
}
