//! Lines of constant world depth across a triangle's screen image.
//!
//! A world plane `A X + B Y + C Z = D` seen through a pinhole has
//! `Z = D / (A' x + B' y + C')` on screen, so depth is constant along
//! `y = k x + h` with `k = -A'/B'`.

use super::scanline::{Coverage, FillRule};
use crate::analysis::counter::Real;
use crate::error::{Error, Result};
use crate::geometry::{Pinhole, ScreenTriangle, WorldPoint};
use crate::texmap::ProjectiveTexMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PlaneCoeffs {
    pub fn from_points(p: [WorldPoint; 3]) -> Result<Self> {
        let e1 = p[1].vec() - p[0].vec();
        let e2 = p[2].vec() - p[0].vec();
        let n = e1.cross(&e2);
        if n.norm() <= 1e-300 {
            return Err(Error::DegenerateTriangle);
        }
        Ok(PlaneCoeffs {
            a: n.x,
            b: n.y,
            c: n.z,
            d: n.dot(&p[0].vec()),
        })
    }

    pub fn eval(&self, p: WorldPoint) -> f64 {
        self.a * p.x + self.b * p.y + self.c * p.z - self.d
    }

    /// Same plane in screen terms: `Z = D / (A x + B y + C)`.
    pub fn screen(&self, cam: &Pinhole) -> PlaneCoeffs {
        PlaneCoeffs {
            a: self.a / cam.sx,
            b: self.b / cam.sy,
            c: self.c - self.a * cam.ox / cam.sx - self.b * cam.oy / cam.sy,
            d: self.d,
        }
    }
}

/// Relative size under which a screen plane coefficient is treated as zero.
pub const PLANE_TOL: f64 = 1e-12;

/// Slope of the constant-depth screen lines of a screen-space plane.
pub fn constz_slope(p: &PlaneCoeffs) -> Result<f64> {
    let s = p.a.abs().max(p.b.abs()).max(p.c.abs());
    if p.a.abs() <= PLANE_TOL * s {
        return Ok(0.0);
    }
    if p.b.abs() <= PLANE_TOL * s {
        return Err(Error::HorizontalDegeneracy);
    }
    Ok(-p.a / p.b)
}

/// World depth on the line `y = k x + h`.
pub fn constz_depth(p: &PlaneCoeffs, h: f64) -> f64 {
    p.d / (p.b * h + p.c)
}

/// (u, v) at the real points (x, k x + h) for x in x0..=x1. The denominator
/// is fixed on the line, so one division per line and one add per pixel.
pub fn constz_texture_row<R: Real>(m: &ProjectiveTexMap, k: f64, h: f64, x0: i64, x1: i64) -> Result<Vec<(R, R)>> {
    if (m.g + m.h * k).abs() > 1e-9 * m.scale().max(1e-300) * (1.0 + k.abs()) {
        return Err(Error::NotConstantDepth);
    }
    let den = R::lit(m.h) * R::lit(h) + R::lit(m.i);
    if !(den > R::lit(0.0)) {
        return Err(Error::BehindProjection { x: x0 as f64, y: k * x0 as f64 + h });
    }
    let rr = R::lit(1.0) / den;
    let kr = R::lit(k);
    let du = rr * (R::lit(m.a) + R::lit(m.b) * kr);
    let dv = rr * (R::lit(m.d) + R::lit(m.e) * kr);
    let xs = R::lit(x0 as f64);
    let ys = kr * xs + R::lit(h);
    let mut u = (R::lit(m.a) * xs + R::lit(m.b) * ys + R::lit(m.c)) * rr;
    let mut v = (R::lit(m.d) * xs + R::lit(m.e) * ys + R::lit(m.f)) * rr;
    let mut out = Vec::with_capacity((x1 - x0 + 1).max(0) as usize);
    for x in x0..=x1 {
        out.push((u, v));
        if x < x1 {
            u += du;
            v += dv;
        }
    }
    Ok(out)
}

/// Rectangle swept by sheared lines `(x, j + round(k (x - x_left)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingRect {
    pub k: f64,
    pub x_left: i64,
    pub x_right: i64,
    pub j_min: i64,
    pub j_max: i64,
    /// k (x_top - x_min): line offset at the vertex the first line meets
    pub r_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub x: i64,
    pub y: i64,
    pub line: i64,
    pub inside: bool,
}

fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

pub fn bounding_rect(t: &ScreenTriangle, k: f64) -> Result<BoundingRect> {
    let cov = Coverage::new(t, FillRule::TopLeft)?;
    let (x_min, _, x_max, _) = cov.bbox();
    let x_left = x_min.ceil() as i64;
    let x_right = x_max.floor() as i64;
    let off = |p: (f64, f64)| p.1 - k * (p.0 - x_left as f64);
    let top = cov
        .xy
        .iter()
        .cloned()
        .min_by(|a, b| off(*a).total_cmp(&off(*b)))
        .unwrap();
    let offs = cov.xy.map(off);
    let lo = offs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = offs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundingRect {
        k,
        x_left,
        x_right,
        j_min: lo.floor() as i64 - 1,
        j_max: hi.ceil() as i64 + 1,
        r_offset: k * (top.0 - x_min),
    })
}

// x-extent of the triangle clipped to |y - k x - c| <= 1/2
fn strip_extent(xy: [(f64, f64); 3], k: f64, c: f64) -> Option<(f64, f64)> {
    let mut poly: Vec<(f64, f64)> = xy.to_vec();
    for (sign, bound) in [(1.0, c + 0.5), (-1.0, -(c - 0.5))] {
        // keep sign * (y - k x) <= bound
        let f = |p: (f64, f64)| sign * (p.1 - k * p.0) - bound;
        let mut next = Vec::with_capacity(poly.len() + 2);
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            let (fa, fb) = (f(a), f(b));
            if fa <= 0.0 {
                next.push(a);
            }
            if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                let s = fa / (fa - fb);
                next.push((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
            }
        }
        poly = next;
        if poly.is_empty() {
            return None;
        }
    }
    let lo = poly.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = poly.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

impl BoundingRect {
    pub fn line_y(&self, j: i64, x: i64) -> i64 {
        j + round_half_up(self.k * (x - self.x_left) as f64)
    }

    /// Last x a line needs: beyond it no pixel of the line can be inside.
    pub fn strip_bound(&self, t: &ScreenTriangle, j: i64) -> Option<i64> {
        let c = j as f64 - self.k * self.x_left as f64;
        strip_extent(t.xy(), self.k, c).map(|(_, hi)| hi.floor() as i64)
    }

    /// Walks every line from the rectangle's left side and stops at the
    /// line's strip bound, so the region right of the triangle is skipped.
    pub fn traverse(&self, t: &ScreenTriangle, rule: FillRule) -> Result<Vec<Visit>> {
        let cov = Coverage::new(t, rule)?;
        let mut out = Vec::new();
        for j in self.j_min..=self.j_max {
            let Some(stop) = self.strip_bound(t, j) else {
                continue;
            };
            for x in self.x_left..=self.x_right.min(stop) {
                let y = self.line_y(j, x);
                out.push(Visit {
                    x,
                    y,
                    line: j,
                    inside: cov.inside(x as f64, y as f64),
                });
            }
        }
        Ok(out)
    }
}
