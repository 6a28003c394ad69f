//! Screen to texture mapping and the ways of evaluating it.
//!
//! `u = (a x + b y + c) / (g x + h y + i)`, `v = (d x + e y + f) / (g x + h y + i)`.

pub mod bezier;
pub mod bivariate;
pub mod midpoint;
pub mod quadratic;

use nalgebra::{SMatrix, SVector};

use crate::analysis::counter::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveTexMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub i: f64,
}

impl ProjectiveTexMap {
    pub fn from_coeffs(k: [f64; 9]) -> Self {
        ProjectiveTexMap {
            a: k[0],
            b: k[1],
            c: k[2],
            d: k[3],
            e: k[4],
            f: k[5],
            g: k[6],
            h: k[7],
            i: k[8],
        }
    }

    pub fn coeffs(&self) -> [f64; 9] {
        [self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h, self.i]
    }

    pub fn identity() -> Self {
        Self::from_coeffs([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_coeffs(self.coeffs().map(|k| k * s))
    }

    pub fn scale(&self) -> f64 {
        self.coeffs().iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }

    /// Same map with the screen axes exchanged: `t.uv(y, x) == uv(x, y)`.
    pub fn transposed(&self) -> Self {
        Self::from_coeffs([self.b, self.a, self.c, self.e, self.d, self.f, self.h, self.g, self.i])
    }

    pub fn denom(&self, x: f64, y: f64) -> f64 {
        self.g * x + self.h * y + self.i
    }

    pub fn det(&self) -> f64 {
        let m = nalgebra::Matrix3::new(self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h, self.i);
        m.determinant()
    }

    /// Plain f64 evaluation; see [`exact_uv`] for the counted kernel.
    pub fn uv(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        exact_uv(self, x, y)
    }

    /// Affine map through three screen points.
    pub fn affine_from_triangle(xy: [(f64, f64); 3], uv: [[f64; 2]; 3]) -> Result<Self> {
        let m = nalgebra::Matrix3::from_fn(|r, c| match c {
            0 => xy[r].0,
            1 => xy[r].1,
            _ => 1.0,
        });
        let lu = m.lu();
        let su = lu
            .solve(&nalgebra::Vector3::new(uv[0][0], uv[1][0], uv[2][0]))
            .ok_or(Error::DegenerateQuad)?;
        let sv = lu
            .solve(&nalgebra::Vector3::new(uv[0][1], uv[1][1], uv[2][1]))
            .ok_or(Error::DegenerateQuad)?;
        Ok(Self::from_coeffs([su[0], su[1], su[2], sv[0], sv[1], sv[2], 0.0, 0.0, 1.0]))
    }

    /// Perspective map of a planar triangle from screen positions, world
    /// depths and vertex uv: 1/z, u/z and v/z are affine on the screen.
    pub fn from_triangle(xy: [(f64, f64); 3], depth: [f64; 3], uv: [[f64; 2]; 3]) -> Result<Self> {
        let m = nalgebra::Matrix3::from_fn(|r, c| match c {
            0 => xy[r].0,
            1 => xy[r].1,
            _ => 1.0,
        });
        let lu = m.lu();
        let solve = |rhs: [f64; 3]| {
            lu.solve(&nalgebra::Vector3::from(rhs))
                .ok_or(Error::DegenerateQuad)
        };
        let w = solve(depth.map(|z| 1.0 / z))?;
        let su = solve(std::array::from_fn(|k| uv[k][0] / depth[k]))?;
        let sv = solve(std::array::from_fn(|k| uv[k][1] / depth[k]))?;
        // positive scale keeps the denominator positive over the triangle
        let s = if w[2] != 0.0 {
            1.0 / w[2].abs()
        } else {
            1.0 / w[0].abs().max(w[1].abs())
        };
        Ok(Self::from_coeffs([
            su[0] * s,
            su[1] * s,
            su[2] * s,
            sv[0] * s,
            sv[1] * s,
            sv[2] * s,
            w[0] * s,
            w[1] * s,
            w[2] * s,
        ]))
    }
}

/// Exact evaluation: 6 multiplies, 6 adds, 2 divides and the sign test.
pub fn exact_uv<R: Real>(m: &ProjectiveTexMap, x: R, y: R) -> Result<(R, R)> {
    let den = R::lit(m.g) * x + R::lit(m.h) * y + R::lit(m.i);
    if !(den > R::lit(0.0)) {
        return Err(Error::BehindProjection { x: x.get(), y: y.get() });
    }
    let u = (R::lit(m.a) * x + R::lit(m.b) * y + R::lit(m.c)) / den;
    let v = (R::lit(m.d) * x + R::lit(m.e) * y + R::lit(m.f)) / den;
    Ok((u, v))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn any_three_collinear(p: &[(f64, f64); 4]) -> bool {
    let span = p
        .iter()
        .flat_map(|a| p.iter().map(move |b| (a.0 - b.0).abs().max((a.1 - b.1).abs())))
        .fold(0.0f64, f64::max);
    if span == 0.0 {
        return true;
    }
    let tol = 1e-12 * span * span;
    (0..4).any(|skip| {
        let q: Vec<_> = (0..4).filter(|&k| k != skip).map(|k| p[k]).collect();
        cross(q[0], q[1], q[2]).abs() <= tol
    })
}

/// Homography taking the four screen corners to the four texture corners.
/// Solved as the null vector of the 8x9 correspondence system. Scaled so
/// that |i| = 1 when i is not zero; the sign is then chosen so the
/// denominator is positive at the corners (i = -1 for some quads).
pub fn derive_from_quad(screen: [(f64, f64); 4], uv: [(f64, f64); 4]) -> Result<ProjectiveTexMap> {
    if any_three_collinear(&screen) || any_three_collinear(&uv) {
        return Err(Error::DegenerateQuad);
    }
    // Centre and scale the screen points so the system is well conditioned.
    let cx = screen.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let cy = screen.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let s = screen
        .iter()
        .map(|p| (p.0 - cx).abs().max((p.1 - cy).abs()))
        .fold(0.0f64, f64::max);
    let mut a = SMatrix::<f64, 9, 9>::zeros();
    for k in 0..4 {
        let (x, y) = ((screen[k].0 - cx) / s, (screen[k].1 - cy) / s);
        let (u, v) = uv[k];
        let r = 2 * k;
        // a x + b y + c - u (g x + h y + i) = 0
        a[(r, 0)] = x;
        a[(r, 1)] = y;
        a[(r, 2)] = 1.0;
        a[(r, 6)] = -u * x;
        a[(r, 7)] = -u * y;
        a[(r, 8)] = -u;
        a[(r + 1, 3)] = x;
        a[(r + 1, 4)] = y;
        a[(r + 1, 5)] = 1.0;
        a[(r + 1, 6)] = -v * x;
        a[(r + 1, 7)] = -v * y;
        a[(r + 1, 8)] = -v;
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.ok_or(Error::SingularSystem)?;
    let (kmin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (k, &sv)| if sv < best.1 { (k, sv) } else { best });
    let n: SVector<f64, 9> = vt.row(kmin).transpose();
    // undo the normalization: x' = (x - cx)/s
    let (an, bn, cn) = (n[0] / s, n[1] / s, n[2] - (n[0] * cx + n[1] * cy) / s);
    let (dn, en, fn_) = (n[3] / s, n[4] / s, n[5] - (n[3] * cx + n[4] * cy) / s);
    let (gn, hn, in_) = (n[6] / s, n[7] / s, n[8] - (n[6] * cx + n[7] * cy) / s);
    let mut m = ProjectiveTexMap::from_coeffs([an, bn, cn, dn, en, fn_, gn, hn, in_]);
    let scale = m.scale();
    if in_.abs() > 1e-12 * scale {
        m = m.scaled(1.0 / in_);
    } else {
        m = m.scaled(1.0 / scale);
    }
    if m.denom(screen[0].0, screen[0].1) < 0.0 {
        m = m.scaled(-1.0);
    }
    if screen.iter().any(|p| m.denom(p.0, p.1) <= 0.0) {
        return Err(Error::DegenerateQuad);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapClass {
    Affine,
    RowConstantV,
    ColConstantU,
    General,
}

pub const CLASSIFY_TOL: f64 = 1e-9;

pub fn classify_map(m: &ProjectiveTexMap, tol: f64) -> MapClass {
    let s = m.scale();
    let zero = |k: f64| k.abs() <= tol * s;
    if zero(m.g) && zero(m.h) && !zero(m.i) {
        MapClass::Affine
    } else if zero(m.d) && zero(m.g) {
        MapClass::RowConstantV
    } else if zero(m.b) && zero(m.h) {
        MapClass::ColConstantU
    } else {
        MapClass::General
    }
}

/// Per-pixel (u, v) along row `y` for `x` in `x0..=x1` using the cheapest
/// scheme the class allows.
///
/// Affine rows expect `i = 1` (as produced by [`derive_from_quad`]) and use
/// no division. RowConstantV rows spend one division per row. General rows
/// fall back to exact evaluation.
pub fn row_uv_specialized<R: Real>(
    m: &ProjectiveTexMap,
    y: i64,
    x0: i64,
    x1: i64,
    class: MapClass,
) -> Result<Vec<(R, R)>> {
    let actual = classify_map(m, CLASSIFY_TOL);
    let yr = R::lit(y as f64);
    let mut out = Vec::with_capacity((x1 - x0 + 1).max(0) as usize);
    match class {
        MapClass::Affine => {
            if actual != MapClass::Affine || m.i != 1.0 {
                return Err(Error::ClassMismatch);
            }
            let au = R::lit(m.b) * yr + R::lit(m.c);
            let av = R::lit(m.e) * yr + R::lit(m.f);
            for x in x0..=x1 {
                let xr = R::lit(x as f64);
                out.push((R::lit(m.a) * xr + au, R::lit(m.d) * xr + av));
            }
        }
        MapClass::RowConstantV => {
            if !matches!(actual, MapClass::RowConstantV)
                && !(actual == MapClass::Affine && m.d.abs() <= CLASSIFY_TOL * m.scale())
            {
                return Err(Error::ClassMismatch);
            }
            let den = R::lit(m.h) * yr + R::lit(m.i);
            if !(den > R::lit(0.0)) {
                return Err(Error::BehindProjection { x: x0 as f64, y: y as f64 });
            }
            let bu = R::lit(1.0) / den;
            let au = R::lit(m.b) * yr + R::lit(m.c);
            let v = (R::lit(m.e) * yr + R::lit(m.f)) * bu;
            for x in x0..=x1 {
                let xr = R::lit(x as f64);
                out.push(((R::lit(m.a) * xr + au) * bu, v));
            }
        }
        MapClass::ColConstantU => return Err(Error::ClassMismatch),
        MapClass::General => {
            for x in x0..=x1 {
                out.push(exact_uv(m, R::lit(x as f64), yr)?);
            }
        }
    }
    Ok(out)
}

/// Column counterpart of [`row_uv_specialized`] for ColConstantU maps:
/// u is fixed per column and costs one division per column.
pub fn col_uv_specialized<R: Real>(m: &ProjectiveTexMap, x: i64, y0: i64, y1: i64) -> Result<Vec<(R, R)>> {
    let actual = classify_map(m, CLASSIFY_TOL);
    if !matches!(actual, MapClass::ColConstantU)
        && !(actual == MapClass::Affine && m.b.abs() <= CLASSIFY_TOL * m.scale())
    {
        return Err(Error::ClassMismatch);
    }
    let xr = R::lit(x as f64);
    let den = R::lit(m.g) * xr + R::lit(m.i);
    if !(den > R::lit(0.0)) {
        return Err(Error::BehindProjection { x: x as f64, y: y0 as f64 });
    }
    let bv = R::lit(1.0) / den;
    let u = (R::lit(m.a) * xr + R::lit(m.c)) * bv;
    let av = R::lit(m.d) * xr + R::lit(m.f);
    Ok((y0..=y1)
        .map(|y| (u, (R::lit(m.e) * R::lit(y as f64) + av) * bv))
        .collect())
}
