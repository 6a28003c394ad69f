//! Texture coordinates from each evaluation scheme, and their error
//! against exact division.

use std::fmt;
use std::str::FromStr;

use super::counter::{Counted, OpCounter, Real, counted_scope};
use super::report::ErrorReport;
use super::scenes::{Scene, TexPoly};
use crate::error::{Error, Result};
use crate::geometry::ScreenTriangle;
use crate::raster::nrl::{NrlRounding, nrl_triangle};
use crate::raster::scanline::{FillRule, scanline_triangle};
use crate::texmap::bezier::{BezierParam, IterParams, bezier_row_uv};
use crate::texmap::bivariate::{BivariateDegree, fit_map_over_triangle};
use crate::texmap::midpoint::midpoint_row;
use crate::texmap::quadratic::{Anchor, AnchorRule, quad_row};
use crate::texmap::exact_uv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Affine,
    Midpoint,
    Quad,
    QuadAnchor,
    Bezier,
    BezierIter,
    BezierQuad,
    Nrl,
    Biquadratic,
    Bicubic,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Method::Exact,
        Method::Affine,
        Method::Midpoint,
        Method::Quad,
        Method::QuadAnchor,
        Method::Bezier,
        Method::BezierIter,
        Method::BezierQuad,
        Method::Nrl,
        Method::Biquadratic,
        Method::Bicubic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Affine => "affine",
            Method::Midpoint => "midpoint",
            Method::Quad => "quad",
            Method::QuadAnchor => "quad-anchor",
            Method::Bezier => "bezier",
            Method::BezierIter => "bezier-iter",
            Method::BezierQuad => "bezier-quad",
            Method::Nrl => "nrl",
            Method::Biquadratic => "biquadratic",
            Method::Bicubic => "bicubic",
        }
    }

    pub fn names() -> String {
        Method::ALL.map(Method::name).join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown method '{s}' (valid: {})", Method::names())))
    }
}

/// Knobs the approximate schemes take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodParams {
    pub du: f64,
    /// fixed anchor for `quad`
    pub x_int: f64,
    pub anchor_rule: AnchorRule,
    pub iter: IterParams,
}

impl Default for MethodParams {
    fn default() -> Self {
        MethodParams {
            du: 1.0 / 256.0,
            x_int: 0.5,
            anchor_rule: AnchorRule::default(),
            iter: IterParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvSample<R> {
    pub x: i64,
    pub y: i64,
    pub u: R,
    pub v: R,
}

/// Covered pixel rows of a triangle inside `[0, w) x [0, h)`.
pub fn clipped_spans(t: &ScreenTriangle, w: usize, h: usize) -> Result<Vec<(i64, i64, i64)>> {
    Ok(scanline_triangle(t, FillRule::TopLeft)?
        .into_iter()
        .filter(|s| s.y >= 0 && s.y < h as i64)
        .map(|s| (s.y, s.x_start.max(0), s.x_end.min(w as i64 - 1)))
        .filter(|s| s.1 <= s.2)
        .collect())
}

// fewer than this many pixels in a row: curve fits are skipped
const MIN_FIT_ROW: i64 = 3;

/// (u, v) of every covered pixel of `t`, produced by `method`.
pub fn method_uv<R: Real>(
    poly: &TexPoly,
    t: &ScreenTriangle,
    method: Method,
    p: &MethodParams,
    w: usize,
    h: usize,
) -> Result<Vec<UvSample<R>>> {
    let m = &poly.map;
    let mut out = Vec::new();
    let exact_row = |out: &mut Vec<UvSample<R>>, y: i64, xs: i64, xe: i64| -> Result<()> {
        for x in xs..=xe {
            let (u, v) = exact_uv(m, R::lit(x as f64), R::lit(y as f64))?;
            out.push(UvSample { x, y, u, v });
        }
        Ok(())
    };
    let push_row = |out: &mut Vec<UvSample<R>>, y: i64, xs: i64, vals: Vec<(R, R)>| {
        for (k, (u, v)) in vals.into_iter().enumerate() {
            out.push(UvSample { x: xs + k as i64, y, u, v });
        }
    };
    match method {
        Method::Nrl => {
            let lines = match nrl_triangle::<R>(m, t, FillRule::TopLeft, NrlRounding::HalfUp) {
                Ok(l) => l,
                Err(Error::AffineMap) => {
                    for (y, xs, xe) in clipped_spans(t, w, h)? {
                        exact_row(&mut out, y, xs, xe)?;
                    }
                    return Ok(out);
                }
                Err(e) => return Err(e),
            };
            for l in lines {
                for px in l.pixels {
                    if px.x >= 0 && px.y >= 0 && px.x < w as i64 && px.y < h as i64 {
                        out.push(UvSample { x: px.x, y: px.y, u: px.u, v: px.v });
                    }
                }
            }
            return Ok(out);
        }
        Method::Biquadratic | Method::Bicubic => {
            let degree = if method == Method::Biquadratic {
                BivariateDegree::Biquadratic
            } else {
                BivariateDegree::Bicubic
            };
            let (pu, pv) = fit_map_over_triangle(m, t.xy(), degree)?;
            for (y, xs, xe) in clipped_spans(t, w, h)? {
                for x in xs..=xe {
                    let (xf, yf) = (x as f64, y as f64);
                    out.push(UvSample { x, y, u: pu.eval_r(xf, yf), v: pv.eval_r(xf, yf) });
                }
            }
            return Ok(out);
        }
        _ => {}
    }
    // affine stand-in through the triangle's vertices
    let affine = if method == Method::Affine {
        let uv = t.v.map(|v| {
            let (u, w) = m.uv(v.x, v.y).unwrap_or((v.uv[0], v.uv[1]));
            [u, w]
        });
        Some(crate::texmap::ProjectiveTexMap::affine_from_triangle(t.xy(), uv)?)
    } else {
        None
    };
    for (y, xs, xe) in clipped_spans(t, w, h)? {
        let short = xe - xs + 1 < MIN_FIT_ROW;
        match method {
            Method::Exact => exact_row(&mut out, y, xs, xe)?,
            Method::Affine => {
                let a = affine.as_ref().unwrap();
                let yr = R::lit(y as f64);
                let cu = R::lit(a.b) * yr + R::lit(a.c);
                let cv = R::lit(a.e) * yr + R::lit(a.f);
                for x in xs..=xe {
                    let xr = R::lit(x as f64);
                    out.push(UvSample { x, y, u: R::lit(a.a) * xr + cu, v: R::lit(a.d) * xr + cv });
                }
            }
            Method::Midpoint => push_row(&mut out, y, xs, midpoint_row::<R>(m, y, xs, xe, p.du)?),
            _ if short => exact_row(&mut out, y, xs, xe)?,
            Method::Quad => push_row(&mut out, y, xs, quad_row::<R>(m, y, xs, xe, Anchor::Fixed(p.x_int))?),
            Method::QuadAnchor => push_row(
                &mut out,
                y,
                xs,
                quad_row::<R>(m, y, xs, xe, Anchor::Recommended(p.anchor_rule))?,
            ),
            Method::Bezier => push_row(&mut out, y, xs, bezier_row_uv::<R>(m, y, xs, xe, BezierParam::Exact)?),
            Method::BezierIter => push_row(
                &mut out,
                y,
                xs,
                bezier_row_uv::<R>(m, y, xs, xe, BezierParam::Iterative(p.iter))?,
            ),
            Method::BezierQuad => push_row(
                &mut out,
                y,
                xs,
                bezier_row_uv::<R>(m, y, xs, xe, BezierParam::Quadratic { t1: 0.5 })?,
            ),
            Method::Nrl | Method::Biquadratic | Method::Bicubic => unreachable!(),
        }
    }
    Ok(out)
}

/// Running error statistics; relative error is `|d| / max(|exact|, floor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub floor: f64,
    pub n: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    sum_rel: f64,
}

impl ErrorStats {
    pub fn new(floor: f64) -> Self {
        ErrorStats {
            floor,
            n: 0,
            max_abs: 0.0,
            max_rel: 0.0,
            sum_rel: 0.0,
        }
    }

    pub fn rel(&self, got: f64, exact: f64) -> f64 {
        (got - exact).abs() / exact.abs().max(self.floor)
    }

    /// One sample with any number of components; the worst component counts.
    pub fn add(&mut self, pairs: &[(f64, f64)]) {
        let mut worst = 0.0f64;
        for &(got, exact) in pairs {
            self.max_abs = self.max_abs.max((got - exact).abs());
            worst = worst.max(self.rel(got, exact));
        }
        self.max_rel = self.max_rel.max(worst);
        self.sum_rel += worst;
        self.n += 1;
    }

    pub fn mean_rel(&self) -> f64 {
        if self.n == 0 { 0.0 } else { self.sum_rel / self.n as f64 }
    }
}

/// Every covered pixel of the scene through `method`, against exact
/// division in f64. Relative errors use `du` as the floor.
pub fn compare_uv_method(scene: &Scene, method: Method, p: &MethodParams) -> Result<ErrorReport> {
    let (samples, ops) = counted_scope(method.name(), || -> Result<Vec<(usize, UvSample<Counted>)>> {
        let mut all = Vec::new();
        for (pi, poly) in scene.polys.iter().enumerate() {
            for t in &poly.tris {
                for s in method_uv::<Counted>(poly, t, method, p, scene.width, scene.height)? {
                    all.push((pi, s));
                }
            }
        }
        Ok(all)
    });
    let samples = samples?;
    let mut st = ErrorStats::new(p.du);
    for (pi, s) in &samples {
        let (u, v) = scene.polys[*pi].map.uv(s.x as f64, s.y as f64)?;
        st.add(&[(s.u.0, u), (s.v.0, v)]);
    }
    Ok(ErrorReport {
        method: method.name().to_string(),
        scene: scene.id.clone(),
        pixels: st.n,
        max_abs: st.max_abs,
        max_rel: st.max_rel,
        mean_rel: st.mean_rel(),
        ops,
        claims: Vec::new(),
    })
}

/// Whether a report meets the method's own contract: exact is exact and
/// midpoint stays inside its half-step band. Other methods have none.
pub fn within_contract(method: Method, r: &ErrorReport, du: f64) -> bool {
    match method {
        Method::Exact => r.max_abs == 0.0,
        Method::Midpoint => r.max_abs <= du / 2.0,
        _ => true,
    }
}

pub fn total_ops(reports: &[ErrorReport]) -> OpCounter {
    reports.iter().fold(OpCounter::ZERO, |a, r| a + r.ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::scenes::{anchor_scene, tilted_quad_scene};

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        let e = "fast".parse::<Method>().unwrap_err().to_string();
        assert!(e.contains("midpoint") && e.contains("bicubic"));
    }

    #[test]
    fn exact_against_itself() {
        let r = compare_uv_method(&tilted_quad_scene(), Method::Exact, &MethodParams::default()).unwrap();
        assert_eq!((r.max_abs, r.max_rel, r.mean_rel), (0.0, 0.0, 0.0));
        assert!(r.pixels > 10_000);
        #[cfg(feature = "op-count")]
        assert_eq!(r.ops.divisions, 2 * r.pixels as u64);
    }

    #[test]
    fn every_method_covers_the_same_pixels() {
        let s = tilted_quad_scene();
        let p = MethodParams::default();
        let n = compare_uv_method(&s, Method::Exact, &p).unwrap().pixels;
        for m in Method::ALL {
            let r = compare_uv_method(&s, m, &p).unwrap();
            assert_eq!(r.pixels, n, "{m}");
            assert!(r.max_rel.is_finite() && r.max_rel >= r.mean_rel && r.mean_rel >= 0.0);
        }
    }

    #[test]
    fn midpoint_inside_band() {
        let p = MethodParams::default();
        for s in [tilted_quad_scene(), anchor_scene()] {
            let r = compare_uv_method(&s, Method::Midpoint, &p).unwrap();
            assert!(r.max_abs <= p.du / 2.0);
            assert!(within_contract(Method::Midpoint, &r, p.du));
        }
    }

    #[cfg(feature = "op-count")]
    #[test]
    fn midpoint_cheaper_than_exact() {
        let s = tilted_quad_scene();
        let p = MethodParams::default();
        let e = compare_uv_method(&s, Method::Exact, &p).unwrap();
        let m = compare_uv_method(&s, Method::Midpoint, &p).unwrap();
        assert!(m.ops.divisions < e.ops.divisions);
    }
}
