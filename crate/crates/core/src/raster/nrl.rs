//! Rasterization along lines of constant projective denominator.
//!
//! On `y = y0 + dy x` with `dy = -g/h` the denominator `g x + h y + i` does
//! not change, so one reciprocal per line serves every pixel. The discrete
//! line sits `r` below the ideal one and a first-order term corrects for it.

use super::scanline::{Coverage, FillRule};
use crate::analysis::counter::Real;
use crate::error::{Error, Result};
use crate::geometry::ScreenTriangle;
use crate::texmap::ProjectiveTexMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NrlRounding {
    /// floor(t + 1/2), |r| <= 1/2
    #[default]
    HalfUp,
    /// ceil(t), r in (-1, 0]
    Ceil,
}

/// Which coordinate the lines advance along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrlAxis {
    /// one pixel per column, lines indexed by their y at x = 0
    Rows,
    /// h = 0: one pixel per row, lines indexed by their x at y = 0
    Cols,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrlFamily {
    pub dy: f64,
    pub rounding: NrlRounding,
    pub axis: NrlAxis,
}

impl NrlFamily {
    fn round(&self, t: f64) -> f64 {
        match self.rounding {
            NrlRounding::HalfUp => (t + 0.5).floor(),
            NrlRounding::Ceil => t.ceil(),
        }
    }

    /// Discrete cross coordinate of line `y0` at step `x`.
    pub fn line_at(&self, y0: i64, x: i64) -> i64 {
        y0 + self.round(self.dy * x as f64) as i64
    }
}

/// Slope of the family; one division.
pub fn nrl_setup<R: Real>(m: &ProjectiveTexMap, rounding: NrlRounding) -> Result<NrlFamily> {
    if m.h.abs() <= 1e-300_f64.max(1e-12 * m.scale()) {
        return Err(Error::HDegenerate);
    }
    let dy = -(R::lit(m.g) / R::lit(m.h));
    Ok(NrlFamily {
        dy: dy.get(),
        rounding,
        axis: NrlAxis::Rows,
    })
}

/// Column family of a map with h = 0, built on the transposed map.
pub fn nrl_setup_columns<R: Real>(m: &ProjectiveTexMap, rounding: NrlRounding) -> Result<NrlFamily> {
    let t = m.transposed();
    if t.h.abs() <= 1e-300_f64.max(1e-12 * t.scale()) {
        return Err(Error::AffineMap);
    }
    Ok(NrlFamily {
        axis: NrlAxis::Cols,
        ..nrl_setup::<R>(&t, rounding)?
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrlState<R> {
    pub dy: R,
    pub y0: i64,
    /// 1 / (h y0 + i)
    pub k: R,
    pub k2h: R,
    /// residual of the last pixel
    pub r: R,
    pub rounding: NrlRounding,
}

/// Per-line setup: one division.
pub fn nrl_line_state<R: Real>(m: &ProjectiveTexMap, fam: &NrlFamily, y0: i64) -> Result<NrlState<R>> {
    let den = R::lit(m.h) * R::lit(y0 as f64) + R::lit(m.i);
    if !(den > R::lit(0.0)) {
        return Err(Error::BehindProjection { x: 0.0, y: y0 as f64 });
    }
    let k = R::lit(1.0) / den;
    Ok(NrlState {
        dy: R::lit(fam.dy),
        y0,
        k,
        k2h: k * k * R::lit(m.h),
        r: R::lit(0.0),
        rounding: fam.rounding,
    })
}

/// (y, u, v) at step x of the line: 8 multiplies and 7 adds.
pub fn nrl_uv<R: Real>(m: &ProjectiveTexMap, s: &mut NrlState<R>, x: i64) -> (i64, R, R) {
    let xr = R::lit(x as f64);
    let t = s.dy * xr;
    let n = match s.rounding {
        NrlRounding::HalfUp => t.round_half_up(),
        NrlRounding::Ceil => t.ceil(),
    };
    s.r = t - n;
    let y = R::lit(s.y0 as f64) + n;
    let kor = s.k + s.r * s.k2h;
    let u = (R::lit(m.a) * xr + R::lit(m.b) * y + R::lit(m.c)) * kor;
    let v = (R::lit(m.d) * xr + R::lit(m.e) * y + R::lit(m.f)) * kor;
    (y.get() as i64, u, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrlPixel<R> {
    pub x: i64,
    pub y: i64,
    pub u: R,
    pub v: R,
    pub r: f64,
    pub kor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrlLine<R> {
    /// y at x = 0 (Rows) or x at y = 0 (Cols)
    pub y0: i64,
    pub pixels: Vec<NrlPixel<R>>,
}

/// The triangle's pixels grouped by line, with (u, v). Picks the column
/// family when h = 0; a map with g = h = 0 is affine and gets `AffineMap`.
///
/// Divisions: one for the slope plus one per non-empty line.
pub fn nrl_triangle<R: Real>(
    m: &ProjectiveTexMap,
    t: &ScreenTriangle,
    rule: FillRule,
    rounding: NrlRounding,
) -> Result<Vec<NrlLine<R>>> {
    let cov = Coverage::new(t, rule)?;
    let fam = match nrl_setup::<R>(m, rounding) {
        Ok(f) => f,
        Err(Error::HDegenerate) => nrl_setup_columns::<R>(m, rounding)?,
        Err(e) => return Err(e),
    };
    let (mm, swap) = match fam.axis {
        NrlAxis::Rows => (*m, false),
        NrlAxis::Cols => (m.transposed(), true),
    };
    let (bx0, by0, bx1, by1) = cov.bbox();
    let (s0, s1, c0, c1) = if swap {
        (by0.ceil() as i64, by1.floor() as i64, bx0.ceil() as i64, bx1.floor() as i64)
    } else {
        (bx0.ceil() as i64, bx1.floor() as i64, by0.ceil() as i64, by1.floor() as i64)
    };
    let inside = |s: i64, c: i64| {
        if swap {
            cov.inside(c as f64, s as f64)
        } else {
            cov.inside(s as f64, c as f64)
        }
    };
    // line ids that can reach the box
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for s in s0..=s1 {
        let n = fam.line_at(0, s);
        lo = lo.min(c0 - n);
        hi = hi.max(c1 - n);
    }
    let mut out = Vec::new();
    for y0 in lo..=hi {
        let hits: Vec<i64> = (s0..=s1).filter(|&s| inside(s, fam.line_at(y0, s))).collect();
        if hits.is_empty() {
            continue;
        }
        let mut st = nrl_line_state::<R>(&mm, &fam, y0)?;
        let mut pixels = Vec::with_capacity(hits.len());
        for s in hits {
            let (c, u, v) = nrl_uv(&mm, &mut st, s);
            let (x, y) = if swap { (c, s) } else { (s, c) };
            pixels.push(NrlPixel {
                x,
                y,
                u,
                v,
                r: st.r.get(),
                kor: st.k.get() + st.r.get() * st.k2h.get(),
            });
        }
        out.push(NrlLine { y0, pixels });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::counter::{Counted, counted_scope};
    use crate::raster::scanline::{covered_pixels, scanline_triangle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn random_case(rng: &mut ChaCha8Rng) -> (ProjectiveTexMap, ScreenTriangle) {
        loop {
            let p: [(f64, f64); 3] = std::array::from_fn(|_| (rng.random_range(0.0..200.0), rng.random_range(0.0..200.0)));
            let t = ScreenTriangle::from_xy(p);
            if Coverage::new(&t, FillRule::TopLeft).is_err() {
                continue;
            }
            let depth = std::array::from_fn(|_| rng.random_range(1.0..6.0));
            let uv = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
            if let Ok(m) = ProjectiveTexMap::from_triangle(p, depth, uv)
                && m.h.abs() > 1e-9 {
                    return (m, t);
                }
        }
    }

    #[test]
    fn slope_keeps_denominator() {
        let m = ProjectiveTexMap::from_coeffs([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0, 4.0, 1.0]);
        let f = nrl_setup::<f64>(&m, NrlRounding::HalfUp).unwrap();
        assert_eq!(f.dy, -0.5);
        assert_eq!(m.g * 1.0 + m.h * f.dy, 0.0);
        let flat = ProjectiveTexMap::from_coeffs([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 4.0, 1.0]);
        assert_eq!(nrl_setup::<f64>(&flat, NrlRounding::HalfUp).unwrap().dy, 0.0);
        let v = ProjectiveTexMap::from_coeffs([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.0, 1.0]);
        assert_eq!(nrl_setup::<f64>(&v, NrlRounding::HalfUp), Err(Error::HDegenerate));
    }

    #[test]
    fn lines_partition_the_plane() {
        for dy in [-0.5, 0.37, -2.6, 0.0, 0.5] {
            let fam = NrlFamily {
                dy,
                rounding: NrlRounding::HalfUp,
                axis: NrlAxis::Rows,
            };
            for x in -20..20 {
                let ys: Vec<i64> = (-30..30).map(|y0| fam.line_at(y0, x)).collect();
                assert!(ys.windows(2).all(|w| w[1] == w[0] + 1));
            }
        }
    }

    #[test]
    fn same_coverage_as_scanline() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let (m, t) = random_case(&mut rng);
            let lines = nrl_triangle::<f64>(&m, &t, FillRule::TopLeft, NrlRounding::HalfUp).unwrap();
            let px: Vec<(i64, i64)> = lines.iter().flat_map(|l| l.pixels.iter().map(|p| (p.x, p.y))).collect();
            let set: HashSet<_> = px.iter().cloned().collect();
            assert_eq!(set.len(), px.len());
            let want: HashSet<_> = covered_pixels(&scanline_triangle(&t, FillRule::TopLeft).unwrap())
                .into_iter()
                .collect();
            assert_eq!(set, want);
        }
    }

    #[test]
    fn correction_is_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for rounding in [NrlRounding::HalfUp, NrlRounding::Ceil] {
            for _ in 0..20 {
                let (m, t) = random_case(&mut rng);
                for l in nrl_triangle::<f64>(&m, &t, FillRule::TopLeft, rounding).unwrap() {
                    let k = 1.0 / (m.h * l.y0 as f64 + m.i);
                    for p in &l.pixels {
                        let den = m.denom(p.x as f64, p.y as f64);
                        let rhk = p.r * m.h * k;
                        assert!((p.kor * den - 1.0).abs() <= 2.0 * rhk * rhk + 64.0 * f64::EPSILON);
                        // (1 + rhk)(1 - rhk), up to cancellation in the denominators
                        let (x, y) = (p.x as f64, p.y as f64);
                        let cond = ((m.g * x).abs() + (m.h * y).abs() + m.i.abs()) / den.abs()
                            + ((m.h * l.y0 as f64).abs() + m.i.abs()) * k.abs();
                        assert!(((1.0 - p.kor * den) - rhk * rhk).abs() <= 16.0 * cond * f64::EPSILON);
                        match rounding {
                            NrlRounding::HalfUp => assert!(p.r.abs() <= 0.5),
                            NrlRounding::Ceil => assert!(p.r <= 0.0 && p.r > -1.0),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_residual_is_exact() {
        // dy = -1: every line lands on the lattice
        let m = ProjectiveTexMap::from_coeffs([0.01, 0.002, 0.1, 0.003, 0.02, 0.2, 0.004, 0.004, 1.0]);
        let t = ScreenTriangle::from_xy([(2.0, 3.0), (60.0, 10.0), (20.0, 70.0)]);
        for l in nrl_triangle::<f64>(&m, &t, FillRule::TopLeft, NrlRounding::HalfUp).unwrap() {
            for p in &l.pixels {
                assert_eq!(p.r, 0.0);
                let (u, v) = m.uv(p.x as f64, p.y as f64).unwrap();
                assert!((p.u - u).abs() <= 1e-12 && (p.v - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ideal_denominator_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let (m, _) = random_case(&mut rng);
            let f = nrl_setup::<f64>(&m, NrlRounding::HalfUp).unwrap();
            for y0 in [-40i64, 0, 17, 300] {
                let d0 = m.denom(0.0, y0 as f64);
                for x in 0..256 {
                    let d = m.denom(x as f64, y0 as f64 + f.dy * x as f64);
                    assert!((d - d0).abs() <= 1e-12 * (1.0 + d0.abs()));
                }
            }
        }
    }

    #[test]
    fn column_family_when_h_is_zero() {
        let m = ProjectiveTexMap::from_coeffs([0.01, 0.002, 0.1, 0.003, 0.02, 0.2, 0.004, 0.0, 1.0]);
        let t = ScreenTriangle::from_xy([(2.5, 3.0), (60.0, 10.2), (20.0, 70.0)]);
        let lines = nrl_triangle::<f64>(&m, &t, FillRule::TopLeft, NrlRounding::HalfUp).unwrap();
        let mut n = 0;
        for l in &lines {
            for p in &l.pixels {
                n += 1;
                assert_eq!(p.x, l.y0);
                let (u, v) = m.uv(p.x as f64, p.y as f64).unwrap();
                assert!((p.u - u).abs() <= 1e-12 && (p.v - v).abs() <= 1e-12);
            }
        }
        assert_eq!(n, covered_pixels(&scanline_triangle(&t, FillRule::TopLeft).unwrap()).len());
        let affine = ProjectiveTexMap::from_coeffs([0.01, 0.0, 0.0, 0.0, 0.01, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            nrl_triangle::<f64>(&affine, &t, FillRule::TopLeft, NrlRounding::HalfUp),
            Err(Error::AffineMap)
        );
    }

    #[cfg(feature = "op-count")]
    #[test]
    fn division_ledger() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let (m, t) = random_case(&mut rng);
            let (lines, c) = counted_scope("nrl", || {
                nrl_triangle::<Counted>(&m, &t, FillRule::TopLeft, NrlRounding::HalfUp).unwrap()
            });
            assert_eq!(c.divisions, lines.len() as u64 + 1);
        }
    }

    #[cfg(feature = "op-count")]
    #[test]
    fn per_pixel_cost() {
        let m = ProjectiveTexMap::from_coeffs([0.01, 0.002, 0.1, 0.003, 0.02, 0.2, 0.001, 0.004, 1.0]);
        let fam = nrl_setup::<f64>(&m, NrlRounding::HalfUp).unwrap();
        let mut st = nrl_line_state::<Counted>(&m, &fam, 5).unwrap();
        let (_, c) = counted_scope("pixel", || nrl_uv(&m, &mut st, 7));
        assert_eq!((c.multiplications, c.additions, c.divisions), (8, 7, 0));
    }
}
