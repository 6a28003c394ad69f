//! Division-free incremental texture coordinates.
//!
//! For each coordinate two signed condition values are kept:
//!
//! ```text
//! W = u E - x (2a - du g) - y (2b - du h) - (2c - du i)
//! Q = u E - x (2a + du g) - y (2b + du h) - (2c + du i)
//! E = 2 (g x + h y + i)
//! ```
//!
//! `W >= 0 && Q < 0` holds exactly when `u` is within `[exact - du/2, exact + du/2)`.
//! Stepping x or y changes W and Q by a multiply and a few adds; `u` is then
//! nudged by `du` until the band holds again.

use super::{ProjectiveTexMap, exact_uv};
use crate::analysis::counter::Real;
use crate::error::{Error, Result};

/// Lattice point the band selects, computed with a division. Ties go down.
pub fn lattice_snap(u_exact: f64, du: f64) -> f64 {
    (u_exact / du - 0.5).ceil() * du
}

#[derive(Debug, Clone, Copy)]
pub struct MidpointAxis<R> {
    pub value: R,
    /// value = n * du
    pub n: i64,
    pub w: R,
    pub q: R,
    kw: [R; 3],
    kq: [R; 3],
}

impl<R: Real> MidpointAxis<R> {
    fn new(p: f64, r: f64, s: f64, m: &ProjectiveTexMap, du: f64, x: R, y: R, e: R, u_exact: f64) -> Self {
        let kw = [2.0 * p - du * m.g, 2.0 * r - du * m.h, 2.0 * s - du * m.i].map(R::lit);
        let kq = [2.0 * p + du * m.g, 2.0 * r + du * m.h, 2.0 * s + du * m.i].map(R::lit);
        let n = (u_exact / du - 0.5).ceil() as i64;
        let value = R::lit(n as f64 * du);
        let w = value * e - x * kw[0] - y * kw[1] - kw[2];
        let q = value * e - x * kq[0] - y * kq[1] - kq[2];
        MidpointAxis { value, n, w, q, kw, kq }
    }

    // Restores W >= 0, Q < 0 with +-du moves; `de` is du * E.
    fn settle(&mut self, du: R, de: R, limit: u64) -> Result<u64> {
        let zero = R::lit(0.0);
        let mut moves = 0u64;
        while self.w < zero {
            self.value += du;
            self.n += 1;
            self.w += de;
            self.q += de;
            moves += 1;
            if moves > limit {
                return Err(Error::NonConvergence(format!("midpoint adjust exceeded {limit}")));
            }
        }
        while self.q >= zero {
            self.value -= du;
            self.n -= 1;
            self.w -= de;
            self.q -= de;
            moves += 1;
            if moves > limit {
                return Err(Error::NonConvergence(format!("midpoint adjust exceeded {limit}")));
            }
        }
        Ok(moves)
    }

    fn step(&mut self, t: R, axis: usize, forward: bool) {
        if forward {
            self.w += t - self.kw[axis];
            self.q += t - self.kq[axis];
        } else {
            self.w += self.kw[axis] - t;
            self.q += self.kq[axis] - t;
        }
    }
}

/// Scanning cursor over one map. Single owner; one per row per thread.
#[derive(Debug, Clone, Copy)]
pub struct MidpointState<R> {
    pub x: i64,
    pub y: i64,
    pub e: R,
    pub du: R,
    pub u: MidpointAxis<R>,
    pub v: MidpointAxis<R>,
    de: R,
    two_g: R,
    two_h: R,
    de_g: R,
    de_h: R,
    limit: u64,
    /// Total +-du moves made by the last step.
    pub last_moves: u64,
}

impl<R: Real> MidpointState<R> {
    pub fn uv(&self) -> (R, R) {
        (self.u.value, self.v.value)
    }

    pub fn in_band(&self) -> bool {
        let zero = R::lit(0.0);
        self.u.w >= zero && self.u.q < zero && self.v.w >= zero && self.v.q < zero
    }
}

pub fn midpoint_init<R: Real>(m: &ProjectiveTexMap, x0: i64, y0: i64, du: f64) -> Result<MidpointState<R>> {
    if !(du > 0.0) {
        return Err(Error::NonConvergence(format!("du must be positive, got {du}")));
    }
    let (xf, yf) = (x0 as f64, y0 as f64);
    let (ue, ve) = exact_uv(m, xf, yf)?;
    let (x, y) = (R::lit(xf), R::lit(yf));
    let e = R::lit(2.0) * (R::lit(m.g) * x + R::lit(m.h) * y + R::lit(m.i));
    let mut s = MidpointState {
        x: x0,
        y: y0,
        e,
        du: R::lit(du),
        u: MidpointAxis::new(m.a, m.b, m.c, m, du, x, y, e, ue),
        v: MidpointAxis::new(m.d, m.e, m.f, m, du, x, y, e, ve),
        de: R::lit(du) * e,
        two_g: R::lit(2.0 * m.g),
        two_h: R::lit(2.0 * m.h),
        de_g: R::lit(2.0 * du * m.g),
        de_h: R::lit(2.0 * du * m.h),
        limit: (1.0 / du).ceil() as u64,
        last_moves: 0,
    };
    // the ceil above can land one lattice step off when u/du is huge
    s.last_moves = s.u.settle(s.du, s.de, s.limit)? + s.v.settle(s.du, s.de, s.limit)?;
    Ok(s)
}

fn step<R: Real>(s: &mut MidpointState<R>, axis: usize, dir: i32) -> Result<()> {
    let forward = dir >= 0;
    let (two, dde) = if axis == 0 { (s.two_g, s.de_g) } else { (s.two_h, s.de_h) };
    // W(x+1) = W + 2g u - kw ; W(x-1) = W - 2g u + kw
    let tu = two * s.u.value;
    let tv = two * s.v.value;
    s.u.step(tu, axis, forward);
    s.v.step(tv, axis, forward);
    if forward {
        s.e += two;
        s.de += dde;
    } else {
        s.e -= two;
        s.de -= dde;
    }
    if axis == 0 {
        s.x += if forward { 1 } else { -1 };
    } else {
        s.y += if forward { 1 } else { -1 };
    }
    if !(s.e > R::lit(0.0)) {
        return Err(Error::BehindProjection {
            x: s.x as f64,
            y: s.y as f64,
        });
    }
    s.last_moves = s.u.settle(s.du, s.de, s.limit)? + s.v.settle(s.du, s.de, s.limit)?;
    Ok(())
}

/// One pixel along x; `direction` is +1 or -1.
pub fn midpoint_step_x<R: Real>(s: &mut MidpointState<R>, direction: i32) -> Result<()> {
    step(s, 0, direction)
}

/// One pixel along y; `direction` is +1 or -1.
pub fn midpoint_step_y<R: Real>(s: &mut MidpointState<R>, direction: i32) -> Result<()> {
    step(s, 1, direction)
}

/// (u, v) for x0..=x1 on row y.
pub fn midpoint_row<R: Real>(m: &ProjectiveTexMap, y: i64, x0: i64, x1: i64, du: f64) -> Result<Vec<(R, R)>> {
    let mut s = midpoint_init::<R>(m, x0, y, du)?;
    let mut out = Vec::with_capacity((x1 - x0 + 1).max(0) as usize);
    out.push(s.uv());
    for _ in x0..x1 {
        midpoint_step_x(&mut s, 1)?;
        out.push(s.uv());
    }
    Ok(out)
}

/// Boustrophedon scan of a w x h raster from the origin, one cursor for the
/// whole raster; `out[y * w + x]`.
pub fn midpoint_raster<R: Real>(m: &ProjectiveTexMap, w: i64, h: i64, du: f64) -> Result<Vec<(R, R)>> {
    let mut out = vec![(R::lit(0.0), R::lit(0.0)); (w * h).max(0) as usize];
    if w <= 0 || h <= 0 {
        return Ok(out);
    }
    let mut s = midpoint_init::<R>(m, 0, 0, du)?;
    for y in 0..h {
        if y > 0 {
            midpoint_step_y(&mut s, 1)?;
        }
        let dir = if y % 2 == 0 { 1 } else { -1 };
        for k in 0..w {
            if k > 0 {
                midpoint_step_x(&mut s, dir)?;
            }
            out[(y * w + s.x) as usize] = s.uv();
        }
    }
    Ok(out)
}

/// W and Q straight from their definitions, for checking the increments.
pub fn direct_wq(m: &ProjectiveTexMap, x: f64, y: f64, u: f64, du: f64, row: [f64; 3]) -> (f64, f64) {
    let e = 2.0 * (m.g * x + m.h * y + m.i);
    let [p, r, s] = row;
    let w = u * e - x * (2.0 * p - du * m.g) - y * (2.0 * r - du * m.h) - (2.0 * s - du * m.i);
    let q = u * e - x * (2.0 * p + du * m.g) - y * (2.0 * r + du * m.h) - (2.0 * s + du * m.i);
    (w, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::counter::{Counted, counted_scope};
    use proptest::prelude::*;

    const DU: f64 = 1.0 / 256.0;

    fn in_band(u: f64, exact: f64, du: f64) -> bool {
        u >= exact - du / 2.0 && u < exact + du / 2.0
    }

    fn sample_map() -> ProjectiveTexMap {
        // den 1 at the origin, about 2.4 at (255, 255)
        ProjectiveTexMap::from_coeffs([
            0.0061, 0.0009, 0.02, -0.0012, 0.0055, 0.05, 0.0031, 0.0024, 1.0,
        ])
    }

    #[test]
    fn on_lattice_start() {
        let m = ProjectiveTexMap::from_coeffs([1.5, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 1.0]);
        let s = midpoint_init::<f64>(&m, 1, 0, DU).unwrap();
        assert_eq!(s.u.value, 1.5);
        assert_eq!(s.u.n, 384);
        assert_eq!(s.v.value, 0.25);
        assert!(s.in_band());
    }

    #[test]
    fn tie_goes_down() {
        assert_eq!(lattice_snap(1.5 * DU, DU), DU);
        let m = ProjectiveTexMap::from_coeffs([1.5 * DU, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let s = midpoint_init::<f64>(&m, 1, 0, DU).unwrap();
        assert_eq!(s.u.value, DU);
    }

    #[test]
    fn constant_u_never_moves() {
        let m = ProjectiveTexMap::from_coeffs([0.0, 0.0, 0.3, 0.0, 0.0, 0.7, 0.0, 0.0, 1.0]);
        let mut s = midpoint_init::<f64>(&m, 0, 0, DU).unwrap();
        let u0 = s.u.value;
        for _ in 0..300 {
            midpoint_step_x(&mut s, 1).unwrap();
            assert_eq!(s.last_moves, 0);
        }
        assert_eq!(s.u.value, u0);
    }

    #[test]
    fn unit_slope_moves_once_per_pixel() {
        let m = ProjectiveTexMap::from_coeffs([DU, 0.0, 0.3, 0.0, DU, 0.1, 0.0, 0.0, 1.0]);
        let mut s = midpoint_init::<f64>(&m, 0, 0, DU).unwrap();
        for _ in 0..200 {
            let n = s.u.n;
            midpoint_step_x(&mut s, 1).unwrap();
            assert_eq!(s.last_moves, 1);
            assert_eq!(s.u.n, n + 1);
        }
        for _ in 0..200 {
            let n = s.v.n;
            midpoint_step_y(&mut s, 1).unwrap();
            assert_eq!(s.last_moves, 1);
            assert_eq!(s.v.n, n + 1);
        }
    }

    #[test]
    fn row_scan_matches_snapped_division() {
        let m = sample_map();
        for y in [0, 17, 128, 255] {
            let row = midpoint_row::<f64>(&m, y, 0, 255, DU).unwrap();
            for (x, &(u, v)) in row.iter().enumerate() {
                let (eu, ev) = m.uv(x as f64, y as f64).unwrap();
                assert_eq!(u, lattice_snap(eu, DU), "x={x} y={y}");
                assert_eq!(v, lattice_snap(ev, DU));
                assert!(in_band(u, eu, DU) && in_band(v, ev, DU));
            }
        }
    }

    #[test]
    fn column_scan_matches_snapped_division() {
        let m = sample_map();
        let mut s = midpoint_init::<f64>(&m, 40, 0, DU).unwrap();
        for y in 1..256 {
            midpoint_step_y(&mut s, 1).unwrap();
            let (eu, ev) = m.uv(40.0, y as f64).unwrap();
            assert!(in_band(s.u.value, eu, DU) && in_band(s.v.value, ev, DU));
        }
    }

    #[test]
    fn raster_scan_in_band() {
        let m = sample_map();
        let out = midpoint_raster::<f64>(&m, 256, 256, DU).unwrap();
        for y in 0..256 {
            for x in 0..256 {
                let (u, v) = out[y * 256 + x];
                let (eu, ev) = m.uv(x as f64, y as f64).unwrap();
                assert!(in_band(u, eu, DU) && in_band(v, ev, DU));
            }
        }
    }

    #[test]
    fn incremental_wq_equals_direct() {
        let m = sample_map();
        let mut s = midpoint_init::<f64>(&m, 3, 5, DU).unwrap();
        let moves = [(0, 1), (0, 1), (1, 1), (0, -1), (1, 1), (1, 1), (0, 1)];
        for k in 0..400 {
            let (axis, dir) = moves[k % moves.len()];
            if axis == 0 {
                midpoint_step_x(&mut s, dir).unwrap();
            } else {
                midpoint_step_y(&mut s, dir).unwrap();
            }
            let (x, y) = (s.x as f64, s.y as f64);
            let (w, q) = direct_wq(&m, x, y, s.u.value, DU, [m.a, m.b, m.c]);
            let scale = s.e.abs() * (1.0 + s.u.value.abs());
            assert!((w - s.u.w).abs() <= 1e-9 * scale && (q - s.u.q).abs() <= 1e-9 * scale);
            let (w, q) = direct_wq(&m, x, y, s.v.value, DU, [m.d, m.e, m.f]);
            assert!((w - s.v.w).abs() <= 1e-9 * scale && (q - s.v.q).abs() <= 1e-9 * scale);
            assert_eq!(s.u.value, s.u.n as f64 * DU);
            assert!(s.in_band());
        }
    }

    #[cfg(feature = "op-count")]
    #[test]
    fn steps_do_not_divide() {
        let m = sample_map();
        let mut s = midpoint_init::<Counted>(&m, 0, 0, DU).unwrap();
        let (_, c) = counted_scope("mid", || {
            for _ in 0..255 {
                midpoint_step_x(&mut s, 1).unwrap();
            }
        });
        assert_eq!(c.divisions, 0);
        // one multiply per coordinate per step
        assert_eq!(c.multiplications, 2 * 255);
    }

    #[test]
    fn behind_projection_rejected() {
        let m = ProjectiveTexMap::from_coeffs([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0]);
        assert!(matches!(
            midpoint_init::<f64>(&m, 2, 0, DU),
            Err(Error::BehindProjection { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_rows_stay_in_band(
            g in -0.004f64..0.004, h in -0.004f64..0.004,
            a in -0.01f64..0.01, b in -0.01f64..0.01, c in -0.5f64..1.5,
            y in 0i64..256,
        ) {
            let m = ProjectiveTexMap::from_coeffs([a, b, c, b, a, c, g, h, 2.0]);
            let row = midpoint_row::<f64>(&m, y, 0, 255, DU).unwrap();
            for (x, &(u, v)) in row.iter().enumerate() {
                let (eu, ev) = m.uv(x as f64, y as f64).unwrap();
                prop_assert!(in_band(u, eu, DU) && in_band(v, ev, DU));
            }
        }
    }
}
