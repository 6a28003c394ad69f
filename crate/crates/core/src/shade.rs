//! Perspective-correct parameter remapping: Gouraud intensities, the world
//! parameter t_w of a screen parameter t_v, polynomial stand-ins for t_w,
//! and normal interpolation.

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// World depths of the two ends of a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDepthPair {
    pub z1: f64,
    pub z2: f64,
}

impl EdgeDepthPair {
    pub fn new(z1: f64, z2: f64) -> Self {
        debug_assert!(z1 > 0.0 && z2 > 0.0);
        EdgeDepthPair { z1, z2 }
    }

    /// z1 = 1, z2 = hbar.
    pub fn from_ratio(hbar: f64) -> Self {
        EdgeDepthPair { z1: 1.0, z2: hbar }
    }

    pub fn hbar(&self) -> f64 {
        self.z2 / self.z1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityPair {
    pub i_a: [f64; 3],
    pub i_b: [f64; 3],
}

/// World parameter w of the screen parameter u.
pub fn gouraud_w(u: f64, d: EdgeDepthPair) -> f64 {
    u * d.z1 / (d.z2 - u * (d.z2 - d.z1))
}

/// Linear minus perspective-correct intensity, per channel.
pub fn gouraud_error(u: f64, d: EdgeDepthPair, ip: &IntensityPair) -> [f64; 3] {
    let h = d.hbar();
    let k = u * (1.0 - 1.0 / (h + u * (1.0 - h)));
    std::array::from_fn(|c| (ip.i_b[c] - ip.i_a[c]) * k)
}

/// Argmax and max of |linear - correct| for a unit intensity difference.
/// At hbar = 1 there is no error; returns (0.5, 0.0).
pub fn gouraud_error_bound(d: EdgeDepthPair) -> (f64, f64) {
    let h = d.hbar();
    if h == 1.0 {
        return (0.5, 0.0);
    }
    // (sqrt(h) - h)/(1 - h) without the cancellation near h = 1
    let s = h.sqrt();
    let u = s / (1.0 + s);
    let delta = u * (1.0 - 1.0 / (h + u * (1.0 - h)));
    (u, delta.abs())
}

pub fn tw_exact(t_v: f64, d: EdgeDepthPair) -> f64 {
    d.z1 * t_v / (d.z2 - t_v * (d.z2 - d.z1))
}

/// Same function written with the ratio only.
pub fn tw_exact_ratio(t_v: f64, hbar: f64) -> f64 {
    t_v / (hbar - t_v * (hbar - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwKind {
    Quadratic,
    PiecewiseQuadratic,
    Cubic,
}

impl TwKind {
    pub const ALL: [TwKind; 3] = [TwKind::Quadratic, TwKind::PiecewiseQuadratic, TwKind::Cubic];
}

/// Polynomial on `[lo, hi]`, coefficients highest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct TwSegment {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl TwSegment {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * t + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwPolyModel {
    pub kind: TwKind,
    pub segments: Vec<TwSegment>,
}

impl TwPolyModel {
    pub fn eval(&self, t_v: f64) -> f64 {
        let seg = self
            .segments
            .iter()
            .find(|s| t_v <= s.hi)
            .unwrap_or_else(|| self.segments.last().unwrap());
        seg.eval(t_v)
    }

    /// Interpolation nodes of the fit, including both ends.
    pub fn nodes(&self) -> Vec<f64> {
        match self.kind {
            TwKind::Quadratic => vec![0.0, 0.5, 1.0],
            TwKind::PiecewiseQuadratic => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            TwKind::Cubic => vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
        }
    }

    /// First node after 0. Below it the relative error is dominated by the
    /// end-slope mismatch as t_w -> 0.
    pub fn first_interior_node(&self) -> f64 {
        self.nodes()[1]
    }
}

pub fn tw_fit(kind: TwKind, d: EdgeDepthPair) -> TwPolyModel {
    let (za, zb) = (d.z1, d.z2);
    let segments = match kind {
        TwKind::Quadratic => {
            let h = d.hbar();
            vec![TwSegment {
                lo: 0.0,
                hi: 1.0,
                coeffs: vec![2.0 * (h - 1.0) / (h + 1.0), (3.0 - h) / (h + 1.0), 0.0],
            }]
        }
        TwKind::PiecewiseQuadratic => {
            // nodes {0, 1/4, 1/2} and {1/2, 3/4, 1}
            let d1 = (za + zb) * (za + 3.0 * zb);
            let d2 = (za + zb) * (3.0 * za + zb);
            vec![
                TwSegment {
                    lo: 0.0,
                    hi: 0.5,
                    coeffs: vec![
                        -8.0 * za * (za - zb) / d1,
                        2.0 * za * (3.0 * za + zb) / d1,
                        0.0,
                    ],
                },
                TwSegment {
                    lo: 0.5,
                    hi: 1.0,
                    coeffs: vec![
                        -8.0 * zb * (za - zb) / d2,
                        2.0 * zb * (9.0 * za - 5.0 * zb) / d2,
                        3.0 * (za - zb) * (za - zb) / d2,
                    ],
                },
            ]
        }
        TwKind::Cubic => {
            let dc = (2.0 * zb + za) * (zb + 2.0 * za);
            let dz = zb - za;
            vec![TwSegment {
                lo: 0.0,
                hi: 1.0,
                coeffs: vec![
                    9.0 * dz * dz / dc,
                    -9.0 * dz * (zb - 2.0 * za) / dc,
                    (2.0 * zb * zb - 4.0 * za * zb + 11.0 * za * za) / dc,
                    0.0,
                ],
            }]
        }
    };
    TwPolyModel { kind, segments }
}

/// Error of a t_w model sampled at `t = k/n`, k = 1..=n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwError {
    /// max |p - t_w| / t_w for t_v at or past the first interior node
    pub max_rel_interior: f64,
    pub max_rel_full: f64,
    pub max_abs: f64,
}

pub fn tw_error(model: &TwPolyModel, d: EdgeDepthPair, n: usize) -> TwError {
    let knot = model.first_interior_node();
    let mut e = TwError {
        max_rel_interior: 0.0,
        max_rel_full: 0.0,
        max_abs: 0.0,
    };
    for k in 1..=n {
        let t = k as f64 / n as f64;
        let w = tw_exact(t, d);
        let abs = (model.eval(t) - w).abs();
        let rel = abs / w;
        e.max_abs = e.max_abs.max(abs);
        e.max_rel_full = e.max_rel_full.max(rel);
        if t >= knot {
            e.max_rel_interior = e.max_rel_interior.max(rel);
        }
    }
    e
}

pub fn lerp_normal(n_left: Vec3, n_right: Vec3, t_w: f64) -> Vec3 {
    n_left + (n_right - n_left) * t_w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFrame {
    pub n_a: Vec3,
    pub n_k: Vec3,
    pub psi: f64,
}

pub fn make_normal_frame(n_a: Vec3, n_b: Vec3) -> Result<NormalFrame> {
    let c = n_a.dot(&n_b);
    if c.abs() > 1.0 - 1e-9 {
        return Err(Error::ParallelNormals);
    }
    let n_k = (n_b - n_a * c).normalize();
    Ok(NormalFrame {
        n_a,
        n_k,
        psi: c.clamp(-1.0, 1.0).acos(),
    })
}

/// Perspective-corrected spherical interpolation. The result has unit length
/// by construction; no normalization is applied.
pub fn slerp_perspective(f: &NormalFrame, eta: f64, d: EdgeDepthPair) -> Vec3 {
    if eta <= 0.0 {
        return f.n_a;
    }
    let cot = |a: f64| a.cos() / a.sin();
    let cpsi = cot(f.psi);
    let b = cpsi + (d.z2 / d.z1) * (cot(eta * f.psi) - cpsi);
    (f.n_a * b + f.n_k) / (1.0 + b * b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Project segment ends through a pinhole, intersect the sight ray at a
    // screen parameter with the 3D segment and return the world parameter.
    fn geometric_w(u: f64, z1: f64, z2: f64) -> f64 {
        let a = Vector3::new(-1.0, 0.3, z1);
        let b = Vector3::new(2.0, -0.4, z2);
        let (sa, sb) = (a.x / a.z, b.x / b.z);
        let s = sa + u * (sb - sa);
        // a.x + w(b.x - a.x) = s (a.z + w(b.z - a.z))
        (s * a.z - a.x) / ((b.x - a.x) - s * (b.z - a.z))
    }

    #[test]
    fn gouraud_w_examples() {
        assert_eq!(gouraud_w(0.5, EdgeDepthPair::new(2.0, 2.0)), 0.5);
        assert!(close(gouraud_w(0.5, EdgeDepthPair::new(1.0, 3.0)), 0.25, 1e-15));
        assert!(close(geometric_w(0.5, 1.0, 3.0), 0.25, 1e-12));
        for u in [0.0, 1.0] {
            assert!(close(gouraud_w(u, EdgeDepthPair::new(1.3, 7.0)), u, 1e-15));
        }
    }

    #[test]
    fn gouraud_w_matches_geometry() {
        for &(z1, z2) in &[(1.0, 3.0), (4.0, 1.5), (2.0, 2.5)] {
            for k in 0..=10 {
                let u = k as f64 / 10.0;
                assert!(close(gouraud_w(u, EdgeDepthPair::new(z1, z2)), geometric_w(u, z1, z2), 1e-12));
            }
        }
    }

    #[test]
    fn tw_examples() {
        let d = EdgeDepthPair::new(1.0, 2.0);
        assert!(close(tw_exact(0.5, d), 1.0 / 3.0, 1e-15));
        assert!(close(geometric_w(0.5, 1.0, 2.0), 1.0 / 3.0, 1e-12));
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert!(close(tw_exact(t, EdgeDepthPair::new(3.0, 3.0)), t, 1e-15));
            let d = EdgeDepthPair::new(1.7, 5.1);
            assert!(close(tw_exact(t, d), tw_exact_ratio(t, d.hbar()), 1e-12));
            assert!(close(tw_exact(t, d), gouraud_w(t, d), 1e-12));
        }
    }

    #[test]
    fn gouraud_error_examples() {
        let ip = IntensityPair {
            i_a: [0.0; 3],
            i_b: [1.0; 3],
        };
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            assert_eq!(gouraud_error(u, EdgeDepthPair::from_ratio(1.0), &ip), [0.0; 3]);
        }
        assert_eq!(gouraud_error(0.0, EdgeDepthPair::from_ratio(3.0), &ip), [0.0; 3]);
        let e = gouraud_error(2.0 / 3.0, EdgeDepthPair::from_ratio(4.0), &ip);
        assert!(close(e[0], 1.0 / 3.0, 1e-15));
        let (u, m) = gouraud_error_bound(EdgeDepthPair::from_ratio(4.0));
        assert!(close(u, 2.0 / 3.0, 1e-15) && close(m, 1.0 / 3.0, 1e-15));
        assert_eq!(gouraud_error_bound(EdgeDepthPair::from_ratio(1.0)), (0.5, 0.0));
    }

    #[test]
    fn bound_matches_brute_force() {
        for &h in &[0.2, 0.5, 1.5, 4.0, 9.0] {
            let d = EdgeDepthPair::from_ratio(h);
            let n = 1_000_000;
            let (mut best_u, mut best) = (0.0, 0.0);
            for k in 0..=n {
                let u = k as f64 / n as f64;
                let e = (u - gouraud_w(u, d)).abs();
                if e > best {
                    best = e;
                    best_u = u;
                }
            }
            let (u, m) = gouraud_error_bound(d);
            assert!(close(u, best_u, 1e-6), "h={h}: {u} vs {best_u}");
            assert!(close(m, best, 1e-12));
            let (_, m_inv) = gouraud_error_bound(EdgeDepthPair::from_ratio(1.0 / h));
            assert!(close(m, m_inv, 1e-12));
        }
    }

    // Linear solve of the interpolation conditions, independent of the closed forms.
    fn interp_coeffs(nodes: &[f64], d: EdgeDepthPair) -> Vec<f64> {
        let n = nodes.len();
        if n == 3 {
            let m = Matrix3::from_fn(|r, c| nodes[r].powi(2 - c as i32));
            let rhs = Vector3::from_fn(|r, _| tw_exact(nodes[r], d));
            let x = m.lu().solve(&rhs).unwrap();
            x.iter().copied().collect()
        } else {
            let m = Matrix4::from_fn(|r, c| nodes[r].powi(3 - c as i32));
            let rhs = Vector4::from_fn(|r, _| tw_exact(nodes[r], d));
            let x = m.lu().solve(&rhs).unwrap();
            x.iter().copied().collect()
        }
    }

    #[test]
    fn closed_forms_match_interpolation_solve() {
        for &(za, zb) in &[(1.0, 2.0), (1.0, 3.0), (2.5, 1.0), (1.3, 6.1)] {
            let d = EdgeDepthPair::new(za, zb);
            let q = tw_fit(TwKind::Quadratic, d);
            let r = interp_coeffs(&[0.0, 0.5, 1.0], d);
            for (a, b) in q.segments[0].coeffs.iter().zip(&r) {
                assert!(close(*a, *b, 1e-12));
            }
            let c = tw_fit(TwKind::Cubic, d);
            let r = interp_coeffs(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], d);
            for (a, b) in c.segments[0].coeffs.iter().zip(&r) {
                assert!(close(*a, *b, 1e-12));
            }
            let p = tw_fit(TwKind::PiecewiseQuadratic, d);
            let r1 = interp_coeffs(&[0.0, 0.25, 0.5], d);
            let r2 = interp_coeffs(&[0.5, 0.75, 1.0], d);
            for (a, b) in p.segments[0].coeffs.iter().zip(&r1) {
                assert!(close(*a, *b, 1e-12));
            }
            for (a, b) in p.segments[1].coeffs.iter().zip(&r2) {
                assert!(close(*a, *b, 1e-12));
            }
        }
    }

    #[test]
    fn quadratic_at_three_is_square() {
        let m = tw_fit(TwKind::Quadratic, EdgeDepthPair::from_ratio(3.0));
        assert_eq!(m.segments[0].coeffs, vec![1.0, 0.0, 0.0]);
        assert!(close(tw_exact_ratio(0.5, 3.0), 0.25, 1e-15));
        let id = tw_fit(TwKind::Quadratic, EdgeDepthPair::from_ratio(1.0));
        assert_eq!(id.segments[0].coeffs, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn models_hit_their_nodes() {
        for kind in TwKind::ALL {
            for &h in &[0.4, 2.0, 3.0, 4.0, 5.0] {
                let d = EdgeDepthPair::new(1.5, 1.5 * h);
                let m = tw_fit(kind, d);
                assert_eq!(m.eval(0.0), 0.0);
                assert!(close(m.eval(1.0), 1.0, 1e-15));
                for t in m.nodes() {
                    assert!(close(m.eval(t), tw_exact(t, d), 1e-12), "{kind:?} h={h} t={t}");
                }
                if kind == TwKind::PiecewiseQuadratic {
                    assert!(close(m.segments[0].eval(0.5), m.segments[1].eval(0.5), 1e-14));
                }
            }
        }
    }

    // Frozen measurements, 1e5 samples, z_A = 1, z_B = h.
    #[test]
    fn interior_error_values() {
        let expect_pw = [1.069, 4.009, 8.248, 13.364];
        let expect_cu = [0.642, 2.933, 6.415, 10.664];
        for (i, h) in [2.0, 3.0, 4.0, 5.0].into_iter().enumerate() {
            let d = EdgeDepthPair::from_ratio(h);
            let pw = tw_error(&tw_fit(TwKind::PiecewiseQuadratic, d), d, 100_000);
            let cu = tw_error(&tw_fit(TwKind::Cubic, d), d, 100_000);
            let q = tw_error(&tw_fit(TwKind::Quadratic, d), d, 100_000);
            assert!(close(100.0 * pw.max_rel_interior, expect_pw[i], 1e-3), "{h}: {pw:?}");
            assert!(close(100.0 * cu.max_rel_interior, expect_cu[i], 1e-3), "{h}: {cu:?}");
            assert!(q.max_rel_interior > pw.max_rel_interior);
            assert!(pw.max_rel_interior > cu.max_rel_interior);
        }
    }

    #[test]
    fn frame_examples() {
        let f = make_normal_frame(Vec3::x(), Vec3::y()).unwrap();
        assert!(close(f.psi, PI / 2.0, 1e-15));
        assert!((f.n_k - Vec3::y()).norm() < 1e-15);
        let a = Vec3::new(0.2, 0.3, 0.9).normalize();
        let b = Vec3::new(-0.5, 0.1, 0.7).normalize();
        let f = make_normal_frame(a, b).unwrap();
        assert!((f.n_a * f.psi.cos() + f.n_k * f.psi.sin() - b).norm() < 1e-12);
        assert!(f.n_a.dot(&f.n_k).abs() < 1e-12);
        assert_eq!(make_normal_frame(a, -a), Err(Error::ParallelNormals));
        assert_eq!(make_normal_frame(a, a), Err(Error::ParallelNormals));
    }

    #[test]
    fn lerp_endpoints() {
        let (a, b) = (Vec3::x(), Vec3::new(0.0, 0.6, 0.8));
        assert_eq!(lerp_normal(a, b, 0.0), a);
        assert_eq!(lerp_normal(a, b, 1.0), b);
        assert_eq!(lerp_normal(b, b, 0.37), b);
    }

    #[test]
    fn slerp_examples() {
        let a = Vec3::new(0.2, 0.3, 0.9).normalize();
        let b = Vec3::new(-0.5, 0.1, 0.7).normalize();
        let f = make_normal_frame(a, b).unwrap();
        for h in [0.25, 1.0, 3.0] {
            let d = EdgeDepthPair::from_ratio(h);
            assert!((slerp_perspective(&f, 1.0, d) - b).norm() < 1e-12);
            assert_eq!(slerp_perspective(&f, 0.0, d), a);
        }
        let f = make_normal_frame(Vec3::x(), Vec3::y()).unwrap();
        let n = slerp_perspective(&f, 0.5, EdgeDepthPair::new(2.0, 2.0));
        assert!((n - (Vec3::x() + Vec3::y()) / 2f64.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn equal_depths_give_uniform_angle() {
        let a = Vec3::new(0.0, 0.6, 0.8);
        let b = Vec3::new(0.8, 0.0, 0.6);
        let f = make_normal_frame(a, b).unwrap();
        for k in 1..10 {
            let eta = k as f64 / 10.0;
            let n = slerp_perspective(&f, eta, EdgeDepthPair::new(3.0, 3.0));
            assert!(close(a.dot(&n).clamp(-1.0, 1.0).acos(), eta * f.psi, 1e-12));
        }
    }

    proptest! {
        #[test]
        fn slerp_is_unit(eta in 1e-6f64..1.0, h in 0.05f64..20.0,
                         ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0) {
            let a = Vec3::new(ax, ay, 1.0).normalize();
            let b = Vec3::new(bx, by, 0.5).normalize();
            prop_assume!(a.dot(&b).abs() < 1.0 - 1e-6);
            let f = make_normal_frame(a, b).unwrap();
            let n = slerp_perspective(&f, eta, EdgeDepthPair::from_ratio(h));
            prop_assert!((n.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn common_depth_scale_changes_nothing(u in 0.0f64..1.0, z1 in 0.1f64..10.0, z2 in 0.1f64..10.0, s in 0.01f64..100.0) {
            let a = gouraud_w(u, EdgeDepthPair::new(z1, z2));
            let b = gouraud_w(u, EdgeDepthPair::new(z1 * s, z2 * s));
            prop_assert!((a - b).abs() <= 1e-12);
            let f = make_normal_frame(Vec3::x(), Vec3::new(0.3, 0.9, 0.1).normalize()).unwrap();
            let na = slerp_perspective(&f, u.max(1e-3), EdgeDepthPair::new(z1, z2));
            let nb = slerp_perspective(&f, u.max(1e-3), EdgeDepthPair::new(z1 * s, z2 * s));
            prop_assert!((na - nb).norm() <= 1e-12);
        }

        #[test]
        fn gouraud_w_is_increasing_onto(z1 in 0.05f64..50.0, z2 in 0.05f64..50.0, u in 0.0f64..0.999) {
            let d = EdgeDepthPair::new(z1, z2);
            prop_assert!(gouraud_w(u + 1e-3, d) > gouraud_w(u, d));
            prop_assert!((0.0..=1.0).contains(&gouraud_w(u, d)));
        }

        #[test]
        fn error_model_is_linear_minus_correct(u in 0.0f64..1.0, z1 in 0.1f64..10.0, z2 in 0.1f64..10.0,
                                               ia in 0.0f64..1.0, ib in 0.0f64..1.0) {
            let d = EdgeDepthPair::new(z1, z2);
            let ip = IntensityPair { i_a: [ia; 3], i_b: [ib; 3] };
            let lin = ia + u * (ib - ia);
            let cor = ia + gouraud_w(u, d) * (ib - ia);
            prop_assert!((gouraud_error(u, d, &ip)[0] - (lin - cor)).abs() <= 1e-12);
            let (_, m) = gouraud_error_bound(d);
            prop_assert!(gouraud_error(u, d, &ip)[0].abs() <= m * (ib - ia).abs() + 1e-15);
        }
    }
}
