//! The numeric claims, each measured against an independent oracle.
//!
//! Rows are grouped by acceptance criterion (1..=15). A criterion holds when
//! none of its fatal rows fail; informational rows carry secondary numbers
//! such as tightness or a stricter reference bound.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::compare::{ErrorStats, MethodParams, clipped_spans};
use super::counter::{Counted, counted_scope};
use super::report::ClaimRow;
use super::scenes::{
    ANCHOR_ROW, TexPoly, UNIT_UV, anchor_scene, bezier_row_suite, random_axis_parallel_quad,
    random_perspective_triangle, random_raster_map, rng_for,
};
use crate::geometry::{ScreenTriangle, Vec3};
use crate::raster::aniso::jacobian;
use crate::raster::nrl::{NrlRounding, nrl_line_state, nrl_setup, nrl_triangle, nrl_uv};
use crate::raster::scanline::{FillRule, covered_pixels, scanline_triangle};
use crate::raster::serpentine::serpentine_window;
use crate::shade::{
    EdgeDepthPair, IntensityPair, TwKind, gouraud_error, gouraud_error_bound, make_normal_frame,
    slerp_perspective, tw_error, tw_fit,
};
use crate::texmap::bezier::{BezierParam, bezier_eval_fd, bezier_row, bezier_row_uv};
use crate::texmap::midpoint::midpoint_raster;
use crate::texmap::quadratic::{Anchor, anchor_weights, quad_row};
use crate::texmap::{MapClass, ProjectiveTexMap, classify_map, derive_from_quad, exact_uv, row_uv_specialized};

/// Deliberate defects for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// the midpoint kernel runs with a perturbed denominator coefficient
    MidpointCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimsConfig {
    pub seed: u64,
    pub threads: usize,
    pub fault: Option<Fault>,
}

impl Default for ClaimsConfig {
    fn default() -> Self {
        ClaimsConfig {
            seed: 42,
            threads: 1,
            fault: None,
        }
    }
}

pub const CRITERIA: [(u8, &str); 15] = [
    (1, "midpoint band"),
    (2, "piecewise quadratic t_w bounds"),
    (3, "cubic t_w bounds"),
    (4, "unit normal without normalization"),
    (5, "Gouraud error model"),
    (6, "anchor shift"),
    (7, "anchor coefficient table"),
    (8, "Bezier parameter methods"),
    (9, "finite-difference Bezier stepping"),
    (10, "division ledger"),
    (11, "special-case detection"),
    (12, "NRL geometric invariant"),
    (13, "NRL correction accuracy"),
    (14, "serpentine window"),
    (15, "anisotropic footprint"),
];

pub fn run_criterion(n: u8, cfg: &ClaimsConfig) -> Vec<ClaimRow> {
    let seed = cfg.seed;
    match n {
        1 => midpoint_band(seed, cfg.fault),
        2 => tw_bounds(TwKind::PiecewiseQuadratic),
        3 => tw_bounds(TwKind::Cubic),
        4 => unit_normal(seed),
        5 => gouraud_model(seed),
        6 => anchor_shift(),
        7 => anchor_table(seed),
        8 => bezier_params(seed),
        9 => bezier_fd(seed),
        10 => division_ledger(seed),
        11 => special_cases(seed),
        12 => nrl_geometry(seed),
        13 => nrl_correction(seed),
        14 => serpentine(seed),
        15 => footprint(seed),
        _ => Vec::new(),
    }
}

/// Every criterion, in order. Criteria are spread over `cfg.threads`
/// workers; the output does not depend on the thread count.
pub fn claims_suite_with(cfg: &ClaimsConfig) -> Vec<ClaimRow> {
    let ids: Vec<u8> = CRITERIA.iter().map(|c| c.0).collect();
    let threads = cfg.threads.clamp(1, ids.len());
    let mut parts: Vec<(u8, Vec<ClaimRow>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let mine: Vec<u8> = ids.iter().copied().skip(w).step_by(threads).collect();
                s.spawn(move || mine.into_iter().map(|n| (n, run_criterion(n, cfg))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("claims worker panicked")).collect()
    });
    parts.sort_by_key(|p| p.0);
    parts.into_iter().flat_map(|p| p.1).collect()
}

pub fn claims_suite(seed: u64) -> Vec<ClaimRow> {
    claims_suite_with(&ClaimsConfig {
        seed,
        ..ClaimsConfig::default()
    })
}

/// (criterion, passed) from a set of rows.
pub fn criterion_status(rows: &[ClaimRow]) -> Vec<(u8, bool)> {
    CRITERIA
        .iter()
        .map(|&(n, _)| (n, rows.iter().filter(|r| r.criterion == n).all(|r| !r.failed_fatally())))
        .collect()
}

// -- 1 ---------------------------------------------------------------------

fn midpoint_band(seed: u64, fault: Option<Fault>) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 1);
    let du = 1.0 / 256.0;
    let (w, h) = (256i64, 256i64);
    let mut violations = 0u64;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = random_raster_map(&mut rng, w as f64, h as f64, 120.0);
        let run = match fault {
            Some(Fault::MidpointCoefficient) => ProjectiveTexMap { g: m.g * 1.01, ..m },
            None => m,
        };
        let got = midpoint_raster::<f64>(&run, w, h, du).expect("map valid over raster");
        for y in 0..h {
            for x in 0..w {
                let (u, v) = m.uv(x as f64, y as f64).expect("map valid over raster");
                let (gu, gv) = got[(y * w + x) as usize];
                for (g, e) in [(gu, u), (gv, v)] {
                    let d = g - e;
                    worst = worst.max(d.abs() / du);
                    if !(d >= -du / 2.0 && d < du / 2.0) {
                        violations += 1;
                    }
                }
            }
        }
    }
    vec![
        ClaimRow::new(1, "midpoint", "raster50", "band_violations").equals(violations as f64, 0.0),
        ClaimRow::new(1, "midpoint", "raster50", "max_abs_over_du").at_most(worst, 0.5).info(),
    ]
}

// -- 2, 3 ------------------------------------------------------------------

const PIECEWISE_BOUNDS: [f64; 4] = [1.0, 4.0, 8.0, 13.0];
const CUBIC_BOUNDS: [f64; 4] = [0.64, 2.9, 6.3, 10.6];
const PERCENT_SLACK: f64 = 0.05;

fn tw_bounds(kind: TwKind) -> Vec<ClaimRow> {
    let (crit, name, bounds) = match kind {
        TwKind::Cubic => (3, "tw_cubic", CUBIC_BOUNDS),
        _ => (2, "tw_piecewise", PIECEWISE_BOUNDS),
    };
    let mut rows = Vec::new();
    for (k, &bound) in bounds.iter().enumerate() {
        let hbar = (k + 2) as f64;
        let d = EdgeDepthPair::from_ratio(hbar);
        let e = tw_error(&tw_fit(kind, d), d, 100_000);
        let pct = 100.0 * e.max_rel_interior;
        let scene = format!("h{}", k + 2);
        rows.push(ClaimRow::new(crit, name, &scene, "max_rel_pct").check(pct, bound, pct <= bound + PERCENT_SLACK));
        rows.push(
            ClaimRow::new(crit, name, &scene, "tightness_ratio")
                .check(pct / bound, 0.5, pct >= 0.5 * bound)
                .info(),
        );
        rows.push(
            ClaimRow::new(crit, name, &scene, "max_rel_pct_full_range")
                .at_most(100.0 * e.max_rel_full, bound + PERCENT_SLACK)
                .info(),
        );
    }
    rows
}

// -- 4 ---------------------------------------------------------------------

fn unit_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn unit_normal(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 4);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 100_000 {
        let (a, b) = (unit_vec(&mut rng), unit_vec(&mut rng));
        let Ok(f) = make_normal_frame(a, b) else { continue };
        let eta = rng.random_range(1e-6..=1.0);
        let d = EdgeDepthPair::new(rng.random_range(0.1..10.0), rng.random_range(0.1..10.0));
        worst = worst.max((slerp_perspective(&f, eta, d).norm() - 1.0).abs());
        n += 1;
    }
    vec![ClaimRow::new(4, "slerp_perspective", "random1e5", "max_norm_dev").at_most(worst, 1e-12)]
}

// -- 5 ---------------------------------------------------------------------

/// World parameter of screen parameter `u` by intersecting the sight ray
/// with the segment (x_a, z1)-(x_b, z2) in a unit pinhole.
fn world_param_by_ray(u: f64, xa: f64, xb: f64, z1: f64, z2: f64) -> f64 {
    let (sa, sb) = (xa / z1, xb / z2);
    let s = sa + u * (sb - sa);
    (s * z1 - xa) / ((xb - xa) - s * (z2 - z1))
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn gouraud_model(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 5);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let (z1, z2) = (rng.random_range(0.5..8.0), rng.random_range(0.5..8.0));
        let (xa, xb) = (rng.random_range(-3.0..-0.5), rng.random_range(0.5..3.0));
        let u = rng.random_range(0.0..=1.0);
        let ia: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..=1.0));
        let ib: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..=1.0));
        let got = gouraud_error(u, EdgeDepthPair::new(z1, z2), &IntensityPair { i_a: ia, i_b: ib });
        let w = world_param_by_ray(u, xa, xb, z1, z2);
        for c in 0..3 {
            let linear = ia[c] + u * (ib[c] - ia[c]);
            let correct = ia[c] + w * (ib[c] - ia[c]);
            worst = worst.max((got[c] - (linear - correct)).abs());
        }
    }
    let mut arg = 0.0f64;
    let mut sym = 0.0f64;
    for _ in 0..200 {
        let hbar = if rng.random_bool(0.5) {
            rng.random_range(1.05..10.0)
        } else {
            rng.random_range(0.1..0.95)
        };
        let d = EdgeDepthPair::from_ratio(hbar);
        let (u_star, max) = gouraud_error_bound(d);
        let unit = IntensityPair {
            i_a: [0.0; 3],
            i_b: [1.0; 3],
        };
        let num = golden_max(|u| gouraud_error(u, d, &unit)[0].abs(), 0.0, 1.0);
        arg = arg.max((num - u_star).abs());
        let (_, inv) = gouraud_error_bound(EdgeDepthPair::from_ratio(1.0 / hbar));
        sym = sym.max((max - inv).abs());
    }
    vec![
        ClaimRow::new(5, "gouraud_error", "random1e5", "independent_path_diff").at_most(worst, 1e-12),
        ClaimRow::new(5, "gouraud_error_bound", "random200", "argmax_diff").at_most(arg, 1e-6),
        ClaimRow::new(5, "gouraud_error_bound", "random200", "reciprocal_ratio_diff").at_most(sym, 1e-12),
    ]
}

// -- 6 ---------------------------------------------------------------------

/// Max relative u error of the quadratic row fit on the anchor polygon's row.
pub fn anchor_row_error(x_int: f64) -> (i64, i64, f64) {
    let s = anchor_scene();
    let poly = &s.polys[0];
    let (mut xs, mut xe) = (i64::MAX, i64::MIN);
    for t in &poly.tris {
        for (y, a, b) in clipped_spans(t, s.width, s.height).expect("fixed polygon") {
            if y == ANCHOR_ROW {
                xs = xs.min(a);
                xe = xe.max(b);
            }
        }
    }
    let vals = quad_row::<f64>(&poly.map, ANCHOR_ROW, xs, xe, Anchor::Fixed(x_int)).expect("row in front");
    let mut st = ErrorStats::new(MethodParams::default().du);
    for (k, (u, _)) in vals.into_iter().enumerate() {
        let (e, _) = poly.map.uv((xs + k as i64) as f64, ANCHOR_ROW as f64).expect("row in front");
        st.add(&[(u, e)]);
    }
    (xs, xe, st.max_rel)
}

fn anchor_shift() -> Vec<ClaimRow> {
    let (_, _, quarter) = anchor_row_error(0.25);
    let (_, _, half) = anchor_row_error(0.5);
    vec![
        ClaimRow::new(6, "quad", "anchor_poly_row32", "max_rel_ratio_025_over_05").at_most(quarter / half, 0.65),
        ClaimRow::new(6, "quad", "anchor_poly_row32", "max_rel_pct_x05").check(100.0 * half, f64::NAN, true).info(),
        ClaimRow::new(6, "quad", "anchor_poly_row32", "max_rel_pct_x025").check(100.0 * quarter, f64::NAN, true).info(),
    ]
}

// -- 7 ---------------------------------------------------------------------

/// Reference coefficient rows: x_int, weights of (u1, u0, u_int) in A and in B.
pub const ANCHOR_TABLE: [(f64, [f64; 3], [f64; 3]); 7] = [
    (0.75, [4.0, 1.333, -5.333], [-3.0, -2.333, 5.333]),
    (0.7, [3.333, 1.429, -4.762], [-2.333, -2.429, 4.762]),
    (0.6, [2.5, 1.667, -4.167], [-1.5, -2.667, 4.167]),
    (0.5, [2.0, 2.0, -4.0], [-1.0, -3.0, 4.0]),
    (0.4, [1.667, 2.5, -4.167], [-0.667, -3.5, 4.167]),
    (0.3, [1.4297, 3.333, -4.762], [-0.429, -4.333, 4.762]),
    (0.25, [1.333, 4.0, -5.333], [-0.333, -5.0, 5.333]),
];

fn anchor_table(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 7);
    let triples: Vec<[f64; 3]> = (0..100)
        .map(|_| std::array::from_fn(|_| rng.random_range(0.0..=1.0)))
        .collect();
    let dot = |w: [f64; 3], u: &[f64; 3]| w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
    ANCHOR_TABLE
        .iter()
        .map(|&(x, ta, tb)| {
            let (a, b) = anchor_weights(x).expect("anchor inside (0, 1)");
            let worst = triples
                .iter()
                .map(|u| (dot(ta, u) - dot(a, u)).abs().max((dot(tb, u) - dot(b, u)).abs()))
                .fold(0.0f64, f64::max);
            ClaimRow::new(7, "quad_fit_anchored", &format!("x_int_{x}"), "max_coeff_diff").at_most(worst, 1e-3)
        })
        .collect()
}

// -- 8 ---------------------------------------------------------------------

fn bezier_params(seed: u64) -> Vec<ClaimRow> {
    let du = MethodParams::default().du;
    let iter = MethodParams::default().iter;
    let mut st_iter = ErrorStats::new(du);
    let mut st_quad = ErrorStats::new(du);
    let mut st_exact = ErrorStats::new(du);
    let mut st_trad = ErrorStats::new(du);
    for r in bezier_row_suite(seed) {
        let vals = quad_row::<f64>(&r.map, 0, r.xs, r.xe, Anchor::Fixed(0.5)).expect("suite rows are projective");
        for (k, (u, v)) in vals.into_iter().enumerate() {
            let (eu, ev) = r.map.uv((r.xs + k as i64) as f64, 0.0).expect("row in front");
            st_trad.add(&[(u, eu), (v, ev)]);
        }
        let runs = [
            (BezierParam::Iterative(iter), &mut st_iter),
            (BezierParam::Quadratic { t1: 0.5 }, &mut st_quad),
            (BezierParam::Exact, &mut st_exact),
        ];
        for (param, st) in runs {
            let vals = bezier_row_uv::<f64>(&r.map, 0, r.xs, r.xe, param).expect("suite rows are projective");
            for (k, (u, v)) in vals.into_iter().enumerate() {
                let (eu, ev) = r.map.uv((r.xs + k as i64) as f64, 0.0).expect("row in front");
                st.add(&[(u, eu), (v, ev)]);
            }
        }
    }
    let (it, qd) = (100.0 * st_iter.max_rel, 100.0 * st_quad.max_rel);
    let trad = 100.0 * st_trad.max_rel;
    vec![
        ClaimRow::new(8, "bezier-iter", "rows50", "max_rel_pct").check(it, 2.0, it <= 2.0),
        ClaimRow::new(8, "bezier-iter", "rows50", "max_rel_pct_vs_reference").at_most(it, 0.7).info(),
        ClaimRow::new(8, "bezier-quad", "rows50", "max_rel_pct").check(qd, 3.0, qd <= 3.0),
        ClaimRow::new(8, "bezier-quad", "rows50", "max_rel_pct_vs_reference").at_most(qd, 1.7).info(),
        ClaimRow::new(8, "bezier", "rows50", "max_rel_pct_exact_t")
            .check(100.0 * st_exact.max_rel, f64::NAN, true)
            .info(),
        ClaimRow::new(8, "quad", "rows50", "max_rel_pct_x05").check(trad, f64::NAN, true).info(),
        // improvement over the plain quadratic row fit on the same rows
        ClaimRow::new(8, "bezier-iter", "rows50", "quad_over_method").check(trad / it, 7.0, trad / it >= 7.0).info(),
        ClaimRow::new(8, "bezier-quad", "rows50", "quad_over_method").check(trad / qd, 3.0, trad / qd >= 3.0).info(),
    ]
}

// -- 9 ---------------------------------------------------------------------

fn bezier_fd(seed: u64) -> Vec<ClaimRow> {
    let mut worst = 0.0f64;
    for r in bezier_row_suite(seed) {
        let row = bezier_row::<f64>(&r.map, 0, r.xs, r.xe).expect("suite rows are projective");
        let n = 1000;
        let dt = 1.0 / n as f64;
        let fd = bezier_eval_fd(&row, 0.0, dt, n);
        let span = |p: [f64; 3]| p.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - p.iter().cloned().fold(f64::INFINITY, f64::min);
        let range = [span(row.x), span(row.u), span(row.v)];
        for (k, &(x, u, v)) in fd.iter().enumerate() {
            let t = k as f64 * dt;
            let closed = [row.x_at(t), row.u_at(t), row.v_at(t)];
            for (c, got) in [x, u, v].into_iter().enumerate() {
                worst = worst.max((got - closed[c]).abs() / range[c].max(f64::MIN_POSITIVE));
            }
        }
    }
    vec![ClaimRow::new(9, "bezier_eval_fd", "rows50", "max_drift_over_range").at_most(worst, 1e-9)]
}

// -- 10 --------------------------------------------------------------------

fn rows_of(poly: &TexPoly, w: usize, h: usize) -> Vec<(i64, i64, i64)> {
    let mut rows: std::collections::BTreeMap<i64, (i64, i64)> = Default::default();
    for t in &poly.tris {
        for (y, a, b) in clipped_spans(t, w, h).expect("valid polygon") {
            let e = rows.entry(y).or_insert((a, b));
            e.0 = e.0.min(a);
            e.1 = e.1.max(b);
        }
    }
    rows.into_iter().map(|(y, (a, b))| (y, a, b)).collect()
}

fn division_ledger(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 10);
    let mut rows = Vec::new();
    for k in 0..5 {
        let tp = random_perspective_triangle(&mut rng, 200.0);
        let t = tp.tris[0];
        let scene = format!("tri{k}");
        // exact: two per interior pixel
        let (n, c) = counted_scope("exact", || {
            let px = covered_pixels(&scanline_triangle(&t, FillRule::TopLeft).expect("valid"));
            for &(x, y) in &px {
                exact_uv(&tp.map, Counted(x as f64), Counted(y as f64)).expect("in front");
            }
            px.len()
        });
        rows.push(ClaimRow::new(10, "exact", &scene, "divisions_eq_2T").equals(c.divisions as f64, 2.0 * n as f64).with_ops(c));
        let (lines, c) = counted_scope("nrl", || {
            nrl_triangle::<Counted>(&tp.map, &t, FillRule::TopLeft, NrlRounding::HalfUp).expect("perspective triangle")
        });
        let q = lines.len() as f64;
        rows.push(ClaimRow::new(10, "nrl", &scene, "divisions_eq_q_plus_1").equals(c.divisions as f64, q + 1.0).with_ops(c));
    }
    // rows of a trapezoid with horizontal sides: v is fixed per row
    let trap = TexPoly::from_quad([(10.0, 20.0), (200.0, 20.0), (160.0, 150.0), (40.0, 150.0)], UNIT_UV).expect("trapezoid");
    let trap_rows = rows_of(&trap, 256, 256);
    let (_, c) = counted_scope("row_constant_v", || {
        for &(y, a, b) in &trap_rows {
            row_uv_specialized::<Counted>(&trap.map, y, a, b, MapClass::RowConstantV).expect("class matches");
        }
    });
    rows.push(
        ClaimRow::new(10, "row_constant_v", "trapezoid", "divisions_eq_q")
            .equals(c.divisions as f64, trap_rows.len() as f64)
            .with_ops(c),
    );
    let para = TexPoly::from_quad([(20.0, 30.0), (180.0, 50.0), (220.0, 200.0), (60.0, 180.0)], UNIT_UV).expect("parallelogram");
    let para_rows = rows_of(&para, 256, 256);
    let (_, c) = counted_scope("affine", || {
        for &(y, a, b) in &para_rows {
            row_uv_specialized::<Counted>(&para.map, y, a, b, MapClass::Affine).expect("class matches");
        }
    });
    rows.push(ClaimRow::new(10, "affine", "parallelogram", "divisions").equals(c.divisions as f64, 0.0).with_ops(c));
    // one NRL pixel
    let tp = random_perspective_triangle(&mut rng, 200.0);
    let fam = nrl_setup::<f64>(&tp.map, NrlRounding::HalfUp).expect("h != 0");
    let lines = nrl_triangle::<f64>(&tp.map, &tp.tris[0], FillRule::TopLeft, NrlRounding::HalfUp).expect("perspective triangle");
    let line = &lines[lines.len() / 2];
    let mut st = nrl_line_state::<Counted>(&tp.map, &fam, line.y0).expect("line in front");
    let x = line.pixels[line.pixels.len() / 2].x;
    let (_, c) = counted_scope("nrl_pixel", || nrl_uv(&tp.map, &mut st, x));
    rows.push(ClaimRow::new(10, "nrl", "pixel", "multiplications").equals(c.multiplications as f64, 8.0).with_ops(c));
    rows.push(ClaimRow::new(10, "nrl", "pixel", "additions").equals(c.additions as f64, 7.0).with_ops(c));
    rows.push(ClaimRow::new(10, "nrl", "pixel", "divisions").equals(c.divisions as f64, 0.0).with_ops(c));
    rows
}

// -- 11 --------------------------------------------------------------------

fn special_cases(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 11);
    let mut rows = Vec::new();
    for horizontal in [true, false] {
        let (mut coef, mut drift, mut classified) = (0.0f64, 0.0f64, 0usize);
        for _ in 0..100 {
            let q = random_axis_parallel_quad(&mut rng, horizontal);
            // the vertical case is the transpose of the horizontal one, uv included
            let uv = if horizontal { UNIT_UV } else { UNIT_UV.map(|(u, v)| (v, u)) };
            let m = derive_from_quad(q, uv).expect("non-degenerate quad");
            let s = m.scale();
            let (p1, p2) = if horizontal { (m.d, m.g) } else { (m.b, m.h) };
            coef = coef.max(p1.abs().max(p2.abs()) / s);
            let want = if horizontal { MapClass::RowConstantV } else { MapClass::ColConstantU };
            if classify_map(&m, 1e-9) == want {
                classified += 1;
            }
            // along each row (column) inside the quad the fixed coordinate must not move
            let poly = TexPoly::from_quad(q, uv).expect("non-degenerate quad");
            let lines = if horizontal {
                rows_of(&poly, 512, 512)
            } else {
                let tp = TexPoly {
                    tris: poly.tris.iter().map(|t| ScreenTriangle::from_xy(t.xy().map(|(x, y)| (y, x)))).collect(),
                    map: poly.map.transposed(),
                };
                rows_of(&tp, 512, 512)
            };
            for (l, a, b) in lines {
                let at = |k: i64| {
                    let (x, y) = if horizontal { (k as f64, l as f64) } else { (l as f64, k as f64) };
                    let (u, v) = m.uv(x, y).expect("inside quad");
                    if horizontal { v } else { u }
                };
                let first = at(a);
                for k in a..=b {
                    drift = drift.max((at(k) - first).abs());
                }
            }
        }
        let (name, which) = if horizontal { ("row_constant_v", "d_g") } else { ("col_constant_u", "b_h") };
        rows.push(ClaimRow::new(11, name, "quads100", &format!("max_{which}_over_scale")).at_most(coef, 1e-9));
        rows.push(ClaimRow::new(11, name, "quads100", "max_fixed_coord_drift").at_most(drift, 1e-12));
        rows.push(ClaimRow::new(11, name, "quads100", "classified").equals(classified as f64, 100.0));
    }
    rows
}

// -- 12, 13 ----------------------------------------------------------------

fn nrl_scenes(seed: u64) -> Vec<TexPoly> {
    let mut rng = rng_for(seed, 12);
    (0..50).map(|_| random_perspective_triangle(&mut rng, 200.0)).collect()
}

fn nrl_geometry(seed: u64) -> Vec<ClaimRow> {
    let (mut worst, mut mismatched, mut dup) = (0.0f64, 0usize, 0usize);
    for tp in nrl_scenes(seed) {
        let m = tp.map;
        let t = tp.tris[0];
        let fam = nrl_setup::<f64>(&m, NrlRounding::HalfUp).expect("h != 0");
        let lines = nrl_triangle::<f64>(&m, &t, FillRule::TopLeft, NrlRounding::HalfUp).expect("perspective triangle");
        let mut seen = HashSet::new();
        for l in &lines {
            let d0 = m.denom(0.0, l.y0 as f64);
            for p in &l.pixels {
                let (x, y) = (p.x as f64, l.y0 as f64 + fam.dy * p.x as f64);
                let mag = (m.g * x).abs() + (m.h * y).abs() + m.i.abs();
                worst = worst.max((m.denom(x, y) - d0).abs() / mag);
                if !seen.insert((p.x, p.y)) {
                    dup += 1;
                }
            }
        }
        let want: HashSet<(i64, i64)> = covered_pixels(&scanline_triangle(&t, FillRule::TopLeft).expect("valid"))
            .into_iter()
            .collect();
        mismatched += seen.symmetric_difference(&want).count();
    }
    vec![
        ClaimRow::new(12, "nrl", "tris50", "ideal_denominator_rel_spread").at_most(worst, 1e-12),
        ClaimRow::new(12, "nrl", "tris50", "coverage_mismatch").equals(mismatched as f64, 0.0),
        ClaimRow::new(12, "nrl", "tris50", "duplicate_pixels").equals(dup as f64, 0.0),
    ]
}

/// Floating slack on the second-order bound; at r = 0 both sides are
/// rounding noise.
pub const NRL_BOUND_SLACK: f64 = 64.0 * f64::EPSILON;

fn nrl_correction(seed: u64) -> Vec<ClaimRow> {
    let (mut bad, mut bad_strict, mut total) = (0usize, 0usize, 0usize);
    let mut worst_ratio = 0.0f64;
    for tp in nrl_scenes(seed) {
        let m = tp.map;
        let lines = nrl_triangle::<f64>(&m, &tp.tris[0], FillRule::TopLeft, NrlRounding::HalfUp).expect("perspective triangle");
        for l in lines {
            let k = 1.0 / m.denom(0.0, l.y0 as f64);
            for p in &l.pixels {
                let err = (p.kor * m.denom(p.x as f64, p.y as f64) - 1.0).abs();
                let rhk = p.r * m.h * k;
                let bound = 2.0 * rhk * rhk;
                total += 1;
                if err > bound + NRL_BOUND_SLACK {
                    bad += 1;
                }
                if err > bound {
                    bad_strict += 1;
                }
                if rhk != 0.0 {
                    worst_ratio = worst_ratio.max(err / (rhk * rhk));
                }
            }
        }
    }
    vec![
        ClaimRow::new(13, "nrl", "tris50", "pixels_over_bound").equals(bad as f64, 0.0),
        ClaimRow::new(13, "nrl", "tris50", "pixels_over_bound_no_slack").equals(bad_strict as f64, 0.0).info(),
        ClaimRow::new(13, "nrl", "tris50", "max_err_over_rhk_sq").at_most(worst_ratio, 2.0).info(),
        ClaimRow::new(13, "nrl", "tris50", "pixels").check(total as f64, f64::NAN, true).info(),
    ]
}

// -- 14 --------------------------------------------------------------------

/// Cells of the window from the closed-form digital line, independent of
/// the stepper: P_j = (j, round(j L / M)) in the base vector's octant.
fn window_closed_form(origin: (i64, i64), base: (i64, i64), n: usize) -> HashSet<(i64, i64)> {
    let (ax, ay) = (base.0.abs(), base.1.abs());
    let (major, minor) = (ax.max(ay), ax.min(ay));
    let p = |j: i64| {
        let q = (2 * j * minor + major).div_euclid(2 * major);
        let (a, b) = if ax >= ay { (j, q) } else { (q, j) };
        (base.0.signum() * a, base.1.signum() * b)
    };
    let mut out = HashSet::new();
    for i in 0..n as i64 {
        let pi = p(i);
        let q = (-pi.1, pi.0);
        for j in 0..major {
            let pj = p(j);
            out.insert((origin.0 + q.0 + pj.0, origin.1 + q.1 + pj.1));
        }
    }
    out
}

fn serpentine(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 14);
    let (mut mismatch, mut dup, mut jumps) = (0usize, 0usize, 0usize);
    for _ in 0..200 {
        let base = loop {
            let b = (rng.random_range(-32i64..=32), rng.random_range(-32i64..=32));
            if b != (0, 0) {
                break b;
            }
        };
        let n = rng.random_range(1..=48usize);
        let origin = (rng.random_range(-50..50), rng.random_range(-50..50));
        let v = serpentine_window(origin, base, n).expect("nonzero base");
        let set: HashSet<_> = v.iter().copied().collect();
        dup += v.len() - set.len();
        mismatch += set.symmetric_difference(&window_closed_form(origin, base, n)).count();
        jumps += v.windows(2).filter(|w| (w[1].0 - w[0].0).abs() > 1 || (w[1].1 - w[0].1).abs() > 1).count();
    }
    vec![
        ClaimRow::new(14, "serpentine", "windows200", "set_mismatch").equals(mismatch as f64, 0.0),
        ClaimRow::new(14, "serpentine", "windows200", "repeated_cells").equals(dup as f64, 0.0),
        ClaimRow::new(14, "serpentine", "windows200", "non_adjacent_moves").equals(jumps as f64, 0.0),
    ]
}

// -- 15 --------------------------------------------------------------------

fn footprint(seed: u64) -> Vec<ClaimRow> {
    let mut rng = rng_for(seed, 15);
    let step = 1e-3;
    let mut jac = 0.0f64;
    let mut spread = 0.0f64;
    for _ in 0..50 {
        let m = random_raster_map(&mut rng, 256.0, 256.0, 120.0);
        for _ in 0..20 {
            let (x, y) = (rng.random_range(0.0..256.0), rng.random_range(0.0..256.0));
            let j = jacobian(&m, x, y).expect("in front");
            let c = |dx: f64, dy: f64| m.uv(x + dx, y + dy).expect("in front");
            let (xp, xm, yp, ym) = (c(step, 0.0), c(-step, 0.0), c(0.0, step), c(0.0, -step));
            let fd = [
                [(xp.0 - xm.0) / (2.0 * step), (xp.1 - xm.1) / (2.0 * step)],
                [(yp.0 - ym.0) / (2.0 * step), (yp.1 - ym.1) / (2.0 * step)],
            ];
            let scale = j.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
            for r in 0..2 {
                for k in 0..2 {
                    jac = jac.max((fd[r][k] - j[r][k]).abs() / scale);
                }
            }
        }
        // side along one constant-depth line, from exact differences
        if m.h.abs() > 1e-12 * m.scale() {
            let k = -m.g / m.h;
            let c = rng.random_range(40.0..200.0);
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for s in 0..100 {
                let x = s as f64 * 2.0;
                let Ok(a) = m.uv(x, k * x + c) else { continue };
                let Ok(b) = m.uv(x + 1.0, k * (x + 1.0) + c) else { continue };
                for (i, d) in [b.0 - a.0, b.1 - a.1].into_iter().enumerate() {
                    lo[i] = lo[i].min(d);
                    hi[i] = hi[i].max(d);
                }
            }
            spread = spread.max((hi[0] - lo[0]).max(hi[1] - lo[1]));
        }
    }
    vec![
        ClaimRow::new(15, "jacobian", "maps50", "max_rel_vs_central_diff").at_most(jac, 1e-6),
        ClaimRow::new(15, "constz_step", "maps50", "max_spread_along_line").at_most(spread, 1e-9),
    ]
}
