//! Textured screen polygons and the seeded generators the claims run on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{ScreenTriangle, ScreenVertex};
use crate::texmap::{ProjectiveTexMap, derive_from_quad};

/// Triangles sharing one screen-to-texture map.
#[derive(Debug, Clone, PartialEq)]
pub struct TexPoly {
    pub tris: Vec<ScreenTriangle>,
    pub map: ProjectiveTexMap,
}

impl TexPoly {
    /// Quad split along its 0-2 diagonal. Vertex depths are set to
    /// `1 / denominator`, i.e. world depth up to a common factor.
    pub fn from_quad(screen: [(f64, f64); 4], uv: [(f64, f64); 4]) -> Result<TexPoly> {
        let map = derive_from_quad(screen, uv)?;
        let vert = |k: usize| ScreenVertex {
            depth: 1.0 / map.denom(screen[k].0, screen[k].1),
            uv: [uv[k].0, uv[k].1],
            ..ScreenVertex::at(screen[k].0, screen[k].1)
        };
        let tris = vec![
            ScreenTriangle {
                v: [vert(0), vert(1), vert(2)],
            },
            ScreenTriangle {
                v: [vert(0), vert(2), vert(3)],
            },
        ];
        Ok(TexPoly { tris, map })
    }

    /// Perspective map from the vertex depths and uv.
    pub fn from_triangle(t: ScreenTriangle) -> Result<TexPoly> {
        let map = ProjectiveTexMap::from_triangle(t.xy(), t.v.map(|v| v.depth), t.v.map(|v| v.uv))?;
        Ok(TexPoly { tris: vec![t], map })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub polys: Vec<TexPoly>,
}

pub const UNIT_UV: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Quad receding in depth over a 256 x 256 raster.
pub fn tilted_quad_scene() -> Scene {
    let screen = [(40.0, 30.0), (216.0, 30.0), (250.0, 230.0), (6.0, 230.0)];
    Scene {
        id: "tilted_quad".into(),
        width: 256,
        height: 256,
        polys: vec![TexPoly::from_quad(screen, UNIT_UV).expect("fixed quad")],
    }
}

/// Corners of the polygon used for the anchor comparison.
pub const ANCHOR_POLY: [(f64, f64); 4] = [(1.0, 1.0), (32.0, 96.0), (96.0, 128.0), (128.0, 32.0)];
/// Texture corners of [`ANCHOR_POLY`]: u runs from 0 on the left edge to 1
/// on the right, so it is near 0 at the start of row 32.
pub const ANCHOR_UV: [(f64, f64); 4] = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
pub const ANCHOR_ROW: i64 = 32;

pub fn anchor_scene() -> Scene {
    Scene {
        id: "anchor_poly".into(),
        width: 160,
        height: 160,
        polys: vec![TexPoly::from_quad(ANCHOR_POLY, ANCHOR_UV).expect("fixed quad")],
    }
}

/// Map whose unit texture square lands on a quad enclosing the `w x h`
/// raster with corners pushed out by up to `spread` pixels, so the
/// denominator is positive over the whole raster.
pub fn random_raster_map(rng: &mut ChaCha8Rng, w: f64, h: f64, spread: f64) -> ProjectiveTexMap {
    loop {
        let mut j = || rng.random_range(2.0..spread);
        let screen = [(-j(), -j()), (w + j(), -j()), (w + j(), h + j()), (-j(), h + j())];
        if let Ok(m) = derive_from_quad(screen, UNIT_UV) {
            return m;
        }
    }
}

/// Screen triangle with random world depths in [1, 6] and unit-triangle uv.
pub fn random_perspective_triangle(rng: &mut ChaCha8Rng, size: f64) -> TexPoly {
    loop {
        let mut v: [ScreenVertex; 3] =
            std::array::from_fn(|_| ScreenVertex::at(rng.random_range(0.0..size), rng.random_range(0.0..size)));
        let uv = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        for k in 0..3 {
            v[k].depth = rng.random_range(1.0..6.0);
            v[k].uv = uv[k];
        }
        let t = ScreenTriangle { v };
        let p = t.xy();
        let area = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[1].1 - p[0].1) * (p[2].0 - p[0].0);
        if area.abs() < 20.0 {
            continue;
        }
        if let Ok(tp) = TexPoly::from_triangle(t)
            && tp.map.h.abs() > 1e-9 * tp.map.scale() {
                return tp;
            }
    }
}

/// Quad with two sides parallel to the x axis (`horizontal`) or the y axis.
pub fn random_axis_parallel_quad(rng: &mut ChaCha8Rng, horizontal: bool) -> [(f64, f64); 4] {
    let y0 = rng.random_range(0.0..80.0);
    let y1 = y0 + rng.random_range(40.0..160.0);
    let a = rng.random_range(0.0..60.0);
    let b = a + rng.random_range(60.0..180.0);
    let c = rng.random_range(0.0..60.0);
    let d = c + rng.random_range(60.0..180.0);
    // top edge a..b at y0, bottom edge c..d at y1
    let q = [(a, y0), (b, y0), (d, y1), (c, y1)];
    if horizontal { q } else { q.map(|(x, y)| (y, x)) }
}

/// Single-row map on y = 0 with depth ratio `hbar` between the ends of
/// `xs..=xe` and both coordinates running over [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowCase {
    pub map: ProjectiveTexMap,
    pub xs: i64,
    pub xe: i64,
    pub hbar: f64,
}

pub fn perspective_row(xs: i64, xe: i64, hbar: f64, u_rising: bool, far_end: bool) -> RowCase {
    let len = (xe - xs) as f64;
    // denominators 1/z at the ends: the far end has the larger depth
    let (ws, we) = if far_end { (hbar, 1.0) } else { (1.0, hbar) };
    let g = (we - ws) / len;
    let i = ws - g * xs as f64;
    // numerators u w: u goes 0 -> 1 or 1 -> 0
    let (us, ue) = if u_rising { (0.0, 1.0) } else { (1.0, 0.0) };
    let num = |s: f64, e: f64| {
        let k = (e * we - s * ws) / len;
        (k, s * ws - k * xs as f64)
    };
    let (a, c) = num(us, ue);
    let (d, f) = num(ue, us);
    RowCase {
        map: ProjectiveTexMap::from_coeffs([a, 0.0, c, d, 0.0, f, g, 0.0, i]),
        xs,
        xe,
        hbar,
    }
}

/// The 50 rows the curve-parameter methods are measured on: depth ratio
/// uniform in [1.2, 3], 64 to 256 pixels, random orientation.
pub fn bezier_row_suite(seed: u64) -> Vec<RowCase> {
    let mut rng = rng_for(seed, 8);
    (0..50)
        .map(|_| {
            let xs = rng.random_range(0..64);
            let xe = xs + rng.random_range(64..=256);
            let hbar = rng.random_range(1.2..=3.0);
            perspective_row(xs, xe, hbar, rng.random_bool(0.5), rng.random_bool(0.5))
        })
        .collect()
}
