//! Scene construction and the software renderer behind `render` and `bench`.

use std::path::Path;

use super::config::{PolyKind, SceneConfig, Shading};
use crate::analysis::compare::{Method, method_uv};
use crate::analysis::scenes::{Scene, TexPoly};
use crate::error::{Error, Result};
use crate::geometry::{ScreenTriangle, ScreenVertex, Vec3, Viewport, WorldPoint, project_unchecked};
use crate::image::Image;
use crate::raster::aniso::{aniso_footprint, aniso_sample};
use crate::texmap::{ProjectiveTexMap, derive_from_quad};

/// Pixel window with +y up in the world pointing up in the image.
pub fn viewport(cfg: &SceneConfig) -> Viewport {
    Viewport {
        y_vn: cfg.height as f64,
        y_vm: 0.0,
        ..Viewport::window(cfg.width as f64, cfg.height as f64)
    }
}

fn screen_vertex(cfg: &SceneConfig, vp: &Viewport, v: &super::config::VertexSpec) -> Result<ScreenVertex> {
    let [x, y, z] = v.pos;
    let s = project_unchecked(WorldPoint::new(x, y, z), &cfg.frustum, vp)?;
    Ok(ScreenVertex {
        depth: z,
        color: v.color,
        normal: Vec3::from(v.normal),
        uv: v.uv,
        ..ScreenVertex::at(s.x, s.y)
    })
}

/// Projected polygons with their screen-to-texture maps. `id` names the scene.
pub fn build_scene(cfg: &SceneConfig, id: &str) -> Result<Scene> {
    let vp = viewport(cfg);
    let mut polys = Vec::with_capacity(cfg.polys.len());
    for (k, p) in cfg.polys.iter().enumerate() {
        let ctx = |e: Error| Error::Polygon {
            index: k,
            source: Box::new(e),
        };
        let sv = p
            .verts
            .iter()
            .map(|v| screen_vertex(cfg, &vp, v))
            .collect::<Result<Vec<_>>>()
            .map_err(ctx)?;
        let poly = match p.kind {
            PolyKind::Triangle => {
                TexPoly::from_triangle(ScreenTriangle { v: [sv[0], sv[1], sv[2]] }).map_err(ctx)?
            }
            PolyKind::Quad => {
                let xy = [0, 1, 2, 3].map(|i| sv[i].xy());
                let uv = [0, 1, 2, 3].map(|i| (sv[i].uv[0], sv[i].uv[1]));
                TexPoly {
                    map: derive_from_quad(xy, uv).map_err(ctx)?,
                    tris: vec![
                        ScreenTriangle { v: [sv[0], sv[1], sv[2]] },
                        ScreenTriangle { v: [sv[0], sv[2], sv[3]] },
                    ],
                }
            }
        };
        polys.push(poly);
    }
    Ok(Scene {
        id: id.to_string(),
        width: cfg.width,
        height: cfg.height,
        polys,
    })
}

pub fn load_texture(cfg: &SceneConfig) -> Result<Image> {
    match &cfg.texture {
        Some(p) => Image::read_ppm(p),
        None => Ok(Image::checker(64, 64, 8, [230, 230, 230], [40, 40, 160])),
    }
}

/// Perspective-correct barycentric weights at `(x, y)` and the
/// interpolated depth.
fn weights(t: &ScreenTriangle, x: f64, y: f64) -> Option<([f64; 3], f64)> {
    let p = t.xy();
    let area = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[1].1 - p[0].1) * (p[2].0 - p[0].0);
    if area == 0.0 {
        return None;
    }
    let edge = |a: (f64, f64), b: (f64, f64)| ((b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0)) / area;
    let l = [edge(p[1], p[2]), edge(p[2], p[0]), edge(p[0], p[1])];
    let w = [0, 1, 2].map(|k| l[k] / t.v[k].depth);
    let s = w[0] + w[1] + w[2];
    if !(s > 0.0) {
        return None;
    }
    Some((w.map(|v| v / s), 1.0 / s))
}

fn to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Renders the configured scene with `method`, in f64.
pub fn render(cfg: &SceneConfig, scene: &Scene, tex: &Image, method: Method) -> Result<Image> {
    let (w, h) = (cfg.width, cfg.height);
    let params = cfg.method_params();
    let mut img = Image::from_fn(w, h, |_, _| cfg.background);
    let mut zbuf = vec![f64::INFINITY; w * h];
    for poly in &scene.polys {
        for t in &poly.tris {
            for s in method_uv::<f64>(poly, t, method, &params, w, h)? {
                let (xf, yf) = (s.x as f64, s.y as f64);
                let Some((wt, depth)) = weights(t, xf, yf) else { continue };
                let idx = s.y as usize * w + s.x as usize;
                if depth >= zbuf[idx] {
                    continue;
                }
                zbuf[idx] = depth;
                let rgb = match cfg.shading {
                    Shading::Normals => {
                        let n = (0..3).fold(Vec3::zeros(), |a, k| a + t.v[k].normal * wt[k]);
                        let n = if n.norm() > 0.0 { n.normalize() } else { n };
                        [n.x, n.y, n.z].map(|c| to_byte((c + 1.0) * 127.5))
                    }
                    _ => {
                        let texel = sample(tex, &poly.map, cfg.aniso, xf, yf, (s.u, s.v));
                        let tint = match cfg.shading {
                            Shading::Modulate => {
                                std::array::from_fn(|c| (0..3).map(|k| t.v[k].color[c] * wt[k]).sum::<f64>())
                            }
                            _ => [1.0; 3],
                        };
                        [0, 1, 2].map(|c| to_byte(texel[c] * tint[c]))
                    }
                };
                img.set(s.x as usize, s.y as usize, rgb);
            }
        }
    }
    Ok(img)
}

fn sample(tex: &Image, m: &ProjectiveTexMap, aniso: usize, x: f64, y: f64, uv: (f64, f64)) -> [f64; 3] {
    if aniso > 0
        && let Ok(fp) = aniso_footprint(m, x, y) {
            return aniso_sample(tex, &fp, uv, aniso);
        }
    tex.texel(uv.0, uv.1).map(f64::from)
}

/// `|a - b|` per channel, scaled by 4 so small differences show.
pub fn diff_image(a: &Image, b: &Image) -> Image {
    Image::from_fn(a.width, a.height, |x, y| {
        let (p, q) = (a.get(x, y), b.get(x, y));
        [0, 1, 2].map(|c| (p[c].abs_diff(q[c]) as u16 * 4).min(255) as u8)
    })
}

/// Scene id from a config path: its file stem.
pub fn scene_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scene".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{PolySpec, VertexSpec};

    /// World rectangle, optionally tilted in depth; x is offset so texel
    /// edges do not fall exactly on pixel centres.
    fn quad(z: [f64; 4]) -> SceneConfig {
        let pos = [[-0.47, -0.49], [0.53, -0.49], [0.53, 0.51], [-0.47, 0.51]];
        let uv = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        SceneConfig {
            width: 96,
            height: 96,
            polys: vec![PolySpec {
                kind: PolyKind::Quad,
                verts: (0..4)
                    .map(|k| VertexSpec {
                        pos: [pos[k][0], pos[k][1], z[k]],
                        uv: uv[k],
                        ..VertexSpec::default()
                    })
                    .collect(),
            }],
            ..SceneConfig::default()
        }
    }

    fn draw(cfg: &SceneConfig, m: Method) -> Image {
        let s = build_scene(cfg, "t").unwrap();
        render(cfg, &s, &load_texture(cfg).unwrap(), m).unwrap()
    }

    #[test]
    fn screen_parallel_affine_equals_exact() {
        let c = quad([2.0; 4]);
        let s = build_scene(&c, "t").unwrap();
        assert!(s.polys[0].map.g.abs() < 1e-12 && s.polys[0].map.h.abs() < 1e-12);
        assert_eq!(draw(&c, Method::Exact).diff_count(&draw(&c, Method::Affine)), 0);
    }

    #[test]
    fn tilted_affine_swims() {
        let c = quad([1.5, 1.5, 4.0, 4.0]);
        assert!(draw(&c, Method::Exact).diff_count(&draw(&c, Method::Affine)) > 0);
    }

    #[test]
    fn perspective_weights_reproduce_depth() {
        let c = quad([1.5, 1.5, 3.0, 3.0]);
        let s = build_scene(&c, "t").unwrap();
        let t = &s.polys[0].tris[0];
        for k in 0..3 {
            let (wt, z) = weights(t, t.v[k].x, t.v[k].y).unwrap();
            assert!((z - t.v[k].depth).abs() < 1e-9);
            assert!((wt[k] - 1.0).abs() < 1e-9);
        }
        // interpolated uv matches the map: the weights are perspective-correct
        let (x, y) = (40.0, 50.0);
        if let Some((wt, _)) = weights(t, x, y) {
            let u: f64 = (0..3).map(|k| wt[k] * t.v[k].uv[0]).sum();
            let (mu, _) = s.polys[0].map.uv(x, y).unwrap();
            assert!((u - mu).abs() < 1e-9);
        }
    }

    #[test]
    fn nearer_polygon_wins() {
        let mut c = quad([2.0; 4]);
        let mut far = quad([5.0; 4]).polys[0].clone();
        for v in &mut far.verts {
            v.color = [0.0; 3];
        }
        c.polys.insert(0, far);
        c.shading = Shading::Modulate;
        let img = draw(&c, Method::Exact);
        // centre pixel comes from the near (white-tinted) quad
        let centre = img.get(48, 48);
        assert_ne!(centre, [0, 0, 0]);
    }
}
