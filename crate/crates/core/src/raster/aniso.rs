//! Pixel footprint in texture space and a parallelogram box filter.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::texmap::ProjectiveTexMap;

/// Texture-space sides of a pixel: `p2` follows +x, `p1` follows +y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisoFootprint {
    pub p1: [f64; 2],
    pub p2: [f64; 2],
}

impl AnisoFootprint {
    pub fn area(&self) -> f64 {
        (self.p1[0] * self.p2[1] - self.p1[1] * self.p2[0]).abs()
    }
}

/// Forward differences to the right and lower neighbours.
pub fn aniso_footprint(m: &ProjectiveTexMap, x: f64, y: f64) -> Result<AnisoFootprint> {
    let c = m.uv(x, y)?;
    let r = m.uv(x + 1.0, y)?;
    let d = m.uv(x, y + 1.0)?;
    Ok(AnisoFootprint {
        p1: [d.0 - c.0, d.1 - c.1],
        p2: [r.0 - c.0, r.1 - c.1],
    })
}

/// `[[du/dx, dv/dx], [du/dy, dv/dy]]` in closed form.
pub fn jacobian(m: &ProjectiveTexMap, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
    let w = m.denom(x, y);
    if !(w > 0.0) {
        return Err(Error::BehindProjection { x, y });
    }
    let nu = m.a * x + m.b * y + m.c;
    let nv = m.d * x + m.e * y + m.f;
    let w2 = w * w;
    Ok([
        [(m.a * w - m.g * nu) / w2, (m.d * w - m.g * nv) / w2],
        [(m.b * w - m.h * nu) / w2, (m.e * w - m.h * nv) / w2],
    ])
}

/// Footprint side along the constant-depth line `y = k x + c` of a map
/// with `g + h k = 0`: `(a + b k, d + e k) / (h c + i)`, the same at every
/// point of the line.
pub fn constz_step(m: &ProjectiveTexMap, k: f64, c: f64) -> Result<[f64; 2]> {
    let w = m.h * c + m.i;
    if !(w > 0.0) {
        return Err(Error::BehindProjection { x: 0.0, y: c });
    }
    let r = 1.0 / w;
    Ok([r * (m.a + m.b * k), r * (m.d + m.e * k)])
}

/// Mean of `n x n` nearest-texel samples over `center ± p1/2 ± p2/2`.
pub fn aniso_sample(tex: &Image, fp: &AnisoFootprint, center: (f64, f64), n: usize) -> [f64; 3] {
    let n = n.max(1);
    let mut acc = [0.0; 3];
    for s in 0..n {
        let a = (s as f64 + 0.5) / n as f64 - 0.5;
        for t in 0..n {
            let b = (t as f64 + 0.5) / n as f64 - 0.5;
            let u = center.0 + a * fp.p1[0] + b * fp.p2[0];
            let v = center.1 + a * fp.p1[1] + b * fp.p2[1];
            let c = tex.texel(u, v);
            for k in 0..3 {
                acc[k] += c[k] as f64;
            }
        }
    }
    acc.map(|c| c / (n * n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map(rng: &mut ChaCha8Rng) -> ProjectiveTexMap {
        let mut k: [f64; 9] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        k[0] = k[0].abs() + 0.5;
        k[4] = k[4].abs() + 0.5;
        for c in &mut k[..6] {
            *c *= 0.01;
        }
        k[6] *= 0.002;
        k[7] *= 0.002;
        k[8] = 1.0;
        ProjectiveTexMap::from_coeffs(k)
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let step = 1e-3;
        for _ in 0..50 {
            let m = random_map(&mut rng);
            for _ in 0..20 {
                let (x, y) = (rng.random_range(0.0..256.0), rng.random_range(0.0..256.0));
                let j = jacobian(&m, x, y).unwrap();
                let fx0 = m.uv(x - step, y).unwrap();
                let fx1 = m.uv(x + step, y).unwrap();
                let fy0 = m.uv(x, y - step).unwrap();
                let fy1 = m.uv(x, y + step).unwrap();
                let fd = [
                    [(fx1.0 - fx0.0) / (2.0 * step), (fx1.1 - fx0.1) / (2.0 * step)],
                    [(fy1.0 - fy0.0) / (2.0 * step), (fy1.1 - fy0.1) / (2.0 * step)],
                ];
                let scale = j.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((fd[r][c] - j[r][c]).abs() <= 1e-6 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn affine_footprint_is_constant() {
        let m = ProjectiveTexMap::from_coeffs([0.01, 0.003, 0.1, -0.002, 0.02, 0.0, 0.0, 0.0, 1.0]);
        let f0 = aniso_footprint(&m, 0.0, 0.0).unwrap();
        for (x, y) in [(50.0, 7.0), (200.0, 100.0), (13.0, 250.0)] {
            let f = aniso_footprint(&m, x, y).unwrap();
            for k in 0..2 {
                assert!((f.p1[k] - f0.p1[k]).abs() < 1e-15 && (f.p2[k] - f0.p2[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn step_constant_along_constant_depth_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..20 {
            let m = random_map(&mut rng);
            let k = -m.g / m.h;
            let h = rng.random_range(0.0..200.0);
            let closed = constz_step(&m, k, h).unwrap();
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for s in 0..100 {
                let x = s as f64 * 2.5;
                let a = m.uv(x, k * x + h).unwrap();
                let b = m.uv(x + 1.0, k * (x + 1.0) + h).unwrap();
                for (c, d) in [b.0 - a.0, b.1 - a.1].into_iter().enumerate() {
                    lo[c] = lo[c].min(d);
                    hi[c] = hi[c].max(d);
                    assert!((d - closed[c]).abs() <= 1e-9);
                }
            }
            assert!(hi[0] - lo[0] <= 1e-9 && hi[1] - lo[1] <= 1e-9);
        }
    }

    #[test]
    fn constant_texture() {
        let tex = Image::from_fn(8, 8, |_, _| [10, 20, 30]);
        let fp = AnisoFootprint {
            p1: [0.3, 0.1],
            p2: [-0.2, 0.6],
        };
        assert_eq!(aniso_sample(&tex, &fp, (0.5, 0.5), 4), [10.0, 20.0, 30.0]);
    }

    #[test]
    fn zero_footprint_is_nearest() {
        let tex = Image::checker(8, 8, 1, [255; 3], [0; 3]);
        let fp = AnisoFootprint {
            p1: [0.0; 2],
            p2: [0.0; 2],
        };
        for (u, v) in [(0.01, 0.01), (0.13, 0.01), (0.7, 0.9)] {
            let want = tex.texel(u, v).map(|c| c as f64);
            assert_eq!(aniso_sample(&tex, &fp, (u, v), 4), want);
        }
    }

    #[test]
    fn wide_footprint_on_checker() {
        let tex = Image::checker(64, 64, 4, [255; 3], [0; 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let n = 4;
        for _ in 0..50 {
            // axis-aligned, starting on a cell corner, 1, 2 or 4 cells wide
            let cells = |r: &mut ChaCha8Rng| [1.0, 2.0, 4.0][r.random_range(0..3)] * 4.0 / 64.0;
            let fp = AnisoFootprint {
                p1: [0.0, cells(&mut rng)],
                p2: [cells(&mut rng), 0.0],
            };
            let corner = |r: &mut ChaCha8Rng| r.random_range(2..10) as f64 * 4.0 / 64.0;
            let c = (corner(&mut rng) + fp.p2[0] / 2.0, corner(&mut rng) + fp.p1[1] / 2.0);
            let got = aniso_sample(&tex, &fp, c, n)[0] / 255.0;
            // dense supersampling of the same parallelogram
            let dense = aniso_sample(&tex, &fp, c, 256)[0] / 255.0;
            assert!((got - dense).abs() <= 1.0 / (n * n) as f64 + 1e-12, "{got} {dense}");
        }
    }
}
