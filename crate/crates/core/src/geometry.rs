//! Perspective projection and the world/screen correspondence.
//!
//! Depths are positive distances in front of the observer. Normalized
//! coordinates use the usual [-1, 1] cube with the near plane at -1; the
//! viewport maps that cube onto `[x_vn, x_vm] x [y_vn, y_vm] x [z_vn, z_vm]`
//! and then adds the `sm_*` offsets.

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frustum {
    pub x_n: f64,
    pub x_m: f64,
    pub y_n: f64,
    pub y_m: f64,
    pub z_n: f64,
    pub z_m: f64,
}

impl Frustum {
    pub fn new(x_n: f64, x_m: f64, y_n: f64, y_m: f64, z_n: f64, z_m: f64) -> Result<Self> {
        let f = Frustum {
            x_n,
            x_m,
            y_n,
            y_m,
            z_n,
            z_m,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn symmetric(half_w: f64, half_h: f64, z_n: f64, z_m: f64) -> Result<Self> {
        Self::new(-half_w, half_w, -half_h, half_h, z_n, z_m)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.x_n < self.x_m && self.y_n < self.y_m && 0.0 < self.z_n && self.z_n < self.z_m;
        if ok && [self.x_n, self.x_m, self.y_n, self.y_m, self.z_m].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidFrustum)
        }
    }

    pub fn s_z(&self) -> f64 {
        (self.z_m + self.z_n) / (self.z_m - self.z_n)
    }

    pub fn t_z(&self) -> f64 {
        2.0 * self.z_m * self.z_n / (self.z_m - self.z_n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x_vn: f64,
    pub x_vm: f64,
    pub y_vn: f64,
    pub y_vm: f64,
    pub z_vn: f64,
    pub z_vm: f64,
    pub sm_vx: f64,
    pub sm_vy: f64,
    pub sm_vz: f64,
}

impl Viewport {
    /// Pixel window `[0, w] x [0, h]` with depth range `[0, 1]`.
    pub fn window(w: f64, h: f64) -> Self {
        Viewport {
            x_vn: 0.0,
            x_vm: w,
            y_vn: 0.0,
            y_vm: h,
            z_vn: 0.0,
            z_vm: 1.0,
            sm_vx: 0.0,
            sm_vy: 0.0,
            sm_vz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_vm == self.x_vn || self.y_vm == self.y_vn || self.z_vm == self.z_vn {
            return Err(Error::DegenerateViewport);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl WorldPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        WorldPoint { x, y, z }
    }

    pub fn vec(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }
}

impl ScreenPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        ScreenPoint { x, y, z }
    }
}

/// Normalized device coordinates of a world point.
pub fn normalize(p: WorldPoint, f: &Frustum) -> Result<WorldPoint> {
    if p.z <= 0.0 {
        return Err(Error::PointBehindCamera(p.z));
    }
    let wx = f.x_m - f.x_n;
    let wy = f.y_m - f.y_n;
    Ok(WorldPoint {
        x: 2.0 * f.z_n * p.x / (wx * p.z) - (f.x_m + f.x_n) / wx,
        y: 2.0 * f.z_n * p.y / (wy * p.z) - (f.y_m + f.y_n) / wy,
        z: f.s_z() - f.t_z() / p.z,
    })
}

/// Projects without the volume check; only the sign of z is enforced.
pub fn project_unchecked(p: WorldPoint, f: &Frustum, v: &Viewport) -> Result<ScreenPoint> {
    let n = normalize(p, f)?;
    Ok(ScreenPoint {
        x: v.x_vn + (n.x + 1.0) * (v.x_vm - v.x_vn) / 2.0 + v.sm_vx,
        y: v.y_vn + (n.y + 1.0) * (v.y_vm - v.y_vn) / 2.0 + v.sm_vy,
        z: v.z_vn + (n.z + 1.0) * (v.z_vm - v.z_vn) / 2.0 + v.sm_vz,
    })
}

pub fn project(p: WorldPoint, f: &Frustum, v: &Viewport) -> Result<ScreenPoint> {
    if p.z <= 0.0 {
        return Err(Error::PointBehindCamera(p.z));
    }
    let s = project_unchecked(p, f, v)?;
    let rel = 1e-12 * f.z_m;
    if p.z < f.z_n - rel || p.z > f.z_m + rel {
        return Err(Error::OutsideVolume);
    }
    let n = normalize(p, f)?;
    if n.x.abs() > 1.0 + 1e-12 || n.y.abs() > 1.0 + 1e-12 {
        return Err(Error::OutsideVolume);
    }
    Ok(s)
}

pub fn unproject(s: ScreenPoint, f: &Frustum, v: &Viewport) -> Result<WorldPoint> {
    v.validate()?;
    let nx = 2.0 * (s.x - v.sm_vx - v.x_vn) / (v.x_vm - v.x_vn) - 1.0;
    let ny = 2.0 * (s.y - v.sm_vy - v.y_vn) / (v.y_vm - v.y_vn) - 1.0;
    let nz = 2.0 * (s.z - v.sm_vz - v.z_vn) / (v.z_vm - v.z_vn) - 1.0;
    let z = f.t_z() / (f.s_z() - nz);
    let wx = f.x_m - f.x_n;
    let wy = f.y_m - f.y_n;
    Ok(WorldPoint {
        x: (nx + (f.x_m + f.x_n) / wx) * wx * z / (2.0 * f.z_n),
        y: (ny + (f.y_m + f.y_n) / wy) * wy * z / (2.0 * f.z_n),
        z,
    })
}

/// Screen position as an affine function of X/Z and Y/Z:
/// `x_v = sx * X/Z + ox`, `y_v = sy * Y/Z + oy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pinhole {
    pub sx: f64,
    pub ox: f64,
    pub sy: f64,
    pub oy: f64,
}

impl Pinhole {
    pub fn new(f: &Frustum, v: &Viewport) -> Self {
        let wx = f.x_m - f.x_n;
        let wy = f.y_m - f.y_n;
        Pinhole {
            sx: (v.x_vm - v.x_vn) * f.z_n / wx,
            ox: v.x_vn + v.sm_vx - (v.x_vm - v.x_vn) * f.x_n / wx,
            sy: (v.y_vm - v.y_vn) * f.z_n / wy,
            oy: v.y_vn + v.sm_vy - (v.y_vm - v.y_vn) * f.y_n / wy,
        }
    }
}

/// Screen vertex carrying the world depth and the attributes the shading
/// and texturing code interpolates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenVertex {
    pub x: f64,
    pub y: f64,
    /// world depth (positive distance), not the viewport depth
    pub depth: f64,
    pub color: [f64; 3],
    pub normal: Vec3,
    pub uv: [f64; 2],
}

impl ScreenVertex {
    pub fn at(x: f64, y: f64) -> Self {
        ScreenVertex {
            x,
            y,
            depth: 1.0,
            color: [1.0; 3],
            normal: Vec3::new(0.0, 0.0, 1.0),
            uv: [0.0, 0.0],
        }
    }

    pub fn xy(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenTriangle {
    pub v: [ScreenVertex; 3],
}

impl ScreenTriangle {
    pub fn from_xy(p: [(f64, f64); 3]) -> Self {
        ScreenTriangle {
            v: p.map(|(x, y)| ScreenVertex::at(x, y)),
        }
    }

    pub fn xy(&self) -> [(f64, f64); 3] {
        self.v.map(|v| v.xy())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenQuad {
    pub v: [ScreenVertex; 4],
}

impl ScreenQuad {
    pub fn xy(&self) -> [(f64, f64); 4] {
        self.v.map(|v| v.xy())
    }

    /// Fan split along the 0-2 diagonal.
    pub fn triangles(&self) -> [ScreenTriangle; 2] {
        [
            ScreenTriangle {
                v: [self.v[0], self.v[1], self.v[2]],
            },
            ScreenTriangle {
                v: [self.v[0], self.v[2], self.v[3]],
            },
        ]
    }
}
