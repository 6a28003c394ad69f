//! Bivariate polynomial fits of a texture coordinate over a polygon.

use nalgebra::{DMatrix, DVector};

use super::ProjectiveTexMap;
use crate::analysis::counter::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BivariateDegree {
    /// x^2, y^2, xy, x, y, 1
    Biquadratic,
    /// x^3, y^3, x^2 y, x y^2, x^2, y^2, xy, x, y, 1
    Bicubic,
}

impl BivariateDegree {
    pub fn n_coeffs(self) -> usize {
        match self {
            BivariateDegree::Biquadratic => 6,
            BivariateDegree::Bicubic => 10,
        }
    }

    fn monomials(self, x: f64, y: f64) -> Vec<f64> {
        match self {
            BivariateDegree::Biquadratic => vec![x * x, y * y, x * y, x, y, 1.0],
            BivariateDegree::Bicubic => vec![
                x * x * x,
                y * y * y,
                x * x * y,
                x * y * y,
                x * x,
                y * y,
                x * y,
                x,
                y,
                1.0,
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    pub degree: BivariateDegree,
    pub coeffs: Vec<f64>,
    pub points: Vec<(f64, f64)>,
}

/// Smallest-to-largest singular value ratio under which a fit is refused.
pub const SINGULAR_RATIO: f64 = 1e-12;

pub fn fit_bivariate(points: &[(f64, f64, f64)], degree: BivariateDegree) -> Result<BivariatePoly> {
    let n = degree.n_coeffs();
    if points.len() != n {
        return Err(Error::SingularSystem);
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (r, &(x, y, _)) in points.iter().enumerate() {
        for (c, v) in degree.monomials(x, y).into_iter().enumerate() {
            a[(r, c)] = v;
        }
    }
    // equilibrate columns, x^3 and 1 differ by ~1e7 on a 256 raster
    let scale: Vec<f64> = (0..n)
        .map(|c| {
            let m = a.column(c).amax();
            if m == 0.0 { 1.0 } else { m }
        })
        .collect();
    for (c, &sc) in scale.iter().enumerate() {
        a.column_mut(c).unscale_mut(sc);
    }
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= SINGULAR_RATIO * sv.max() {
        return Err(Error::SingularSystem);
    }
    let rhs = DVector::from_iterator(n, points.iter().map(|p| p.2));
    let sol = svd.solve(&rhs, 0.0).map_err(|_| Error::SingularSystem)?;
    Ok(BivariatePoly {
        degree,
        coeffs: (0..n).map(|c| sol[c] / scale[c]).collect(),
        points: points.iter().map(|p| (p.0, p.1)).collect(),
    })
}

impl BivariatePoly {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_r(x, y)
    }

    /// Multiplies and adds only.
    pub fn eval_r<R: Real>(&self, x: f64, y: f64) -> R {
        let (x, y) = (R::lit(x), R::lit(y));
        let k = |i: usize| R::lit(self.coeffs[i]);
        match self.degree {
            // ((A1 x + A3 y + A4) x + (A2 y + A5) y) + A6
            BivariateDegree::Biquadratic => (k(0) * x + k(2) * y + k(3)) * x + (k(1) * y + k(4)) * y + k(5),
            BivariateDegree::Bicubic => {
                let xx = ((k(0) * x + k(2) * y + k(4)) * x + k(6) * y + k(7)) * x;
                let yy = ((k(1) * y + k(3) * x + k(5)) * y + k(8)) * y;
                xx + yy + k(9)
            }
        }
    }
}

/// Vertices and edge midpoints.
pub fn biquadratic_nodes(tri: [(f64, f64); 3]) -> Vec<(f64, f64)> {
    let mut out = tri.to_vec();
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        out.push((0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1)));
    }
    out
}

/// Vertices, edge thirds and the centroid.
pub fn bicubic_nodes(tri: [(f64, f64); 3]) -> Vec<(f64, f64)> {
    let mut out = tri.to_vec();
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        for s in [1.0 / 3.0, 2.0 / 3.0] {
            out.push((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
        }
    }
    out.push(((tri[0].0 + tri[1].0 + tri[2].0) / 3.0, (tri[0].1 + tri[1].1 + tri[2].1) / 3.0));
    out
}

/// u and v fits of a map over a triangle, nodes sampled exactly.
pub fn fit_map_over_triangle(
    m: &ProjectiveTexMap,
    tri: [(f64, f64); 3],
    degree: BivariateDegree,
) -> Result<(BivariatePoly, BivariatePoly)> {
    let nodes = match degree {
        BivariateDegree::Biquadratic => biquadratic_nodes(tri),
        BivariateDegree::Bicubic => bicubic_nodes(tri),
    };
    let mut pu = Vec::with_capacity(nodes.len());
    let mut pv = Vec::with_capacity(nodes.len());
    for &(x, y) in &nodes {
        let (u, v) = m.uv(x, y)?;
        pu.push((x, y, u));
        pv.push((x, y, v));
    }
    Ok((fit_bivariate(&pu, degree)?, fit_bivariate(&pv, degree)?))
}
