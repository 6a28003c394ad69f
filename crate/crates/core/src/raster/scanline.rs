//! Horizontal spans of a screen triangle with pixel centres on integer
//! coordinates.

use crate::error::{Error, Result};
use crate::geometry::ScreenTriangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillRule {
    /// Boundary pixels belong to top and left edges only.
    #[default]
    TopLeft,
    /// Boundary pixels always count.
    Closed,
}

/// Where a span end meets the triangle outline: edge k runs from vertex k
/// to vertex k+1, `t` is the screen-space fraction along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeHit {
    pub edge: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub y: i64,
    pub x_start: i64,
    pub x_end: i64,
    pub left: EdgeHit,
    pub right: EdgeHit,
}

impl Span {
    pub fn len(&self) -> usize {
        (self.x_end - self.x_start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.x_end < self.x_start
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    a: (f64, f64),
    b: (f64, f64),
    // +1 when (a, b) is the stored orientation, -1 when reversed for evaluation
    sign: f64,
    top_left: bool,
}

impl Edge {
    fn new(p: (f64, f64), q: (f64, f64)) -> Self {
        // evaluate in a fixed endpoint order so a shared edge gives the
        // exact negated value in both triangles
        let (a, b, sign) = if p <= q { (p, q, 1.0) } else { (q, p, -1.0) };
        let d = (q.0 - p.0, q.1 - p.1);
        Edge {
            a,
            b,
            sign,
            top_left: d.1 < 0.0 || (d.1 == 0.0 && d.0 > 0.0),
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        let e = (self.b.0 - self.a.0) * (y - self.a.1) - (self.b.1 - self.a.1) * (x - self.a.0);
        self.sign * e
    }
}

/// Inside test for one triangle, built once.
#[derive(Debug, Clone, Copy)]
pub struct Coverage {
    edges: [Edge; 3],
    rule: FillRule,
    /// vertices in positive orientation
    pub xy: [(f64, f64); 3],
}

impl Coverage {
    pub fn new(t: &ScreenTriangle, rule: FillRule) -> Result<Self> {
        let mut p = t.xy();
        let area = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[1].1 - p[0].1) * (p[2].0 - p[0].0);
        if area == 0.0 || !area.is_finite() {
            return Err(Error::DegenerateTriangle);
        }
        if area < 0.0 {
            p.swap(1, 2);
        }
        Ok(Coverage {
            edges: [Edge::new(p[0], p[1]), Edge::new(p[1], p[2]), Edge::new(p[2], p[0])],
            rule,
            xy: p,
        })
    }

    pub fn inside(&self, x: f64, y: f64) -> bool {
        self.edges.iter().all(|e| {
            let v = e.eval(x, y);
            v > 0.0
                || (v == 0.0
                    && match self.rule {
                        FillRule::Closed => true,
                        FillRule::TopLeft => e.top_left,
                    })
        })
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let xs = self.xy.map(|p| p.0);
        let ys = self.xy.map(|p| p.1);
        (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

fn row_hits(xy: [(f64, f64); 3], y: f64) -> Option<(f64, EdgeHit, f64, EdgeHit)> {
    let mut lo: Option<(f64, EdgeHit)> = None;
    let mut hi: Option<(f64, EdgeHit)> = None;
    for k in 0..3 {
        let (a, b) = (xy[k], xy[(k + 1) % 3]);
        let (ya, yb) = (a.1.min(b.1), a.1.max(b.1));
        if y < ya || y > yb {
            continue;
        }
        let (x, t) = if a.1 == b.1 {
            // horizontal edge on this row: both ends count
            for (x, t) in [(a.0, 0.0), (b.0, 1.0)] {
                let h = EdgeHit { edge: k, t };
                if lo.is_none_or(|l| x < l.0) {
                    lo = Some((x, h));
                }
                if hi.is_none_or(|r| x > r.0) {
                    hi = Some((x, h));
                }
            }
            continue;
        } else {
            let t = (y - a.1) / (b.1 - a.1);
            (a.0 + t * (b.0 - a.0), t)
        };
        let h = EdgeHit { edge: k, t };
        if lo.is_none_or(|l| x < l.0) {
            lo = Some((x, h));
        }
        if hi.is_none_or(|r| x > r.0) {
            hi = Some((x, h));
        }
    }
    match (lo, hi) {
        (Some(l), Some(r)) => Some((l.0, l.1, r.0, r.1)),
        _ => None,
    }
}

/// Spans top to bottom. Edge indices refer to the triangle's own vertex order.
pub fn scanline_triangle(t: &ScreenTriangle, rule: FillRule) -> Result<Vec<Span>> {
    let cov = Coverage::new(t, rule)?;
    let xy = t.xy();
    let (_, y0, _, y1) = cov.bbox();
    let mut out = Vec::new();
    for y in (y0.ceil() as i64)..=(y1.floor() as i64) {
        let yf = y as f64;
        let Some((xl, left, xr, right)) = row_hits(xy, yf) else {
            continue;
        };
        let mut xs = xl.ceil() as i64 - 1;
        let xmax = xr.floor() as i64 + 1;
        while xs <= xmax && !cov.inside(xs as f64, yf) {
            xs += 1;
        }
        if xs > xmax {
            continue;
        }
        let mut xe = xmax;
        while !cov.inside(xe as f64, yf) {
            xe -= 1;
        }
        out.push(Span {
            y,
            x_start: xs,
            x_end: xe,
            left,
            right,
        });
    }
    Ok(out)
}

pub fn covered_pixels(spans: &[Span]) -> Vec<(i64, i64)> {
    spans
        .iter()
        .flat_map(|s| (s.x_start..=s.x_end).map(move |x| (x, s.y)))
        .collect()
}
