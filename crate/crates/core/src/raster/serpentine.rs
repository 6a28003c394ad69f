//! Boustrophedon walk over a rotated lattice window with one stepper.
//!
//! Each row is the digital line of the base vector. The steps of that line
//! are stored once; step `i`, turned a quarter turn, moves from row `i` to
//! row `i + 1`. Rows alternate direction.

use crate::error::{Error, Result};

fn rot(s: (i64, i64)) -> (i64, i64) {
    (-s.1, s.0)
}

/// The `M = max(|dx|, |dy|)` unit or diagonal steps of the base vector,
/// midpoint rounded. Integer adds and compares only.
pub fn line_steps(base: (i64, i64)) -> Result<Vec<(i64, i64)>> {
    if base == (0, 0) {
        return Err(Error::ZeroVector);
    }
    let (ax, ay) = (base.0.abs(), base.1.abs());
    let (sx, sy) = (base.0.signum(), base.1.signum());
    let (major, minor) = (ax.max(ay), ax.min(ay));
    let x_major = ax >= ay;
    let mut e = major;
    let mut out = Vec::with_capacity(major as usize);
    for _ in 0..major {
        e += 2 * minor;
        let side = if e >= 2 * major {
            e -= 2 * major;
            1
        } else {
            0
        };
        out.push(if x_major { (sx, sy * side) } else { (sx * side, sy) });
    }
    Ok(out)
}

/// Visit order of the `M x n_rows` window anchored at `origin`.
pub fn serpentine_window(origin: (i64, i64), base: (i64, i64), n_rows: usize) -> Result<Vec<(i64, i64)>> {
    let steps = line_steps(base)?;
    let m = steps.len();
    let mut out = Vec::with_capacity(m * n_rows);
    let mut p = origin;
    for row in 0..n_rows {
        out.push(p);
        if row % 2 == 0 {
            for s in &steps[..m - 1] {
                p = (p.0 + s.0, p.1 + s.1);
                out.push(p);
            }
        } else {
            for s in steps[..m - 1].iter().rev() {
                p = (p.0 - s.0, p.1 - s.1);
                out.push(p);
            }
        }
        if row + 1 < n_rows {
            // the row's own step pattern repeats with period M
            let t = rot(steps[row % m]);
            p = (p.0 + t.0, p.1 + t.1);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    // P_j from the closed form, extended past M by whole base vectors
    fn closed_point(base: (i64, i64), j: i64) -> (i64, i64) {
        let (ax, ay) = (base.0.abs(), base.1.abs());
        let (major, minor) = (ax.max(ay), ax.min(ay));
        let q = (2 * j * minor + major).div_euclid(2 * major);
        let (a, b) = if ax >= ay { (j, q) } else { (q, j) };
        (base.0.signum() * a, base.1.signum() * b)
    }

    fn closed_window(origin: (i64, i64), base: (i64, i64), n: usize) -> HashSet<(i64, i64)> {
        let m = base.0.abs().max(base.1.abs());
        let mut out = HashSet::new();
        for i in 0..n as i64 {
            let q = rot(closed_point(base, i));
            for j in 0..m {
                let p = closed_point(base, j);
                out.insert((origin.0 + q.0 + p.0, origin.1 + q.1 + p.1));
            }
        }
        out
    }

    #[test]
    fn axis_base_is_plain_boustrophedon() {
        let v = serpentine_window((0, 0), (4, 0), 3).unwrap();
        assert_eq!(
            v,
            vec![
                (0, 0), (1, 0), (2, 0), (3, 0),
                (3, 1), (2, 1), (1, 1), (0, 1),
                (0, 2), (1, 2), (2, 2), (3, 2),
            ]
        );
    }

    #[test]
    fn zero_vector() {
        assert_eq!(serpentine_window((0, 0), (0, 0), 3), Err(Error::ZeroVector));
    }

    #[test]
    fn three_four_window() {
        let v = serpentine_window((10, -3), (3, 4), 5).unwrap();
        let set: HashSet<_> = v.iter().cloned().collect();
        assert_eq!(v.len(), 20);
        assert_eq!(set.len(), v.len());
        assert_eq!(set, closed_window((10, -3), (3, 4), 5));
    }

    #[test]
    fn steps_match_closed_form() {
        for base in [(7, 3), (-5, 2), (2, -9), (-4, -4), (0, 6), (-6, 0)] {
            let steps = line_steps(base).unwrap();
            let mut p = (0, 0);
            for (j, s) in steps.iter().enumerate() {
                assert_eq!(p, closed_point(base, j as i64));
                p = (p.0 + s.0, p.1 + s.1);
            }
            assert_eq!(p, base);
        }
    }

    #[test]
    fn random_windows() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..200 {
            let base = loop {
                let b = (rng.random_range(-24i64..=24), rng.random_range(-24i64..=24));
                if b != (0, 0) {
                    break b;
                }
            };
            let n = rng.random_range(1..40usize);
            let m = base.0.abs().max(base.1.abs()) as usize;
            let v = serpentine_window((3, 5), base, n).unwrap();
            let set: HashSet<_> = v.iter().cloned().collect();
            assert_eq!(set.len(), v.len());
            assert_eq!(set, closed_window((3, 5), base, n));
            // consecutive visits are king moves; rows sit one step apart
            for w in v.windows(2) {
                assert!((w[1].0 - w[0].0).abs() <= 1 && (w[1].1 - w[0].1).abs() <= 1);
            }
            for i in 1..n {
                for j in 0..m {
                    let col = |r: usize| if r.is_multiple_of(2) { j } else { m - 1 - j };
                    let a = v[(i - 1) * m + col(i - 1)];
                    let b = v[i * m + col(i)];
                    assert!((b.0 - a.0).abs() <= 1 && (b.1 - a.1).abs() <= 1 && a != b);
                }
            }
        }
    }
}
