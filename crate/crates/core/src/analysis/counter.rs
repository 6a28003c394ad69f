//! Counted arithmetic.
//!
//! Kernels are written against [`Real`]. Running them with `f64` is the plain
//! path; running them with [`Counted`] gives bit-identical values and bumps a
//! thread-local tally on every `+ - * /` and comparison. Conversions
//! (`lit`, `get`, `floor`, `round_half_up`) are not tallied: in hardware they
//! are wiring or truncation, not arithmetic.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounter {
    pub divisions: u64,
    pub multiplications: u64,
    pub additions: u64,
    pub comparisons: u64,
}

impl OpCounter {
    pub const ZERO: OpCounter = OpCounter {
        divisions: 0,
        multiplications: 0,
        additions: 0,
        comparisons: 0,
    };

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

impl Add for OpCounter {
    type Output = OpCounter;
    fn add(self, o: OpCounter) -> OpCounter {
        OpCounter {
            divisions: self.divisions + o.divisions,
            multiplications: self.multiplications + o.multiplications,
            additions: self.additions + o.additions,
            comparisons: self.comparisons + o.comparisons,
        }
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, o: OpCounter) {
        *self = *self + o;
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "div={} mul={} add={} cmp={}",
            self.divisions, self.multiplications, self.additions, self.comparisons
        )
    }
}

thread_local! {
    static TALLY: Cell<OpCounter> = const { Cell::new(OpCounter::ZERO) };
    static SCOPES: RefCell<Vec<(String, OpCounter)>> = const { RefCell::new(Vec::new()) };
}

const SCOPE_LOG_CAP: usize = 64;

#[cfg(feature = "op-count")]
#[inline]
fn bump(f: impl FnOnce(&mut OpCounter)) {
    TALLY.with(|c| {
        let mut t = c.get();
        f(&mut t);
        c.set(t);
    });
}

#[cfg(not(feature = "op-count"))]
#[inline(always)]
fn bump(_f: impl FnOnce(&mut OpCounter)) {}

/// Current tally of the innermost open scope on this thread.
pub fn current() -> OpCounter {
    TALLY.with(|c| c.get())
}

struct ScopeGuard {
    saved: OpCounter,
    label: String,
    done: bool,
}

impl ScopeGuard {
    fn close(&mut self) -> OpCounter {
        let inner = TALLY.with(|c| c.get());
        TALLY.with(|c| c.set(self.saved + inner));
        SCOPES.with(|s| {
            let mut s = s.borrow_mut();
            if s.len() == SCOPE_LOG_CAP {
                s.remove(0);
            }
            s.push((std::mem::take(&mut self.label), inner));
        });
        self.done = true;
        inner
    }
}

impl Drop for ScopeGuard {
    fn drop(&mut self) {
        if !self.done {
            self.close();
        }
    }
}

/// Runs `body` and returns what it tallied. Scopes nest: the inner tally is
/// also added to the enclosing scope.
pub fn counted_scope<R>(label: &str, body: impl FnOnce() -> R) -> (R, OpCounter) {
    let saved = TALLY.with(|c| c.replace(OpCounter::ZERO));
    let mut guard = ScopeGuard {
        saved,
        label: label.to_string(),
        done: false,
    };
    let out = body();
    let inner = guard.close();
    (out, inner)
}

/// The last few closed scopes on this thread, oldest first.
pub fn recent_scopes() -> Vec<(String, OpCounter)> {
    SCOPES.with(|s| s.borrow().clone())
}

pub trait Real:
    Copy
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn lit(x: f64) -> Self;
    fn get(self) -> f64;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;

    /// floor(x + 1/2) as a single rounding step.
    fn round_half_up(self) -> Self {
        let f = self.floor();
        if self.get() - f.get() >= 0.5 {
            Self::lit(f.get() + 1.0)
        } else {
            f
        }
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn get(self) -> f64 {
        self
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    #[inline]
    fn ceil(self) -> Self {
        f64::ceil(self)
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn get(self) -> f64 {
        self as f64
    }
    #[inline]
    fn floor(self) -> Self {
        f32::floor(self)
    }
    #[inline]
    fn ceil(self) -> Self {
        f32::ceil(self)
    }
}

/// An f64 that counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counted(pub f64);

impl Add for Counted {
    type Output = Counted;
    #[inline]
    fn add(self, o: Counted) -> Counted {
        bump(|t| t.additions += 1);
        Counted(self.0 + o.0)
    }
}

impl Sub for Counted {
    type Output = Counted;
    #[inline]
    fn sub(self, o: Counted) -> Counted {
        bump(|t| t.additions += 1);
        Counted(self.0 - o.0)
    }
}

impl Mul for Counted {
    type Output = Counted;
    #[inline]
    fn mul(self, o: Counted) -> Counted {
        bump(|t| t.multiplications += 1);
        Counted(self.0 * o.0)
    }
}

impl Div for Counted {
    type Output = Counted;
    #[inline]
    fn div(self, o: Counted) -> Counted {
        bump(|t| t.divisions += 1);
        Counted(self.0 / o.0)
    }
}

impl Neg for Counted {
    type Output = Counted;
    #[inline]
    fn neg(self) -> Counted {
        Counted(-self.0)
    }
}

impl AddAssign for Counted {
    #[inline]
    fn add_assign(&mut self, o: Counted) {
        *self = *self + o;
    }
}

impl SubAssign for Counted {
    #[inline]
    fn sub_assign(&mut self, o: Counted) {
        *self = *self - o;
    }
}

impl PartialEq for Counted {
    fn eq(&self, o: &Counted) -> bool {
        bump(|t| t.comparisons += 1);
        self.0 == o.0
    }
}

impl PartialOrd for Counted {
    fn partial_cmp(&self, o: &Counted) -> Option<Ordering> {
        bump(|t| t.comparisons += 1);
        self.0.partial_cmp(&o.0)
    }
}

impl Real for Counted {
    #[inline]
    fn lit(x: f64) -> Self {
        Counted(x)
    }
    #[inline]
    fn get(self) -> f64 {
        self.0
    }
    #[inline]
    fn floor(self) -> Self {
        Counted(self.0.floor())
    }
    #[inline]
    fn ceil(self) -> Self {
        Counted(self.0.ceil())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scope_is_zero() {
        let ((), c) = counted_scope("empty", || {});
        assert!(c.is_zero());
    }

    #[cfg(feature = "op-count")]
    #[test]
    fn tallies_each_operator() {
        let (v, c) = counted_scope("ops", || {
            let a = Counted(3.0);
            let b = Counted(2.0);
            let r = (a + b) * a / b - a;
            let _ = r < a;
            r
        });
        assert_eq!(v.0, 4.5);
        assert_eq!(
            c,
            OpCounter {
                divisions: 1,
                multiplications: 1,
                additions: 2,
                comparisons: 1
            }
        );
    }

    #[cfg(feature = "op-count")]
    #[test]
    fn nested_scopes_sum_into_parent() {
        let ((c1, c2), outer) = counted_scope("outer", || {
            let x = Counted(1.0) + Counted(1.0);
            let (_, c1) = counted_scope("a", || x * x);
            let (_, c2) = counted_scope("b", || x / x + x);
            (c1, c2)
        });
        assert_eq!(c1.multiplications, 1);
        assert_eq!(c2.divisions, 1);
        assert_eq!(c2.additions, 1);
        assert_eq!(outer.additions, 2);
        assert_eq!(outer.multiplications, 1);
        assert_eq!(outer.divisions, 1);
        let log = recent_scopes();
        assert_eq!(log.last().unwrap().0, "outer");
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(2.5f64.round_half_up(), 3.0);
        assert_eq!((-2.5f64).round_half_up(), -2.0);
        assert_eq!((-2.51f64).round_half_up(), -3.0);
        assert_eq!(Counted(0.49).round_half_up().0, 0.0);
    }

    #[test]
    fn counted_matches_plain_bits() {
        let xs = [0.1, 1.0 / 3.0, 7.25, -2.0e-9];
        for &a in &xs {
            for &b in &xs {
                let p = (a * b + a) / (b - 0.5);
                let c = ((Counted(a) * Counted(b) + Counted(a)) / (Counted(b) - Counted(0.5))).0;
                assert_eq!(p.to_bits(), c.to_bits());
            }
        }
    }
}
