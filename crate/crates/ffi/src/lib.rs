//! C ABI over percor's screen-to-texture maps and the claims suite.
//!
//! Every function returns a [`PercorStatus`]. Maps are opaque handles
//! created by `percor_map_from_*` and released with [`percor_map_free`].
//! After a non-OK status, [`percor_last_error`] describes the failure on
//! the calling thread.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::ptr;

use percor::Error;
use percor::analysis::claims::{ClaimsConfig, claims_suite_with, criterion_status};
use percor::texmap::midpoint::midpoint_row;
use percor::texmap::{ProjectiveTexMap, derive_from_quad};

/// Opaque screen-to-texture map.
pub struct PercorMap {
    map: ProjectiveTexMap,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PercorStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// collinear corners, singular system, zero-area input
    Degenerate = 3,
    /// denominator <= 0 at a requested point
    BehindProjection = 4,
    /// the claims run finished and at least one criterion failed
    ClaimsFailed = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PercorStatus, msg: &str) -> PercorStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> PercorStatus {
    let s = match e {
        Error::BehindProjection { .. } => PercorStatus::BehindProjection,
        Error::DegenerateQuad | Error::SingularSystem | Error::DegenerateTriangle | Error::AffineMap => {
            PercorStatus::Degenerate
        }
        _ => PercorStatus::InvalidArgument,
    };
    fail(s, &e.to_string())
}

fn guarded(body: impl FnOnce() -> PercorStatus) -> PercorStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => {
            if s == PercorStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(PercorStatus::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn percor_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[unsafe(no_mangle)]
pub extern "C" fn percor_status_str(status: PercorStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        PercorStatus::Ok => b"ok\0",
        PercorStatus::NullPointer => b"null pointer\0",
        PercorStatus::InvalidArgument => b"invalid argument\0",
        PercorStatus::Degenerate => b"degenerate input\0",
        PercorStatus::BehindProjection => b"behind projection\0",
        PercorStatus::ClaimsFailed => b"claims failed\0",
        PercorStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

fn store(out: *mut *mut PercorMap, map: ProjectiveTexMap) -> PercorStatus {
    // SAFETY: callers checked `out` for null
    unsafe { *out = Box::into_raw(Box::new(PercorMap { map })) };
    PercorStatus::Ok
}

/// Map from the nine coefficients `a b c d e f g h i` in row order.
///
/// # Safety
/// `coeffs` must point to 9 readable doubles and `out` to a writable
/// handle slot. The handle must be released with [`percor_map_free`].
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_map_from_coeffs(coeffs: *const f64, out: *mut *mut PercorMap) -> PercorStatus {
    guarded(|| {
        if coeffs.is_null() || out.is_null() {
            return fail(PercorStatus::NullPointer, "coeffs or out is null");
        }
        let mut k = [0.0; 9];
        // SAFETY: caller guarantees 9 readable doubles
        unsafe { ptr::copy_nonoverlapping(coeffs, k.as_mut_ptr(), 9) };
        if k.iter().any(|v| !v.is_finite()) {
            return fail(PercorStatus::InvalidArgument, "coefficients must be finite");
        }
        if k[6] == 0.0 && k[7] == 0.0 && k[8] == 0.0 {
            return fail(PercorStatus::Degenerate, "denominator coefficients are all zero");
        }
        store(out, ProjectiveTexMap::from_coeffs(k))
    })
}

/// Map taking screen corners `x0 y0 ... x3 y3` to texture corners
/// `u0 v0 ... u3 v3`.
///
/// # Safety
/// `screen` and `uv` must each point to 8 readable doubles and `out` to a
/// writable handle slot.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_map_from_quad(
    screen: *const f64,
    uv: *const f64,
    out: *mut *mut PercorMap,
) -> PercorStatus {
    guarded(|| {
        if screen.is_null() || uv.is_null() || out.is_null() {
            return fail(PercorStatus::NullPointer, "screen, uv or out is null");
        }
        // SAFETY: caller guarantees 8 readable doubles each
        let (s, t) = unsafe { (std::slice::from_raw_parts(screen, 8), std::slice::from_raw_parts(uv, 8)) };
        let pairs = |p: &[f64]| [0, 1, 2, 3].map(|k| (p[2 * k], p[2 * k + 1]));
        match derive_from_quad(pairs(s), pairs(t)) {
            Ok(m) => store(out, m),
            Err(e) => from_error(&e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `map` must be null or a handle from `percor_map_from_*` not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_map_free(map: *mut PercorMap) {
    if !map.is_null() {
        // SAFETY: handle came from Box::into_raw
        drop(unsafe { Box::from_raw(map) });
    }
}

/// Copies the nine coefficients into `out`.
///
/// # Safety
/// `map` must be a live handle and `out` must point to 9 writable doubles.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_map_coeffs(map: *const PercorMap, out: *mut f64) -> PercorStatus {
    guarded(|| {
        if map.is_null() || out.is_null() {
            return fail(PercorStatus::NullPointer, "map or out is null");
        }
        // SAFETY: live handle, 9 writable doubles
        unsafe { ptr::copy_nonoverlapping((*map).map.coeffs().as_ptr(), out, 9) };
        PercorStatus::Ok
    })
}

/// Texture coordinates at screen point `(x, y)` by exact division.
///
/// # Safety
/// `map` must be a live handle; `u` and `v` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_map_uv(map: *const PercorMap, x: f64, y: f64, u: *mut f64, v: *mut f64) -> PercorStatus {
    guarded(|| {
        if map.is_null() || u.is_null() || v.is_null() {
            return fail(PercorStatus::NullPointer, "map, u or v is null");
        }
        // SAFETY: live handle
        match unsafe { &(*map).map }.uv(x, y) {
            Ok((a, b)) => {
                // SAFETY: writable outputs
                unsafe {
                    *u = a;
                    *v = b;
                }
                PercorStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Division-free texture coordinates for pixels `xs..=xe` of row `y`,
/// quantized to steps of `du`. Writes `xe - xs + 1` values to each of `u`
/// and `v`; `len` is their capacity.
///
/// # Safety
/// `map` must be a live handle; `u` and `v` must point to `len` writable
/// doubles.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_midpoint_row(
    map: *const PercorMap,
    y: i64,
    xs: i64,
    xe: i64,
    du: f64,
    u: *mut f64,
    v: *mut f64,
    len: usize,
) -> PercorStatus {
    guarded(|| {
        if map.is_null() || u.is_null() || v.is_null() {
            return fail(PercorStatus::NullPointer, "map, u or v is null");
        }
        if xe < xs || !(du > 0.0) || !du.is_finite() {
            return fail(PercorStatus::InvalidArgument, "need xs <= xe and du > 0");
        }
        let n = (xe - xs + 1) as u64;
        if n > len as u64 {
            return fail(PercorStatus::InvalidArgument, "output buffers too short");
        }
        // SAFETY: live handle
        let vals = match midpoint_row::<f64>(unsafe { &(*map).map }, y, xs, xe, du) {
            Ok(v) => v,
            Err(e) => return from_error(&e),
        };
        for (k, (a, b)) in vals.into_iter().enumerate() {
            // SAFETY: k < n <= len
            unsafe {
                *u.add(k) = a;
                *v.add(k) = b;
            }
        }
        PercorStatus::Ok
    })
}

/// Runs the numeric claims. `threads` of 0 means one. On return
/// `failed` (if not null) holds the number of failed criteria; the status
/// is `ClaimsFailed` when it is nonzero.
///
/// # Safety
/// `failed` must be null or writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn percor_claims_run(seed: u64, threads: u32, failed: *mut u32) -> PercorStatus {
    guarded(|| {
        let rows = claims_suite_with(&ClaimsConfig {
            seed,
            threads: threads.max(1) as usize,
            fault: None,
        });
        let bad: Vec<u8> = criterion_status(&rows).into_iter().filter(|s| !s.1).map(|s| s.0).collect();
        if !failed.is_null() {
            // SAFETY: caller guarantees writable
            unsafe { *failed = bad.len() as u32 };
        }
        if bad.is_empty() {
            PercorStatus::Ok
        } else {
            fail(PercorStatus::ClaimsFailed, &format!("failed criteria: {bad:?}"))
        }
    })
}
