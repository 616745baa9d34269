//! C ABI for the rieszkit toolkit.
//!
//! Interval sets travel as opaque handles created and freed by this library;
//! scalar results come back through out-pointers and every function returns
//! an [`RkStatus`]. No function panics across the boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rieszkit::construction::{
    box_coeffs, build_s as core_build_s, build_v as core_build_v, truncation_index,
    verify_witness_ap, ConstructionError, WitnessParams,
};
use rieszkit::frequency_tools::{
    extract_approx_ap, squarefree_obstruction, FreqError, FrequencySet,
};
use rieszkit::gram::{exp_inner, GramMatrix};
use rieszkit::interval_sets::{Interval, IntervalSet, DEFAULT_MERGE_TOL};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotFound = 3,
    NumericError = 4,
    BufferTooSmall = 5,
}

/// Opaque handle to a normalized union of closed intervals.
pub struct RkIntervalSet(IntervalSet);

/// Witness verification summary (see `rk_witness_box`).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RkWitnessReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub p: u32,
    pub r: u32,
    pub m_tilde: i64,
    pub energy_on_s: f64,
    pub coeff_energy: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Approximate arithmetic progression extracted from a separated set.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RkApResult {
    /// Common difference (a positive multiple of the requested factor).
    pub c: u64,
    /// Offset of the fitted progression `c*j + d`.
    pub d: f64,
    /// Largest observed deviation `|s(j) - c*j - d|`.
    pub max_deviation: f64,
    /// Number of members written to the caller's buffer (`2m + 1`).
    pub len: usize,
    /// Lattice denominator used by the rounding step.
    pub lattice_n: u64,
}

/// Square-free progression obstruction summary.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RkSquarefreeReport {
    pub p: u64,
    /// Smallest prime above `p`.
    pub q: u64,
    /// Theoretical cap `q^2 - 1` on the progression length.
    pub cap: u64,
    pub observed: usize,
    pub observed_start: i64,
}

fn guard<F: FnOnce() -> RkStatus>(f: F) -> RkStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(RkStatus::NumericError)
}

fn construction_status(e: &ConstructionError) -> RkStatus {
    match e {
        ConstructionError::TailUnreachable { .. } => RkStatus::NotFound,
        _ => RkStatus::InvalidArgument,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Human-readable name of a status code (static storage).
#[no_mangle]
pub extern "C" fn rk_status_name(status: RkStatus) -> *const c_char {
    let name: &'static CStr = match status {
        RkStatus::Ok => c"ok",
        RkStatus::NullPointer => c"null pointer",
        RkStatus::InvalidArgument => c"invalid argument",
        RkStatus::NotFound => c"not found",
        RkStatus::NumericError => c"numeric error",
        RkStatus::BufferTooSmall => c"buffer too small",
    };
    name.as_ptr()
}

/// Builds an interval set from `n_parts` pairs `(lo, hi)` laid out
/// consecutively in `pairs`. The result must be freed with
/// `rk_interval_set_free`.
///
/// # Safety
/// `pairs` must point to `2 * n_parts` readable doubles and `out` must be a
/// valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_interval_set_new(
    pairs: *const f64,
    n_parts: usize,
    out: *mut *mut RkIntervalSet,
) -> RkStatus {
    if out.is_null() || (pairs.is_null() && n_parts > 0) {
        return RkStatus::NullPointer;
    }
    guard(|| {
        let slice = if n_parts == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(pairs, 2 * n_parts)
        };
        let intervals: Result<Vec<Interval>, _> =
            slice.chunks_exact(2).map(|c| Interval::new(c[0], c[1])).collect();
        let intervals = match intervals {
            Ok(v) => v,
            Err(_) => return RkStatus::InvalidArgument,
        };
        match IntervalSet::normalize(intervals, DEFAULT_MERGE_TOL) {
            Ok(set) => {
                *out = Box::into_raw(Box::new(RkIntervalSet(set)));
                RkStatus::Ok
            }
            Err(_) => RkStatus::InvalidArgument,
        }
    })
}

/// Builds the deleted set `V` at the given parameters.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_build_v(
    alpha: f64,
    epsilon: f64,
    depth: u32,
    out: *mut *mut RkIntervalSet,
) -> RkStatus {
    if out.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| match core_build_v(alpha, epsilon, depth) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(RkIntervalSet(set)));
            RkStatus::Ok
        }
        Err(e) => construction_status(&e),
    })
}

/// Builds the kept set `S = [-1/2, 1/2] \ V`.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_build_s(
    alpha: f64,
    epsilon: f64,
    depth: u32,
    out: *mut *mut RkIntervalSet,
) -> RkStatus {
    if out.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| match core_build_s(alpha, epsilon, depth) {
        Ok(set) => {
            *out = Box::into_raw(Box::new(RkIntervalSet(set)));
            RkStatus::Ok
        }
        Err(e) => construction_status(&e),
    })
}

/// Frees a handle returned by this library. NULL is ignored.
///
/// # Safety
/// `set` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn rk_interval_set_free(set: *mut RkIntervalSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rk_interval_set_measure(
    set: *const RkIntervalSet,
    out: *mut f64,
) -> RkStatus {
    if set.is_null() || out.is_null() {
        return RkStatus::NullPointer;
    }
    *out = (*set).0.measure();
    RkStatus::Ok
}

/// # Safety
/// `set` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rk_interval_set_num_parts(
    set: *const RkIntervalSet,
    out: *mut usize,
) -> RkStatus {
    if set.is_null() || out.is_null() {
        return RkStatus::NullPointer;
    }
    *out = (*set).0.parts().len();
    RkStatus::Ok
}

/// Copies the parts as `(lo, hi)` pairs into `buf`; `cap_pairs` is the number
/// of pairs the buffer can hold.
///
/// # Safety
/// `buf` must point to `2 * cap_pairs` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rk_interval_set_copy_parts(
    set: *const RkIntervalSet,
    buf: *mut f64,
    cap_pairs: usize,
) -> RkStatus {
    if set.is_null() || buf.is_null() {
        return RkStatus::NullPointer;
    }
    let parts = (*set).0.parts();
    if cap_pairs < parts.len() {
        return RkStatus::BufferTooSmall;
    }
    for (i, p) in parts.iter().enumerate() {
        *buf.add(2 * i) = p.lo;
        *buf.add(2 * i + 1) = p.hi;
    }
    RkStatus::Ok
}

/// `window \ set` as a new handle over the window `[lo, hi]`.
///
/// # Safety
/// `set` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rk_interval_set_complement_in(
    set: *const RkIntervalSet,
    lo: f64,
    hi: f64,
    out: *mut *mut RkIntervalSet,
) -> RkStatus {
    if set.is_null() || out.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| {
        let window = match Interval::new(lo, hi) {
            Ok(w) => w,
            Err(_) => return RkStatus::InvalidArgument,
        };
        let complement = (*set).0.complement_in(window);
        *out = Box::into_raw(Box::new(RkIntervalSet(complement)));
        RkStatus::Ok
    })
}

/// The integral of `e^{2πiθx}` over the set, split into real and imaginary
/// parts.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rk_exp_inner(
    theta: f64,
    set: *const RkIntervalSet,
    out_re: *mut f64,
    out_im: *mut f64,
) -> RkStatus {
    if set.is_null() || out_re.is_null() || out_im.is_null() {
        return RkStatus::NullPointer;
    }
    if !theta.is_finite() {
        return RkStatus::InvalidArgument;
    }
    let z = exp_inner(theta, &(*set).0);
    *out_re = z.re;
    *out_im = z.im;
    RkStatus::Ok
}

/// Extremal eigenvalues of the Gram matrix of `n` distinct frequencies over
/// the set.
///
/// # Safety
/// `freqs` must point to `n` readable doubles; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rk_gram_extremal_eigs(
    freqs: *const f64,
    n: usize,
    set: *const RkIntervalSet,
    out_lambda_min: *mut f64,
    out_lambda_max: *mut f64,
) -> RkStatus {
    if freqs.is_null() || set.is_null() || out_lambda_min.is_null() || out_lambda_max.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| {
        let pts = std::slice::from_raw_parts(freqs, n).to_vec();
        let fs = match FrequencySet::new(pts, None) {
            Ok(f) => f,
            Err(_) => return RkStatus::InvalidArgument,
        };
        let gram = match GramMatrix::build(&fs, &(*set).0) {
            Ok(g) => g,
            Err(_) => return RkStatus::InvalidArgument,
        };
        match gram.extremal_eigs() {
            Ok((lo, hi)) => {
                *out_lambda_min = lo;
                *out_lambda_max = hi;
                RkStatus::Ok
            }
            Err(_) => RkStatus::NumericError,
        }
    })
}

/// Runs the box-coefficient witness pipeline on the progression
/// `p*alpha*j + d` against the kept set at the given depth and verifies the
/// energy bound `R*eta/2^p * sum |a_j|^2`.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_witness_box(
    alpha: f64,
    epsilon: f64,
    eta: f64,
    r: u32,
    p: u32,
    d: f64,
    depth: u32,
    out: *mut RkWitnessReport,
) -> RkStatus {
    if out.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| {
        if p == 0 || depth < p || r < 2 {
            return RkStatus::InvalidArgument;
        }
        if eta <= 0.0 || eta >= (r as f64 - 1.0) / r as f64 {
            return RkStatus::InvalidArgument;
        }
        let tail = eta / 2f64.powi(p as i32);
        let w = eta * alpha / 2f64.powi(p as i32);
        let mut support = 1024u32;
        let (coeffs, m_tilde) = loop {
            let coeffs = match box_coeffs(w, support) {
                Ok(c) => c,
                Err(_) => return RkStatus::InvalidArgument,
            };
            match truncation_index(&coeffs, tail) {
                Ok(m) => break (coeffs, m),
                Err(ConstructionError::TailUnreachable { .. }) if support < (1 << 22) => {
                    support *= 2;
                }
                Err(_) => return RkStatus::InvalidArgument,
            }
        };
        // The offset d modulates the witness without changing its energy.
        let _ = d;
        let s = match core_build_s(alpha, epsilon, depth) {
            Ok(s) => s,
            Err(_) => return RkStatus::InvalidArgument,
        };
        let params = WitnessParams { alpha, epsilon, eta, r, p_or_ell: p };
        let report = verify_witness_ap(
            &coeffs,
            m_tilde,
            p as f64 * alpha,
            &s,
            &params,
            coeffs.energy_within(m_tilde),
        );
        *out = RkWitnessReport {
            alpha,
            epsilon,
            eta,
            p,
            r,
            m_tilde: report.m_tilde,
            energy_on_s: report.energy_on_s,
            coeff_energy: report.coeff_energy,
            bound: report.bound,
            satisfied: report.satisfied,
        };
        RkStatus::Ok
    })
}

/// Extracts an approximate arithmetic progression of length `2m + 1` with
/// deviation at most `delta` and common difference a multiple of `lmult`
/// from `n` strictly increasing points. Members are written to `s_buf`.
///
/// Returns `NotFound` when the finite window holds no progression of the
/// requested length; `out.len` then carries the longest length found.
///
/// # Safety
/// `points` must hold `n` readable doubles and `s_buf` must hold `s_cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rk_extract_approx_ap(
    points: *const f64,
    n: usize,
    m: u32,
    delta: f64,
    lmult: u64,
    out: *mut RkApResult,
    s_buf: *mut f64,
    s_cap: usize,
) -> RkStatus {
    if points.is_null() || out.is_null() || s_buf.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| {
        let pts = std::slice::from_raw_parts(points, n).to_vec();
        let fs = match FrequencySet::new(pts, None) {
            Ok(f) => f,
            Err(_) => return RkStatus::InvalidArgument,
        };
        match extract_approx_ap(&fs, m, delta, lmult) {
            Ok(ap) => {
                if s_cap < ap.s.len() {
                    return RkStatus::BufferTooSmall;
                }
                for (i, v) in ap.s.iter().enumerate() {
                    *s_buf.add(i) = *v;
                }
                *out = RkApResult {
                    c: ap.c,
                    d: ap.d,
                    max_deviation: ap.max_deviation,
                    len: ap.s.len(),
                    lattice_n: ap.lattice_n,
                };
                RkStatus::Ok
            }
            Err(FreqError::ApNotFound { best_len, .. }) => {
                (*out).len = best_len;
                RkStatus::NotFound
            }
            Err(_) => RkStatus::InvalidArgument,
        }
    })
}

/// Longest square-free progression with difference `p` up to `limit`,
/// together with the prime-square cap.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_squarefree_obstruction(
    p: u64,
    limit: u64,
    out: *mut RkSquarefreeReport,
) -> RkStatus {
    if out.is_null() {
        return RkStatus::NullPointer;
    }
    guard(|| match squarefree_obstruction(p, limit) {
        Ok(rep) => {
            *out = RkSquarefreeReport {
                p: rep.p,
                q: rep.q,
                cap: rep.cap,
                observed: rep.observed,
                observed_start: rep.observed_start,
            };
            RkStatus::Ok
        }
        Err(_) => RkStatus::InvalidArgument,
    })
}
