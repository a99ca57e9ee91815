//! C interface to gapcert.
//!
//! Rationals cross the boundary as NUL-terminated `"p/q"` strings. Strings
//! returned through out-parameters are owned by the caller and must be
//! released with `gapcert_string_free`. Handles are opaque and released
//! with their matching `_free` function. Every fallible call returns a
//! `GapcertStatus`; on failure `gapcert_last_error` describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gapcert::constants::{verify_main_theorem, TheoremReport};
use gapcert::integrator::c1_enclosure;
use gapcert::ledger::{results_to_json, verify_all};
use gapcert::polytope::{build_e, exact_volume, HPolytope};
use gapcert::rational::{parse_rational, to_exact_string, to_f64};
use gapcert::{Error, Rational};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapcertStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    ParseError = 3,
    Unbounded = 4,
    CertificationFailed = 5,
    Internal = 6,
}

/// Opaque H-polytope handle.
pub struct GapcertPolytope(HPolytope);

/// Opaque theorem-report handle.
pub struct GapcertReport(TheoremReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GapcertStatus {
    match e {
        Error::Parse(_) => GapcertStatus::ParseError,
        Error::Input(_) | Error::Dimension { .. } | Error::NoThreshold => GapcertStatus::InvalidInput,
        Error::Unbounded => GapcertStatus::Unbounded,
        Error::Certification(_) | Error::Pole { .. } => GapcertStatus::CertificationFailed,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (GapcertStatus, String)>) -> GapcertStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GapcertStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GapcertStatus::Internal
        }
    }
}

fn lib<T>(r: gapcert::Result<T>) -> Result<T, (GapcertStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GapcertStatus, String) {
    (GapcertStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (GapcertStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (GapcertStatus::ParseError, format!("{what} is not UTF-8")))
}

/// # Safety
/// As for [`read_str`].
unsafe fn read_rational(s: *const c_char, what: &str) -> Result<Rational, (GapcertStatus, String)> {
    lib(parse_rational(read_str(s, what)?))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (GapcertStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (GapcertStatus::Internal, "string has NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Copy of the calling thread's most recent error message, or null if none.
/// Release with `gapcert_string_free`.
#[no_mangle]
pub extern "C" fn gapcert_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gapcert_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the discarded region E(eta) for `eta` given as `"p/q"`.
///
/// # Safety
/// `eta` must be a valid C string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_build_e(eta: *const c_char, out: *mut *mut GapcertPolytope) -> GapcertStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let eta = read_rational(eta, "eta")?;
        let p = lib(build_e(&eta))?;
        *out = Box::into_raw(Box::new(GapcertPolytope(p)));
        Ok(())
    })
}

/// Parses a polytope from its text H-representation.
///
/// # Safety
/// `text` must be a valid C string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_from_hrep(text: *const c_char, out: *mut *mut GapcertPolytope) -> GapcertStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lib(HPolytope::from_hrep(read_str(text, "text")?))?;
        *out = Box::into_raw(Box::new(GapcertPolytope(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_free(p: *mut GapcertPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension of the polytope.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_dim(p: *const GapcertPolytope, out: *mut usize) -> GapcertStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = p.0.dim();
        Ok(())
    })
}

/// Exact volume as a `"p/q"` string, plus its nearest double if
/// `out_approx` is non-null.
///
/// # Safety
/// `p` must be a live handle; `out_exact` valid for writes; `out_approx`
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_volume(
    p: *const GapcertPolytope,
    out_exact: *mut *mut c_char,
    out_approx: *mut f64,
) -> GapcertStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        let v = lib(exact_volume(&p.0))?;
        write_string(out_exact, to_exact_string(&v))?;
        if let Some(a) = out_approx.as_mut() {
            *a = to_f64(&v);
        }
        Ok(())
    })
}

/// Closed membership test for a point given as `dim` `"p/q"` strings.
///
/// # Safety
/// `p` must be a live handle; `coords` must point to `dim` valid C strings;
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_contains(
    p: *const GapcertPolytope,
    coords: *const *const c_char,
    dim: usize,
    out: *mut bool,
) -> GapcertStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if coords.is_null() {
            return Err(null("coords"));
        }
        let point = std::slice::from_raw_parts(coords, dim)
            .iter()
            .map(|&c| read_rational(c, "coordinate"))
            .collect::<Result<Vec<_>, _>>()?;
        *out = lib(p.0.contains(&point))?;
        Ok(())
    })
}

/// Text H-representation, one `a1 ... ad <= b` line per half-space.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_polytope_hrep(p: *const GapcertPolytope, out: *mut *mut c_char) -> GapcertStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        write_string(out, p.0.to_hrep())
    })
}

/// Certifies an upper bound on c1(eta) to absolute width `tol` and runs the
/// final chain of checks with it.
///
/// # Safety
/// `eta` and `tol` must be valid C strings; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_report_new(
    eta: *const c_char,
    tol: *const c_char,
    out: *mut *mut GapcertReport,
) -> GapcertStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let eta = read_rational(eta, "eta")?;
        let tol = read_rational(tol, "tol")?;
        let c1 = lib(c1_enclosure(&eta, &tol, 24))?;
        let report = lib(verify_main_theorem(&eta, c1.enclosure.hi()))?;
        *out = Box::into_raw(Box::new(GapcertReport(report)));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gapcert_report_free(r: *mut GapcertReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Whether every check in the report passed.
///
/// # Safety
/// `r` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_report_passed(r: *const GapcertReport, out: *mut bool) -> GapcertStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.0.overall;
        Ok(())
    })
}

/// The report as pretty-printed JSON.
///
/// # Safety
/// `r` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_report_json(r: *const GapcertReport, out: *mut *mut c_char) -> GapcertStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        write_string(out, r.0.to_json())
    })
}

/// Verifies every ledger claim. Writes a JSON array of results and whether
/// all of them passed.
///
/// # Safety
/// `out_json` and `all_pass` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gapcert_thresholds_json(out_json: *mut *mut c_char, all_pass: *mut bool) -> GapcertStatus {
    guard(|| {
        let all_pass = all_pass.as_mut().ok_or_else(|| null("all_pass"))?;
        let results = verify_all();
        write_string(out_json, results_to_json(&results))?;
        *all_pass = results.iter().all(|r| r.pass);
        Ok(())
    })
}

/// Library version, statically allocated; do not free.
#[no_mangle]
pub extern "C" fn gapcert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
