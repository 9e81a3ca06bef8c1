//! C ABI over `morrey_core`.
//!
//! Functions and semigroups are opaque handles created from gallery labels and
//! released with the matching `_free`. Every call returns a `MorreyStatus`; on
//! failure the message is kept per thread and read with
//! `morrey_last_error_message`. Strings returned by the library are released
//! with `morrey_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use morrey_core::cli::{run, RunConfig};
use morrey_core::disc::GridSpec;
use morrey_core::function::{function_from_label, AnalyticFunction};
use morrey_core::quadrature::QuadratureConfig;
use morrey_core::semigroup::{semigroup_from_label, Semigroup};
use morrey_core::seminorms::{seminorm, SeminormKind};
use morrey_core::LabError;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorreyStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad input: parameter out of range, precondition or not a self-map.
    Domain = 2,
    /// Numerical failure: Newton divergence, non-finite values, flow escape.
    Numerical = 3,
    UnknownLabel = 4,
    InvalidUtf8 = 5,
    InvalidJson = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorreySeminorm {
    P1 = 1,
    P2 = 2,
    P3 = 3,
}

/// Opaque analytic function on the disc.
pub struct MorreyFunction(AnalyticFunction);

/// Opaque semigroup of holomorphic self-maps.
pub struct MorreySemigroup(Semigroup);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &LabError) -> MorreyStatus {
    match err {
        LabError::UnknownLabel { .. } => MorreyStatus::UnknownLabel,
        LabError::Json(_) => MorreyStatus::InvalidJson,
        e if e.is_domain_error() => MorreyStatus::Domain,
        _ => MorreyStatus::Numerical,
    }
}

fn guard(body: impl FnOnce() -> Result<(), MorreyStatus>) -> MorreyStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MorreyStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            MorreyStatus::Panic
        }
    }
}

fn lab<T>(r: morrey_core::Result<T>) -> Result<T, MorreyStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, MorreyStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(MorreyStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        MorreyStatus::InvalidUtf8
    })
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, MorreyStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        MorreyStatus::NullPointer
    })
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, MorreyStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        MorreyStatus::NullPointer
    })
}

/// Message of the last failed call on this thread, or NULL. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn morrey_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn morrey_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a gallery function such as `f_lambda`, `monomial:3` or `poly:1,0.5`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out_handle` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn morrey_function_new(
    label: *const c_char,
    lambda: f64,
    out_handle: *mut *mut MorreyFunction,
) -> MorreyStatus {
    guard(|| {
        let label = text(label)?;
        let slot = out(out_handle)?;
        let f = lab(function_from_label(label, lambda))?;
        *slot = Box::into_raw(Box::new(MorreyFunction(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must come from `morrey_function_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn morrey_function_free(f: *mut MorreyFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Value and derivative at `re + i·im`.
///
/// # Safety
/// `f` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn morrey_function_eval(
    f: *const MorreyFunction,
    re: f64,
    im: f64,
    value_re: *mut f64,
    value_im: *mut f64,
    deriv_re: *mut f64,
    deriv_im: *mut f64,
) -> MorreyStatus {
    guard(|| {
        let f = &handle(f)?.0;
        let z = Complex64::new(re, im);
        if z.norm().is_nan() || z.norm() >= 1.0 {
            set_error(format!("point {z} is outside the open disc"));
            return Err(MorreyStatus::Domain);
        }
        let (v, d) = (f.value_at(z), f.deriv_at(z));
        *out(value_re)? = v.re;
        *out(value_im)? = v.im;
        *out(deriv_re)? = d.re;
        *out(deriv_im)? = d.im;
        Ok(())
    })
}

/// Seminorm supremum over a dyadic grid: arcs `2^{-k}`, `k = 0..=arc_levels`,
/// with `centers` centers each, and radii `1 - 2^{-k}`, `k = 0..=radius_levels`,
/// with `angles` angles each. `kind` is a `MorreySeminorm` value.
///
/// # Safety
/// `f` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn morrey_seminorm(
    f: *const MorreyFunction,
    kind: i32,
    lambda: f64,
    arc_levels: u32,
    centers: usize,
    radius_levels: u32,
    angles: usize,
    out_value: *mut f64,
) -> MorreyStatus {
    guard(|| {
        let f = &handle(f)?.0;
        let slot = out(out_value)?;
        let kind = match kind {
            k if k == MorreySeminorm::P1 as i32 => SeminormKind::P1,
            k if k == MorreySeminorm::P2 as i32 => SeminormKind::P2,
            k if k == MorreySeminorm::P3 as i32 => SeminormKind::P3,
            k => {
                set_error(format!("unknown seminorm kind {k}"));
                return Err(MorreyStatus::Domain);
            }
        };
        let grid = GridSpec::dyadic(0..=arc_levels, centers, 0..=radius_levels, angles);
        *slot = lab(seminorm(f, kind, lambda, &grid, &QuadratureConfig::default()))?.supremum;
        Ok(())
    })
}

/// Builds a gallery semigroup such as `rotation:1`, `dilation`, `affine` or
/// `koenigs_lambda:0.5`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out_handle` valid.
#[no_mangle]
pub unsafe extern "C" fn morrey_semigroup_new(
    label: *const c_char,
    out_handle: *mut *mut MorreySemigroup,
) -> MorreyStatus {
    guard(|| {
        let label = text(label)?;
        let slot = out(out_handle)?;
        let sg = lab(semigroup_from_label(label))?;
        *slot = Box::into_raw(Box::new(MorreySemigroup(sg)));
        Ok(())
    })
}

/// # Safety
/// `sg` must come from `morrey_semigroup_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn morrey_semigroup_free(sg: *mut MorreySemigroup) {
    if !sg.is_null() {
        drop(Box::from_raw(sg));
    }
}

/// `φ_t(z)` and `∂φ_t/∂z` at `z = re + i·im`.
///
/// # Safety
/// `sg` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn morrey_semigroup_flow(
    sg: *const MorreySemigroup,
    t: f64,
    re: f64,
    im: f64,
    value_re: *mut f64,
    value_im: *mut f64,
    deriv_re: *mut f64,
    deriv_im: *mut f64,
) -> MorreyStatus {
    guard(|| {
        let sg = &handle(sg)?.0;
        let (w, d) = lab(sg.flow_and_derivative(t, Complex64::new(re, im)))?;
        *out(value_re)? = w.re;
        *out(value_im)? = w.im;
        *out(deriv_re)? = d.re;
        *out(deriv_im)? = d.im;
        Ok(())
    })
}

/// Runs a command described by a JSON `RunConfig` (the same structure the
/// command-line tool builds) and returns its report. `out_exit_code` receives
/// the tool's exit status; the report is released with `morrey_string_free`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn morrey_run_json(
    config_json: *const c_char,
    out_report: *mut *mut c_char,
    out_exit_code: *mut i32,
) -> MorreyStatus {
    guard(|| {
        let json = text(config_json)?;
        let report_slot = out(out_report)?;
        let code_slot = out(out_exit_code)?;
        let config: RunConfig = serde_json::from_str(json).map_err(|e| {
            set_error(format!("invalid run configuration: {e}"));
            MorreyStatus::InvalidJson
        })?;
        let outcome = lab(run(&config))?;
        *code_slot = outcome.exit_code;
        *report_slot = CString::new(outcome.report).map_err(|_| MorreyStatus::Panic)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn morrey_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
