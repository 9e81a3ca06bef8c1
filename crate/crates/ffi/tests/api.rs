use std::ffi::{CStr, CString};
use std::ptr;

use morrey_ffi::*;

fn last_error() -> String {
    let p = morrey_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn function_lifecycle_and_eval() {
    let label = CString::new("f_lambda").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { morrey_function_new(label.as_ptr(), 0.5, &mut f) }, MorreyStatus::Ok);
    assert!(morrey_last_error_message().is_null());
    let (mut vr, mut vi, mut dr, mut di) = (0.0, 0.0, 0.0, 0.0);
    let st = unsafe { morrey_function_eval(f, 0.5, 0.0, &mut vr, &mut vi, &mut dr, &mut di) };
    assert_eq!(st, MorreyStatus::Ok);
    // (1 - z)^{-1/4} and its derivative at z = 1/2
    assert!((vr - 0.5f64.powf(-0.25)).abs() < 1e-14 && vi.abs() < 1e-15);
    assert!((dr - 0.25 * 0.5f64.powf(-1.25)).abs() < 1e-13);
    let st = unsafe { morrey_function_eval(f, 1.0, 0.0, &mut vr, &mut vi, &mut dr, &mut di) };
    assert_eq!(st, MorreyStatus::Domain);
    assert!(last_error().contains("outside"));
    let mut value = 0.0;
    let st = unsafe { morrey_seminorm(f, MorreySeminorm::P3 as i32, 0.5, 4, 8, 4, 8, &mut value) };
    assert_eq!(st, MorreyStatus::Ok);
    assert!(value > 0.0 && value.is_finite());
    let st = unsafe { morrey_seminorm(f, 9, 0.5, 4, 8, 4, 8, &mut value) };
    assert_eq!(st, MorreyStatus::Domain);
    unsafe { morrey_function_free(f) };
    unsafe { morrey_function_free(ptr::null_mut()) };
}

#[test]
fn errors_are_reported() {
    let mut f = ptr::null_mut();
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { morrey_function_new(bad.as_ptr(), 0.5, &mut f) }, MorreyStatus::UnknownLabel);
    assert!(last_error().contains("f_lambda"));
    assert!(f.is_null());
    assert_eq!(unsafe { morrey_function_new(ptr::null(), 0.5, &mut f) }, MorreyStatus::NullPointer);
    let ok = CString::new("f_lambda").unwrap();
    assert_eq!(unsafe { morrey_function_new(ok.as_ptr(), 1.5, &mut f) }, MorreyStatus::Domain);
    assert_eq!(unsafe { morrey_function_new(ok.as_ptr(), 0.5, ptr::null_mut()) }, MorreyStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(
        unsafe { morrey_seminorm(ptr::null(), 3, 0.5, 2, 2, 2, 2, &mut v) },
        MorreyStatus::NullPointer
    );
}

#[test]
fn semigroup_flow() {
    let label = CString::new("dilation").unwrap();
    let mut sg = ptr::null_mut();
    assert_eq!(unsafe { morrey_semigroup_new(label.as_ptr(), &mut sg) }, MorreyStatus::Ok);
    let (mut wr, mut wi, mut dr, mut di) = (0.0, 0.0, 0.0, 0.0);
    let st = unsafe { morrey_semigroup_flow(sg, 0.7, 0.3, -0.4, &mut wr, &mut wi, &mut dr, &mut di) };
    assert_eq!(st, MorreyStatus::Ok);
    let k = (-0.7f64).exp();
    assert!((wr - 0.3 * k).abs() < 1e-15 && (wi + 0.4 * k).abs() < 1e-15);
    assert!((dr - k).abs() < 1e-15 && di == 0.0);
    let st = unsafe { morrey_semigroup_flow(sg, -1.0, 0.3, 0.0, &mut wr, &mut wi, &mut dr, &mut di) };
    assert_eq!(st, MorreyStatus::Domain);
    unsafe { morrey_semigroup_free(sg) };
}

#[test]
fn run_json_matches_cli() {
    let config = morrey_core::cli::RunConfig::new(morrey_core::cli::Command::Gallery);
    let json = CString::new(serde_json::to_string(&config).unwrap()).unwrap();
    let mut report = ptr::null_mut();
    let mut code = -1;
    assert_eq!(unsafe { morrey_run_json(json.as_ptr(), &mut report, &mut code) }, MorreyStatus::Ok);
    assert_eq!(code, 0);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    assert_eq!(text, morrey_core::cli::run(&config).unwrap().report);
    unsafe { morrey_string_free(report) };
    let bad = CString::new("{\"command\": 3}").unwrap();
    assert_eq!(unsafe { morrey_run_json(bad.as_ptr(), &mut report, &mut code) }, MorreyStatus::InvalidJson);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(morrey_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
