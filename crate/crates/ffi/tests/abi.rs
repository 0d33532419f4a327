use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cliffpde_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { cp_string_free(p) };
    s
}

fn parse(text: &str, m: usize) -> *mut CpMultivector {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cp_multivector_parse(c.as_ptr(), m, &mut out) }, CpStatus::Ok);
    out
}

#[test]
fn generator_squares_to_minus_one() {
    let e1 = parse("1*e{1}", 3);
    let mut sq = ptr::null_mut();
    assert_eq!(unsafe { cp_multivector_product(e1, e1, &mut sq) }, CpStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { cp_multivector_to_string(sq, &mut text) }, CpStatus::Ok);
    assert_eq!(take_string(text), "-1*e{}");
    unsafe {
        cp_multivector_free(e1);
        cp_multivector_free(sq);
    }
}

#[test]
fn reversion_of_bivector_flips_sign() {
    let b = parse("2/3*e{1,2}", 4);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cp_multivector_reversion(b, &mut r) }, CpStatus::Ok);
    let mut text = ptr::null_mut();
    unsafe { cp_multivector_to_string(r, &mut text) };
    assert_eq!(take_string(text), "-2/3*e{1,2}");
    unsafe {
        cp_multivector_free(b);
        cp_multivector_free(r);
    }
}

#[test]
fn parse_errors_set_message() {
    let c = CString::new("3 e1").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cp_multivector_parse(c.as_ptr(), 3, &mut out) }, CpStatus::Parse);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(cp_last_error()) }.to_str().unwrap();
    assert!(msg.contains("parse"), "{msg}");
    let mut dims = CpDims::default();
    assert_eq!(unsafe { cp_dims(3, 1, &mut dims) }, CpStatus::Ok);
    assert!(cp_last_error().is_null());
}

#[test]
fn null_arguments_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cp_multivector_parse(ptr::null(), 3, &mut out) }, CpStatus::NullPointer);
    assert_eq!(unsafe { cp_dims(3, 1, ptr::null_mut()) }, CpStatus::NullPointer);
    assert_eq!(
        unsafe { cp_multivector_product(ptr::null(), ptr::null(), &mut out) },
        CpStatus::NullPointer
    );
    unsafe {
        cp_string_free(ptr::null_mut());
        cp_multivector_free(ptr::null_mut());
    }
}

#[test]
fn dims_match_library() {
    let mut d = CpDims::default();
    assert_eq!(unsafe { cp_dims(3, 2, &mut d) }, CpStatus::Ok);
    assert_eq!(
        d,
        CpDims {
            dim_hk: 5,
            rank_mk: 3,
            rank_mk_minus_1: 2
        }
    );
    assert_eq!(unsafe { cp_dims(2, 2, &mut d) }, CpStatus::InvalidArgument);
}

#[test]
fn verify_suite_reports_json() {
    let suite = CString::new("green-scalar").unwrap();
    let mut json = ptr::null_mut();
    let mut passed = 0;
    let status = unsafe { cp_verify_json(suite.as_ptr(), 3, 1, 7, 2, &mut json, &mut passed) };
    assert_eq!(status, CpStatus::Ok);
    assert_eq!(passed, 1);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert!(v.is_object());

    let bad = CString::new("nope").unwrap();
    let status = unsafe { cp_verify_json(bad.as_ptr(), 3, 1, 7, 2, &mut json, &mut passed) };
    assert_eq!(status, CpStatus::InvalidArgument);
}

#[test]
fn kernel_json_has_slots() {
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cp_kernel_json(CpKernelKind::Zonal, 3, 1, &mut json) }, CpStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["kind"], "ZONAL");
    assert_eq!(v["slots"], serde_json::json!(["v", "u"]));
    assert_eq!(v["omega_pow"], -1);
}

#[test]
fn calibration_in_dimension_four_is_reported() {
    let mut c = 0.0;
    assert_eq!(unsafe { cp_calibrate(4, 1, &mut c) }, CpStatus::Uncalibrated);
    assert!(!cp_last_error().is_null());
}

#[test]
fn header_compiles_and_links_from_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "cliffpde.h"
int main(void) {
    CpMultivector *a = NULL, *p = NULL;
    char *s = NULL;
    CpDims d;
    if (cp_multivector_parse("1*e{1,2}", 3, &a) != CP_STATUS_OK) return 1;
    if (cp_multivector_product(a, a, &p) != CP_STATUS_OK) return 2;
    if (cp_multivector_to_string(p, &s) != CP_STATUS_OK) return 3;
    if (strcmp(s, "-1*e{}") != 0) return 4;
    cp_string_free(s);
    cp_multivector_free(a);
    cp_multivector_free(p);
    if (cp_dims(4, 2, &d) != CP_STATUS_OK || d.dim_hk != 9) return 5;
    if (cp_multivector_parse("x", 3, &a) != CP_STATUS_PARSE || cp_last_error() == NULL) return 6;
    puts("ok");
    return 0;
}
"#,
    )
    .unwrap();
    // the test binary lives in target/<profile>/deps; the static library one level up
    let exe_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = exe_dir.join("libcliffpde_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let out = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
