// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use semilab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(semilab_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn zoo_generator_and_norms() {
    let name = CString::new("diag_ray").unwrap();
    let params = CString::new(r#"{"phi": 0.5}"#).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(semilab_generator_from_zoo(name.as_ptr(), 8, params.as_ptr(), &mut g), SemilabStatus::Ok);
        assert_eq!(semilab_generator_dim(g), 8);
        let mut v = 0.0;
        let mut lb = -1;
        assert_eq!(semilab_semigroup_norm(g, 0.3, 2.0, &mut v, &mut lb), SemilabStatus::Ok);
        assert!((v - (-0.3 * 0.5f64.cos()).exp()).abs() < 1e-10);
        assert_eq!(lb, 0);

        let t = [0.5, 0.2, 0.1];
        let mut r = 0.0;
        assert_eq!(semilab_rbound_estimate(g, t.as_ptr(), 3, 2.0, 1, 16, &mut r), SemilabStatus::Ok);
        assert!((r - (-0.1 * 0.5f64.cos()).exp()).abs() < 1e-6);
        semilab_generator_free(g);
    }
}

#[test]
fn beurling_through_handles() {
    let zero = [0.0; 4];
    let coeffs = [-1.0, 1.0];
    let mut g = ptr::null_mut();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(semilab_generator_from_matrix(2, zero.as_ptr(), zero.as_ptr(), &mut g), SemilabStatus::Ok);
        assert_eq!(semilab_polynomial_new(2, coeffs.as_ptr(), ptr::null(), &mut f), SemilabStatus::Ok);
        let mut d = 0.0;
        assert_eq!(semilab_polynomial_disc_norm(f, &mut d), SemilabStatus::Ok);
        assert!((d - 2.0).abs() < 1e-12);
        let t = [1.0, 0.1, 0.01];
        let mut vals = [9.0; 3];
        let mut margin = 0.0;
        assert_eq!(
            semilab_beurling_profile(g, f, 2.0, t.as_ptr(), 3, vals.as_mut_ptr(), &mut margin),
            SemilabStatus::Ok
        );
        // zero generator: f(T(t)) = f(1) = 0
        assert!(vals.iter().all(|v| v.abs() < 1e-14));
        assert!((margin - 2.0).abs() < 1e-12);
        semilab_polynomial_free(f);
        semilab_generator_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    unsafe {
        let bad = CString::new("nope").unwrap();
        assert_eq!(semilab_generator_from_zoo(bad.as_ptr(), 4, ptr::null(), &mut g), SemilabStatus::InvalidInput);
        assert!(last_error().contains("nope"));
        assert!(g.is_null());
        assert_eq!(semilab_generator_from_zoo(ptr::null(), 4, ptr::null(), &mut g), SemilabStatus::NullPointer);
        assert_eq!(semilab_generator_dim(ptr::null()), 0);
        semilab_generator_free(ptr::null_mut());

        let m = [0.0, 0.0, 0.0, 0.0];
        assert_eq!(semilab_generator_from_matrix(2, m.as_ptr(), ptr::null(), &mut g), SemilabStatus::Ok);
        let mut v = 0.0;
        assert_eq!(semilab_semigroup_norm(g, 1.0, 0.5, &mut v, ptr::null_mut()), SemilabStatus::InvalidInput);
        assert!(!last_error().is_empty());
        assert_eq!(semilab_semigroup_norm(g, 1.0, f64::INFINITY, &mut v, ptr::null_mut()), SemilabStatus::Ok);
        assert_eq!(last_error(), "");
        assert!((v - 1.0).abs() < 1e-14);
        semilab_generator_free(g);
    }
}

#[test]
fn run_json_report() {
    let cmd = CString::new("rbound").unwrap();
    let cfg = CString::new(r#"{"zoo": "diag_ray", "dim": 4, "seed": 3}"#).unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(semilab_run_json(cmd.as_ptr(), cfg.as_ptr(), &mut out), SemilabStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        semilab_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "rbound");
        assert_eq!(v["seed"], 3);
        let bad = CString::new(r#"{"zoo": 5}"#).unwrap();
        assert_eq!(semilab_run_json(cmd.as_ptr(), bad.as_ptr(), &mut out), SemilabStatus::InvalidInput);
        let version = CStr::from_ptr(semilab_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}
