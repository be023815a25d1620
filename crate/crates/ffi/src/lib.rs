// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for semilab.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released by the matching `*_free`. Every fallible call
//! returns a [`SemilabStatus`]; on failure a message is available from
//! [`semilab_last_error`] on the same thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use semilab::cli::{run, ExperimentConfig};
use semilab::discpoly::{disc_norm, Polynomial};
use semilab::linalg::{op_norm, ComplexMatrix};
use semilab::rbound::{rbound_estimate, RademacherConfig};
use semilab::semigroup::{beurling_profile, GeneratorSpec};
use semilab::zoo::{self, ZooParams};
use semilab::{Complex64, Error, GridSpace};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemilabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// Opaque generator handle.
pub struct SemilabGenerator {
    inner: GeneratorSpec,
}

/// Opaque polynomial handle.
pub struct SemilabPolynomial {
    inner: Polynomial,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SemilabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_numerical() {
            SemilabStatus::Numerical
        } else if matches!(e.root(), Error::Io(_)) {
            SemilabStatus::Io
        } else {
            SemilabStatus::InvalidInput
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SemilabStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SemilabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SemilabStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SemilabStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SemilabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn complex(re: *const f64, im: *const f64, n: usize) -> Result<Vec<Complex64>, Failure> {
    let re = slice(re, n, "re")?;
    let im = if im.is_null() { None } else { Some(slice(im, n, "im")?) };
    Ok((0..n)
        .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect())
}

unsafe fn out<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn semilab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn semilab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a zoo generator. `params_json` may be null or a JSON object such
/// as `{"phi": 0.5}`.
///
/// # Safety
/// `name` and `params_json` must be null or NUL-terminated strings; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn semilab_generator_from_zoo(
    name: *const c_char,
    dim: usize,
    params_json: *const c_char,
    out_gen: *mut *mut SemilabGenerator,
) -> SemilabStatus {
    guard(|| {
        let name = text(name, "name")?;
        let params: ZooParams = if params_json.is_null() {
            ZooParams::default()
        } else {
            serde_json::from_str(text(params_json, "params_json")?)
                .map_err(|e| Failure(SemilabStatus::InvalidInput, e.to_string()))?
        };
        let g = zoo::build(name, dim, &params)?;
        out(out_gen, Box::into_raw(Box::new(SemilabGenerator { inner: g })), "out_gen")
    })
}

/// Builds a generator from a row-major `dim × dim` matrix; `im` may be null
/// for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim*dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn semilab_generator_from_matrix(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out_gen: *mut *mut SemilabGenerator,
) -> SemilabStatus {
    guard(|| {
        let entries = complex(re, im, dim.checked_mul(dim).ok_or_else(|| Failure(SemilabStatus::InvalidInput, "dim overflow".into()))?)?;
        let m = ComplexMatrix::from_row_major(dim, &entries)?;
        let g = GeneratorSpec::new(m, "matrix");
        out(out_gen, Box::into_raw(Box::new(SemilabGenerator { inner: g })), "out_gen")
    })
}

/// Dimension of a generator, or 0 for null.
///
/// # Safety
/// `gen` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn semilab_generator_dim(gen: *const SemilabGenerator) -> usize {
    gen.as_ref().map_or(0, |g| g.inner.dim())
}

/// # Safety
/// `gen` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semilab_generator_free(gen: *mut SemilabGenerator) {
    if !gen.is_null() {
        drop(Box::from_raw(gen));
    }
}

/// Polynomial from `n` coefficients, lowest degree first; `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn semilab_polynomial_new(
    n: usize,
    re: *const f64,
    im: *const f64,
    out_poly: *mut *mut SemilabPolynomial,
) -> SemilabStatus {
    guard(|| {
        let f = Polynomial::new(complex(re, im, n)?)?;
        out(out_poly, Box::into_raw(Box::new(SemilabPolynomial { inner: f })), "out_poly")
    })
}

/// # Safety
/// `poly` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semilab_polynomial_free(poly: *mut SemilabPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Supremum of `|f|` over the closed unit disc.
///
/// # Safety
/// `poly` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn semilab_polynomial_disc_norm(poly: *const SemilabPolynomial, out_value: *mut f64) -> SemilabStatus {
    guard(|| {
        let f = handle(poly, "poly")?;
        out(out_value, disc_norm(&f.inner).value, "out_value")
    })
}

fn space(dim: usize, p: f64) -> Result<GridSpace, Failure> {
    Ok(GridSpace::unit(dim, p)?)
}

/// `‖e^{tA}‖` in unit-weight `ℓ^p` (`p = INFINITY` allowed). If
/// `out_lower_bound` is non-null it receives 1 when the value is only a
/// lower bound.
///
/// # Safety
/// `gen` must be a live handle, `out_value` writable, `out_lower_bound`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn semilab_semigroup_norm(
    gen: *const SemilabGenerator,
    t: f64,
    p: f64,
    out_value: *mut f64,
    out_lower_bound: *mut i32,
) -> SemilabStatus {
    guard(|| {
        let g = &handle(gen, "gen")?.inner;
        let n = op_norm(&g.at(t)?, &space(g.dim(), p)?)?;
        if !out_lower_bound.is_null() {
            out_lower_bound.write(n.estimate as i32);
        }
        out(out_value, n.value, "out_value")
    })
}

/// Writes `‖f(T(t_i))‖_p` for the decreasing grid `t` into `out_values`
/// (length `n`) and the margin `‖f‖_D - limsup` into `out_margin`.
///
/// # Safety
/// Handles must be live; `t` and `out_values` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn semilab_beurling_profile(
    gen: *const SemilabGenerator,
    poly: *const SemilabPolynomial,
    p: f64,
    t: *const f64,
    n: usize,
    out_values: *mut f64,
    out_margin: *mut f64,
) -> SemilabStatus {
    guard(|| {
        let g = &handle(gen, "gen")?.inner;
        let f = &handle(poly, "poly")?.inner;
        let grid = slice(t, n, "t")?;
        if out_values.is_null() {
            return Err(null("out_values"));
        }
        let prof = beurling_profile(g, f, grid, &space(g.dim(), p)?)?;
        std::slice::from_raw_parts_mut(out_values, n).copy_from_slice(&prof.values);
        out(out_margin, prof.margin, "out_margin")
    })
}

/// Certified lower bound for the R-bound of `{e^{t_i A}}` in unit-weight
/// `ℓ^p`, exact Rademacher averages, `budget` random selections.
///
/// # Safety
/// `gen` must be live; `t` must hold `n` doubles; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn semilab_rbound_estimate(
    gen: *const SemilabGenerator,
    t: *const f64,
    n: usize,
    p: f64,
    seed: u64,
    budget: usize,
    out_value: *mut f64,
) -> SemilabStatus {
    guard(|| {
        let g = &handle(gen, "gen")?.inner;
        let family = slice(t, n, "t")?
            .iter()
            .map(|t| g.at(*t))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = RademacherConfig::exact(p).with_seed(seed);
        let est = rbound_estimate(&family, &space(g.dim(), p)?, &cfg, budget)?;
        out(out_value, est.value, "out_value")
    })
}

/// Runs a CLI experiment (`command` as on the command line, e.g.
/// `"beurling"`) from a JSON config and returns the JSON report in
/// `out_json`, to be released with [`semilab_string_free`].
///
/// # Safety
/// Strings must be NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn semilab_run_json(
    command: *const c_char,
    config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> SemilabStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json(text(command, "command")?, text(config_json, "config_json")?)?;
        let report = run(&cfg)?.to_json()?;
        let c = CString::new(report).map_err(|e| Failure(SemilabStatus::InvalidInput, e.to_string()))?;
        out(out_json, c.into_raw(), "out_json")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semilab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

