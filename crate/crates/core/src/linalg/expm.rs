// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with the diagonal Padé(13)
//! approximant.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Numerator coefficients of the [13/13] Padé approximant to `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which Padé(13) meets double precision unscaled.
const THETA_13: f64 = 5.371_920_351_148_152;

/// `e^{tA}`. Negative `t` is allowed (groups).
pub fn mat_exp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    let n = a.dim();
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    if a.is_diagonal() {
        let d: Vec<Complex64> = a.diagonal().iter().map(|z| (z * t).exp()).collect();
        return ComplexMatrix::from_diagonal(&d);
    }
    let ta = a.as_dmatrix() * Complex64::new(t, 0.0);
    let norm = ComplexMatrix { inner: ta.clone() }.norm1();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = ta * Complex64::new(0.5f64.powi(squarings), 0.0);
    let mut r = pade13(&scaled)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    ComplexMatrix::from_dmatrix(r).map_err(|_| Error::NonFinite("matrix exponential"))
}

fn pade13(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let ident = DMatrix::<Complex64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &ident * b(1);
    let u = a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &ident * b(0);

    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).ok_or(Error::SpectrumHit {
        lambda: Complex64::ZERO,
        condition: f64::INFINITY,
    })
}
