// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for the regularity of matrix semigroups.
//!
//! Finite-dimensional truncations of generators are pushed through the
//! polynomial holomorphy criteria (`semigroup`), their R-bounded
//! counterparts (`rbound`), zero-two laws for cosine families (`cosine`)
//! and the discrete L^p interpolation scale (`interp`). Every criterion is
//! reported as a measured profile with margins rather than a bare verdict.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cosine;
pub mod discpoly;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod rbound;
pub mod report;
pub mod rng;
pub mod semigroup;
pub mod space;
pub mod zoo;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use space::GridSpace;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
