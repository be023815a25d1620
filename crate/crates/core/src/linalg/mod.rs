// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra: the substrate for every other module.

mod expm;
mod norm;
mod quadrature;

pub use expm::mat_exp;
pub use norm::{op_norm, op_norm_seeded, spectral_norm, OpNorm, DEFAULT_NORM_SEED};
pub use quadrature::{
    contour_integral, gauss_legendre, quad_strong_integral, ContourSpec, QuadOutcome, Segment,
    NODE_CAP, PANEL_NODES,
};

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Condition-number cap beyond which `λ - A` counts as singular.
pub const CONDITION_CAP: f64 = 1e12;

/// Dense square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if inner.nrows() != inner.ncols() {
            return Err(Error::DimensionMismatch {
                expected: inner.nrows(),
                got: inner.ncols(),
            });
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { inner })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &c)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "identity of dimension zero");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero matrix of dimension zero");
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        Self::from_dmatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        self.inner.transpose().as_slice().to_vec()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.inner[(i, j)] == Complex64::ZERO))
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.inner.diagonal().iter().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            inner: &self.inner * c,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self + c·I`.
    pub fn shift(&self, c: Complex64) -> Self {
        let mut inner = self.inner.clone();
        for i in 0..self.dim() {
            inner[(i, i)] += c;
        }
        Self { inner }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "matmul dimension mismatch");
        let n = self.dim();
        // diagonal factors reduce to row/column scaling
        if self.is_diagonal() {
            let mut out = other.inner.clone();
            for i in 0..n {
                let d = self.inner[(i, i)];
                out.row_mut(i).iter_mut().for_each(|z| *z *= d);
            }
            return Self { inner: out };
        }
        if other.is_diagonal() {
            let mut out = self.inner.clone();
            for j in 0..n {
                let d = other.inner[(j, j)];
                out.column_mut(j).iter_mut().for_each(|z| *z *= d);
            }
            return Self { inner: out };
        }
        Self {
            inner: &self.inner * &other.inner,
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim(), "apply dimension mismatch");
        let v = DVector::from_column_slice(x);
        (&self.inner * v).as_slice().to_vec()
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, k: usize) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub fn frobenius(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum column sum.
    pub fn norm1(&self) -> f64 {
        self.inner
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum row sum.
    pub fn norm_inf(&self) -> f64 {
        self.inner
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn norm2(&self) -> f64 {
        spectral_norm(self)
    }

    /// Inverse by LU with partial pivoting; `SpectrumHit` (with `lambda`
    /// recorded for context) when the 1-norm condition exceeds [`CONDITION_CAP`].
    pub fn inverse_near(&self, lambda: Complex64) -> Result<Self> {
        if self.is_diagonal() {
            let d = self.diagonal();
            let max = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let min = d.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            let condition = if min == 0.0 { f64::INFINITY } else { max / min };
            if !(condition <= CONDITION_CAP) {
                return Err(Error::SpectrumHit { lambda, condition });
            }
            let inv: Vec<Complex64> = d.iter().map(|z| z.inv()).collect();
            return Self::from_diagonal(&inv);
        }
        let lu = self.inner.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::SpectrumHit {
            lambda,
            condition: f64::INFINITY,
        })?;
        let inv = Self { inner: inv };
        let condition = self.norm1() * inv.norm1();
        if !inv.is_finite() || !(condition <= CONDITION_CAP) {
            return Err(Error::SpectrumHit { lambda, condition });
        }
        Ok(inv)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_near(Complex64::ZERO)
    }

    /// `S A S^{-1}`.
    pub fn conjugate_by(&self, s: &Self) -> Result<Self> {
        Ok(s.matmul(self).matmul(&s.inverse()?))
    }
}

/// `R(λ, A) = (λ - A)^{-1}`.
pub fn resolvent(a: &ComplexMatrix, lambda: Complex64) -> Result<ComplexMatrix> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::NonFinite("lambda"));
    }
    a.scale_real(-1.0).shift(lambda).inverse_near(lambda)
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Serialized as `{"dim": n, "entries": [[re, im], ...]}` in row-major order.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            dim: usize,
            entries: Vec<[f64; 2]>,
        }
        Repr {
            dim: self.dim(),
            entries: self.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            entries: Vec<[f64; 2]>,
        }
        let r = Repr::deserialize(d)?;
        let e: Vec<Complex64> = r.entries.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        ComplexMatrix::from_row_major(r.dim, &e).map_err(serde::de::Error::custom)
    }
}
