// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Induced operator norms on weighted `ℓ^p`.
//!
//! `p ∈ {1, 2, ∞}` (and diagonal operators for every `p`) are exact. Other
//! exponents use the nonlinear power iteration built on the duality maps of
//! `ℓ^p` and `ℓ^q`; the returned value is the best ratio `‖Ax‖/‖x‖` actually
//! evaluated, hence a certified lower bound.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::rng;
use crate::space::GridSpace;

/// Default seed for the restarts of the general-`p` iteration.
pub const DEFAULT_NORM_SEED: u64 = 0x5eed_0f9a;
const RANDOM_RESTARTS: usize = 8;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNorm {
    pub value: f64,
    /// `true` when `value` is only a lower bound.
    pub estimate: bool,
    /// A vector (in the original coordinates) with `‖Ax‖ / ‖x‖ = value`.
    #[serde(skip)]
    pub witness: Vec<Complex64>,
}

pub fn op_norm(a: &ComplexMatrix, space: &GridSpace) -> Result<OpNorm> {
    op_norm_seeded(a, space, DEFAULT_NORM_SEED)
}

pub fn op_norm_seeded(a: &ComplexMatrix, space: &GridSpace, seed: u64) -> Result<OpNorm> {
    let n = a.dim();
    if space.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: space.dim(),
        });
    }
    let p = space.p();
    crate::space::check_exponent(p)?;

    if a.is_diagonal() {
        let d = a.diagonal();
        let (k, value) = argmax(d.iter().map(|z| z.norm()));
        let mut witness = vec![Complex64::ZERO; n];
        witness[k] = Complex64::ONE;
        return Ok(OpNorm {
            value,
            estimate: false,
            witness,
        });
    }

    let w = space.weights();
    if p == 1.0 {
        let cols = (0..n).map(|j| {
            (0..n).map(|i| w[i] * a.get(i, j).norm()).sum::<f64>() / w[j]
        });
        let (j, value) = argmax(cols);
        let mut witness = vec![Complex64::ZERO; n];
        witness[j] = Complex64::ONE;
        return Ok(OpNorm {
            value,
            estimate: false,
            witness,
        });
    }
    if p.is_infinite() {
        let rows = (0..n).map(|i| (0..n).map(|j| a.get(i, j).norm()).sum::<f64>());
        let (i, value) = argmax(rows);
        let witness = (0..n)
            .map(|j| {
                let z = a.get(i, j);
                if z == Complex64::ZERO {
                    Complex64::ONE
                } else {
                    z.conj() / z.norm()
                }
            })
            .collect();
        return Ok(OpNorm {
            value,
            estimate: false,
            witness,
        });
    }

    let b = weight_conjugate(a, w, p);
    let (sigma, top) = top_singular(&b);
    if p == 2.0 {
        return Ok(OpNorm {
            value: sigma,
            estimate: false,
            witness: unweight(&top, w, p),
        });
    }

    let mut r = rng::stream(seed);
    let mut starts: Vec<Vec<Complex64>> = (0..RANDOM_RESTARTS)
        .map(|_| rng::complex_vector(&mut r, n))
        .collect();
    starts.push(top);
    let bh = b.adjoint();
    let mut best = (0.0, vec![Complex64::ZERO; n]);
    for start in starts {
        let (value, x) = power_iteration(&b, &bh, start, p);
        if value > best.0 {
            best = (value, x);
        }
    }
    Ok(OpNorm {
        value: best.0,
        estimate: true,
        witness: unweight(&best.1, w, p),
    })
}

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_diagonal() {
        return a.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    a.as_dmatrix()
        .clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
}

/// `D^{1/p} A D^{-1/p}`: turns the weighted problem into an unweighted one.
fn weight_conjugate(a: &ComplexMatrix, w: &[f64], p: f64) -> ComplexMatrix {
    let n = a.dim();
    let s: Vec<f64> = w.iter().map(|wi| wi.powf(1.0 / p)).collect();
    let m = DMatrix::from_fn(n, n, |i, j| a.get(i, j) * (s[i] / s[j]));
    ComplexMatrix { inner: m }
}

fn unweight(x: &[Complex64], w: &[f64], p: f64) -> Vec<Complex64> {
    x.iter()
        .zip(w)
        .map(|(z, wi)| z / wi.powf(1.0 / p))
        .collect()
}

fn top_singular(b: &ComplexMatrix) -> (f64, Vec<Complex64>) {
    let svd = b.as_dmatrix().clone().svd(false, true);
    let (k, sigma) = argmax(svd.singular_values.iter().copied());
    let v_t = svd.v_t.expect("requested right singular vectors");
    let v: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
    (sigma, v)
}

fn lp_norm(x: &[Complex64], p: f64) -> f64 {
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    scale
        * x.iter()
            .map(|z| (z.norm() / scale).powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
}

/// Duality map of `ℓ^p`: unit `ℓ^q` vector `y*` with `<y*, y> = ‖y‖_p`.
fn dual(y: &[Complex64], p: f64) -> Vec<Complex64> {
    let norm = lp_norm(y, p);
    if norm == 0.0 {
        return vec![Complex64::ZERO; y.len()];
    }
    y.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::ZERO
            } else {
                (z / r) * (r / norm).powf(p - 1.0)
            }
        })
        .collect()
}

fn power_iteration(
    b: &ComplexMatrix,
    bh: &ComplexMatrix,
    start: Vec<Complex64>,
    p: f64,
) -> (f64, Vec<Complex64>) {
    let q = p / (p - 1.0);
    let norm0 = lp_norm(&start, p);
    if norm0 == 0.0 {
        return (0.0, start);
    }
    let mut x: Vec<Complex64> = start.iter().map(|z| z / norm0).collect();
    let mut best = (0.0, x.clone());
    let mut prev = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let y = b.apply(&x);
        let gamma = lp_norm(&y, p) / lp_norm(&x, p);
        if gamma > best.0 {
            best = (gamma, x.clone());
        }
        let z = bh.apply(&dual(&y, p));
        let zq = lp_norm(&z, q);
        let zx: Complex64 = z.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        if zq <= zx.re * (1.0 + 1e-14) || (gamma - prev).abs() <= 1e-15 * gamma {
            break;
        }
        prev = gamma;
        x = dual(&z, q);
        if x.iter().all(|z| *z == Complex64::ZERO) {
            break;
        }
    }
    best
}
