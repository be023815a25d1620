// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Polynomials on the closed unit disc.
//!
//! Everything the holomorphy criteria need from the disc algebra: the norm
//! `‖f‖_D = max_{|z|=1} |f(z)|` with the boundary point attaining it,
//! normalization to a peak value of one, powers and their coefficient sums,
//! the class of polynomials with `|f(1)| < ‖f‖_D`, division by `ζ - z`, and
//! the Bernstein-type derivative bound for powers of trigonometric
//! polynomials.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const IN_C1_MARGIN: f64 = 1e-9;
const BRACKET_TOL: f64 = 1e-12;
const BASE_SAMPLES: usize = 4096;

/// Complex polynomial `Σ a_k z^k`, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("polynomial coefficients"));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::ZERO);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `z ↦ z`.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![Complex64::ZERO, Complex64::ONE],
        }
    }

    /// `z - 1`, the Kato–Pazy choice.
    pub fn kato_pazy() -> Self {
        Self::from_real(&[-1.0, 1.0]).expect("finite")
    }

    /// `½(z - 1)²`, the zero-two law witness.
    pub fn zero_two() -> Self {
        Self::from_real(&[0.5, -1.0, 0.5]).expect("finite")
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::ZERO
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::ZERO, |acc, a| acc * z + a)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect()).expect("finite scale")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out).unwrap_or_else(|_| Self {
            coeffs: vec![Complex64::new(f64::INFINITY, 0.0)],
        })
    }

    /// `1 - f`.
    pub fn one_minus(&self) -> Self {
        let mut c: Vec<Complex64> = self.coeffs.iter().map(|a| -a).collect();
        c[0] += Complex64::ONE;
        Self::new(c).expect("finite")
    }

    /// `z^m · f(z)`.
    pub fn shift_up(&self, m: usize) -> Self {
        let mut c = vec![Complex64::ZERO; m];
        c.extend_from_slice(&self.coeffs);
        Self::new(c).expect("finite")
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(Complex64::ZERO);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * k as f64)
                .collect(),
        )
        .expect("finite")
    }

    /// Parses a JSON coefficient list, lowest degree first. Entries are either
    /// real numbers or `[re, im]` pairs: `"[-1, 1]"`, `"[[0.5,0],[-1,0],[0.5,0]]"`.
    pub fn parse(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("polynomial '{text}': {e}")))?;
        let items = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("polynomial must be a JSON list".into()))?;
        if items.is_empty() {
            return Err(Error::InvalidInput("empty coefficient list".into()));
        }
        let bad = || Error::InvalidInput(format!("bad coefficient in '{text}'"));
        let coeffs = items
            .iter()
            .map(|it| match it {
                serde_json::Value::Number(n) => {
                    Ok(Complex64::new(n.as_f64().ok_or_else(bad)?, 0.0))
                }
                serde_json::Value::Array(pair) if pair.len() == 2 => Ok(Complex64::new(
                    pair[0].as_f64().ok_or_else(bad)?,
                    pair[1].as_f64().ok_or_else(bad)?,
                )),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Polynomial::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscNormResult {
    pub value: f64,
    pub peak: Complex64,
    /// Number of circle samples before refinement.
    pub resolution: usize,
}

/// `‖f‖_D`, by the maximum principle the maximum of `|f|` on the unit circle.
pub fn disc_norm(f: &Polynomial) -> DiscNormResult {
    let resolution = BASE_SAMPLES * (1 + f.degree() / 64);
    if f.is_zero() {
        return DiscNormResult {
            value: 0.0,
            peak: Complex64::ONE,
            resolution,
        };
    }
    if f.degree() == 0 {
        return DiscNormResult {
            value: f.coeffs[0].norm(),
            peak: Complex64::ONE,
            resolution,
        };
    }
    let step = TAU / resolution as f64;
    let modulus = |theta: f64| f.eval(Complex64::from_polar(1.0, theta)).norm();
    let samples: Vec<f64> = (0..resolution).map(|k| modulus(k as f64 * step)).collect();

    // refine around the few largest local maxima; near-ties are common for
    // symmetric polynomials
    let mut peaks: Vec<usize> = (0..resolution)
        .filter(|&k| {
            let prev = samples[(k + resolution - 1) % resolution];
            let next = samples[(k + 1) % resolution];
            samples[k] >= prev && samples[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| samples[b].total_cmp(&samples[a]));
    peaks.truncate(4);

    let mut best_theta = peaks[0] as f64 * step;
    let mut best = samples[peaks[0]];
    for &k in &peaks {
        let (theta, value) = golden_max(&modulus, (k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
        if value > best {
            best = value;
            best_theta = theta;
        }
    }
    DiscNormResult {
        value: best,
        peak: Complex64::from_polar(1.0, best_theta),
        resolution,
    }
}

fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > BRACKET_TOL {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// `f̃` with `‖f̃‖_D = 1 = f̃(peak)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub poly: Polynomial,
    pub peak: Complex64,
}

/// Rotates and scales `f` so that it peaks with value exactly one.
pub fn normalize_peak(f: &Polynomial) -> Result<Normalized> {
    if f.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let dn = disc_norm(f);
    let at_peak = f.eval(dn.peak);
    let factor = Complex64::from_polar(1.0 / dn.value, -at_peak.arg());
    Ok(Normalized {
        poly: f.scale(factor),
        peak: dn.peak,
    })
}

/// `f^N` by repeated convolution.
pub fn power_expand(f: &Polynomial, n: usize) -> Result<Polynomial> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("power N must be >= 1".into()));
    }
    let mut out = f.clone();
    for k in 2..=n {
        out = out.mul(f);
        if out.coeffs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::CoefficientOverflow(k));
        }
    }
    Ok(out)
}

/// `(lhs, rhs, ok)` of a one-sided numeric inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `Σ_k |a_{k,N}| ≤ (N·deg f + 1)·‖f‖_D^N`, the Cauchy coefficient estimate.
pub fn coeff_sum_bound_check(f: &Polynomial, n: usize) -> Result<BoundCheck> {
    let fnp = power_expand(f, n)?;
    let lhs: f64 = fnp.coeffs.iter().map(|a| a.norm()).sum();
    let rhs = (n * f.degree() + 1) as f64 * disc_norm(f).value.powi(n as i32);
    Ok(BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-9,
    })
}

/// Membership in `C₁[z]`: `|f(1)| < ‖f‖_D` with a `1e-9` margin.
pub fn in_c1(f: &Polynomial) -> bool {
    f.eval(Complex64::ONE).norm() < disc_norm(f).value - IN_C1_MARGIN
}

/// Quotient `q` with `(ζ - z)·q(z) = g(z)` and the discarded remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub quotient: Polynomial,
    pub residual: f64,
}

/// Synthetic division of `g` (typically `1 - f` with `f(ζ) = 1`) by `ζ - z`.
pub fn factor_out_root(g: &Polynomial, zeta: Complex64) -> Result<Factorization> {
    if ((zeta.norm() - 1.0).abs()) > 1e-9 {
        return Err(Error::ParameterOutOfRange(format!("|zeta| = {} != 1", zeta.norm())));
    }
    let a = &g.coeffs;
    let n = a.len() - 1;
    if n == 0 {
        let residual = a[0].norm();
        if residual > 1e-6 {
            return Err(Error::NotARoot(residual));
        }
        return Ok(Factorization {
            quotient: Polynomial::constant(Complex64::ZERO),
            residual,
        });
    }
    // g = (z - ζ)·b + r
    let mut b = vec![Complex64::ZERO; n];
    b[n - 1] = a[n];
    for k in (1..n).rev() {
        b[k - 1] = a[k] + zeta * b[k];
    }
    let residual = (a[0] + zeta * b[0]).norm();
    if residual > 1e-6 {
        return Err(Error::NotARoot(residual));
    }
    Ok(Factorization {
        quotient: Polynomial::new(b.into_iter().map(|z| -z).collect())?,
        residual,
    })
}

/// `|(d/dx)^l f̃^N(x)| ≤ (Nn)^l |f̃(x)|^{N-l}` (or `(Nn)^l` when `l > N`) for
/// `f̃(x) = f(e^{ix})` with `‖f‖_D ≤ 1`.
///
/// The tolerance is `1e-7`, relative once the right-hand side exceeds one:
/// `(Nn)^l` reaches `1e16` in the tested range, where absolute round-off in
/// the derivative sum is already of order one.
pub fn bernstein_check(f: &Polynomial, n_pow: usize, l: u32, x: f64) -> Result<BoundCheck> {
    let dn = disc_norm(f);
    if dn.value > 1.0 + 1e-9 {
        return Err(Error::ParameterOutOfRange(format!(
            "Bernstein check needs ‖f‖_D <= 1, got {}",
            dn.value
        )));
    }
    let fnp = power_expand(f, n_pow)?;
    let lhs = fnp
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let ik = Complex64::new(0.0, k as f64);
            a * ik.powu(l) * Complex64::from_polar(1.0, k as f64 * x)
        })
        .sum::<Complex64>()
        .norm();
    let nn = (n_pow * f.degree()) as f64;
    let fx = f.eval(Complex64::from_polar(1.0, x)).norm();
    let rhs = if (l as usize) <= n_pow {
        nn.powi(l as i32) * fx.powi((n_pow - l as usize) as i32)
    } else {
        nn.powi(l as i32)
    };
    Ok(BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-7 * rhs.max(1.0),
    })
}
