// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Cosine families `C(t)` with `C'' = AC`, `C(0) = I`, `C'(0) = 0`, and their
//! sine functions `S(t) = ∫_0^t C(s) ds`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discpoly::{power_expand, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{mat_exp, op_norm, quad_strong_integral, resolvent, ComplexMatrix};
use crate::semigroup::{dichotomy, horner, smallest_decade_max, validate_t_grid, Dichotomy, Growth, FAIL_THRESHOLD};
use crate::space::GridSpace;

/// Largest shared s-grid used by [`fattorini_series`].
pub const FATTORINI_MAX_NODES: usize = 1 << 12;
/// Largest horizon tried by [`laplace_transform_check`].
pub const LAPLACE_HORIZON_CAP: f64 = 4096.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineFamily {
    pub generator: ComplexMatrix,
    /// Group generator `B` with `B² = A`, when built from a group.
    pub group: Option<ComplexMatrix>,
}

/// `(cosh(t√a), sinh(t√a)/√a)`; both are even in `√a`, so the branch is irrelevant.
fn scalar_cos_sin(a: Complex64, t: f64) -> (Complex64, Complex64) {
    let r = a.sqrt();
    let x = r * t;
    let c = x.cosh();
    let s = if x.norm() < 1e-4 {
        // sinh(x)/x = 1 + x²/6 + x⁴/120
        let x2 = x * x;
        (1.0 + x2 / 6.0 + x2 * x2 / 120.0) * t
    } else {
        x.sinh() / r
    };
    (c, s)
}

impl CosineFamily {
    /// `(C(t), S(t))`; `t = 0` returns `(I, 0)` exactly.
    pub fn sample(&self, t: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let a = &self.generator;
        let d = a.dim();
        if t == 0.0 {
            return Ok((ComplexMatrix::identity(d), ComplexMatrix::zeros(d)));
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("t"));
        }
        if a.is_diagonal() {
            let (c, s): (Vec<_>, Vec<_>) = a.diagonal().into_iter().map(|x| scalar_cos_sin(x, t)).unzip();
            return Ok((ComplexMatrix::from_diagonal(&c)?, ComplexMatrix::from_diagonal(&s)?));
        }
        let block = ComplexMatrix::from_fn(2 * d, |i, j| match (i < d, j < d) {
            (true, false) if j - d == i => Complex64::ONE,
            (false, true) => a.get(i - d, j),
            _ => Complex64::ZERO,
        })?;
        let e = mat_exp(&block, t)?;
        let c = ComplexMatrix::from_fn(d, |i, j| e.get(i, j))?;
        let s = ComplexMatrix::from_fn(d, |i, j| e.get(i, d + j))?;
        Ok((c, s))
    }

    /// `C(t)`; families from a group use `(e^{tB} + e^{-tB})/2`.
    pub fn cos(&self, t: f64) -> Result<ComplexMatrix> {
        match &self.group {
            Some(b) if t != 0.0 => Ok((&mat_exp(b, t)? + &mat_exp(b, -t)?).scale_real(0.5)),
            _ => Ok(self.sample(t)?.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }
}

pub fn cosine_from_generator(a: &ComplexMatrix) -> Result<CosineFamily> {
    if !a.is_finite() {
        return Err(Error::NonFinite("generator"));
    }
    Ok(CosineFamily {
        generator: a.clone(),
        group: None,
    })
}

pub fn cosine_from_group(b: &ComplexMatrix) -> Result<CosineFamily> {
    if !b.is_finite() {
        return Err(Error::NonFinite("group generator"));
    }
    Ok(CosineFamily {
        generator: b.matmul(b),
        group: Some(b.clone()),
    })
}

/// Relative residual of `C'' = AC` at `t` by central differences with step
/// `1e-4/√(1 + ‖A‖₂)`.
pub fn generator_residual(fam: &CosineFamily, t: f64) -> Result<f64> {
    let a = &fam.generator;
    let h = 1e-4 / (1.0 + a.norm2()).sqrt();
    let c = fam.cos(t)?;
    let second = (&(&fam.cos(t + h)? + &fam.cos(t - h)?) - &c.scale_real(2.0)).scale_real(1.0 / (h * h));
    let ac = a.matmul(&c);
    Ok((&second - &ac).norm2() / (1.0 + ac.norm2()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DalembertCheck {
    pub residual: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// `‖2C(t)C(s) - C(t+s) - C(t-s)‖₂` against `1e-8·(1 + ‖C(t)‖₂‖C(s)‖₂)`.
pub fn dalembert_residual(fam: &CosineFamily, t: f64, s: f64) -> Result<DalembertCheck> {
    let ct = fam.cos(t)?;
    let cs = fam.cos(s)?;
    let lhs = ct.matmul(&cs).scale_real(2.0);
    let rhs = &fam.cos(t + s)? + &fam.cos(t - s)?;
    let residual = (&lhs - &rhs).norm2();
    let tolerance = 1e-8 * (1.0 + ct.norm2() * cs.norm2());
    Ok(DalembertCheck {
        residual,
        tolerance,
        ok: residual <= tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub residual: f64,
    pub horizon: f64,
    /// Growth rate estimated from `‖C(t)‖` samples.
    pub omega: f64,
}

/// `ω ≈ max_t log‖C(t)‖/t` over `t ∈ {1, 2, 4, …, 64}`.
pub fn growth_rate(fam: &CosineFamily) -> Result<f64> {
    let mut w: f64 = 0.0;
    for k in 0..7 {
        let t = (1u32 << k) as f64;
        w = w.max(fam.cos(t)?.norm2().ln() / t);
    }
    Ok(w)
}

/// Compares `λR(λ², A)` with `∫_0^H e^{-λt} C(t) dt`, where the horizon `H`
/// is the first power of two with `‖e^{-λt}C(t)‖ < 1e-12` on `[H, 2H]`.
pub fn laplace_transform_check(fam: &CosineFamily, lambda: f64, horizon_cap: f64) -> Result<LaplaceCheck> {
    let omega = growth_rate(fam)?;
    if !(lambda > omega) {
        return Err(Error::ParameterOutOfRange(format!(
            "lambda = {lambda} must exceed the growth rate {omega}"
        )));
    }
    let lhs = resolvent(&fam.generator, Complex64::new(lambda * lambda, 0.0))?.scale_real(lambda);
    let tail = |h: f64| -> Result<f64> {
        let mut m: f64 = 0.0;
        for k in 0..=8 {
            let t = h * (1.0 + k as f64 / 8.0);
            m = m.max((-lambda * t).exp() * fam.cos(t)?.norm2());
        }
        Ok(m)
    };
    let mut horizon = 1.0;
    let mut last = tail(horizon)?;
    while last >= 1e-12 {
        horizon *= 2.0;
        if horizon > horizon_cap {
            return Err(Error::TailTooFat(last));
        }
        last = tail(horizon)?;
    }
    let integral = quad_strong_integral(
        |t| Ok(fam.cos(t)?.scale_real((-lambda * t).exp())),
        0.0,
        horizon,
    )?;
    Ok(LaplaceCheck {
        residual: (&lhs - &integral.value).norm2(),
        horizon,
        omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroTwoVerdict {
    UniformlyContinuous,
    HypothesisFailsInLimit,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTwoEntry {
    pub dim: usize,
    pub values: Vec<f64>,
    pub plateau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTwoReport {
    pub t_grid: Vec<f64>,
    pub entries: Vec<ZeroTwoEntry>,
    pub fit: Dichotomy,
    pub verdict: ZeroTwoVerdict,
}

/// Profiles of `‖C(t) - I‖` per truncation. Families whose dimension differs
/// from `space` are measured in the unit-weight space with the same `p`.
pub fn zero_two_profile(
    families: &[(usize, CosineFamily)],
    t_grid: &[f64],
    space: &GridSpace,
) -> Result<ZeroTwoReport> {
    validate_t_grid(t_grid)?;
    if families.is_empty() {
        return Err(Error::InvalidInput("no cosine families".into()));
    }
    let mut entries = Vec::with_capacity(families.len());
    for (dim, fam) in families {
        let sp = if fam.dim() == space.dim() {
            space.clone()
        } else {
            GridSpace::unit(fam.dim(), space.p())?
        };
        let values: Vec<f64> = t_grid
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let c = fam.cos(*t)?.shift(-Complex64::ONE);
                Ok(op_norm(&c, &sp)?.value).map_err(|e: Error| e.at(i, *t))
            })
            .collect::<Result<_>>()?;
        entries.push(ZeroTwoEntry {
            dim: *dim,
            plateau: smallest_decade_max(t_grid, &values),
            values,
        });
    }
    let points: Vec<(usize, f64)> = entries.iter().map(|e| (e.dim, e.plateau)).collect();
    let fit = dichotomy(&points, 2.0)?;
    let last = entries.iter().max_by_key(|e| e.dim).map(|e| e.plateau).unwrap_or(0.0);
    let verdict = if last >= 2.0 - FAIL_THRESHOLD {
        ZeroTwoVerdict::HypothesisFailsInLimit
    } else if last <= FAIL_THRESHOLD {
        ZeroTwoVerdict::UniformlyContinuous
    } else {
        ZeroTwoVerdict::Undetermined
    };
    Ok(ZeroTwoReport {
        t_grid: t_grid.to_vec(),
        entries,
        fit,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTwoWitness {
    pub n: usize,
    pub t_grid: Vec<f64>,
    /// `‖f^N(U(t))‖` with `f = ½(z - 1)²`, as a polynomial in `U(t)`.
    pub values: Vec<f64>,
    /// The same quantity as `‖U(Nt)(C(t) - I)^N‖`.
    pub factorized: Vec<f64>,
    /// `M e^{ωNt} ‖C(t) - I‖^N`.
    pub bounds: Vec<f64>,
    /// Largest `‖poly - factorized‖₂` relative to the Horner scale
    /// `Σ_k |c_k| ‖U(t)‖₂^k` of the polynomial evaluation.
    pub max_rel_diff: f64,
    pub bound_ok: bool,
}

/// Evaluates `f^N(U(t))` for `f = ½(z - 1)²` in two orders, together with
/// the growth bound `M e^{ωNt}‖C(t) - I‖^N`.
pub fn zero_two_polynomial_witness(
    b: &ComplexMatrix,
    growth: Growth,
    t_grid: &[f64],
    space: &GridSpace,
    n: usize,
) -> Result<ZeroTwoWitness> {
    if b.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            got: space.dim(),
        });
    }
    let fam = cosine_from_group(b)?;
    let fnp = power_expand(&Polynomial::zero_two(), n)?;
    let abs_coeffs: Vec<f64> = fnp.coeffs().iter().map(|c| c.norm()).collect();
    let rows: Vec<(f64, f64, f64, f64)> = t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let u = mat_exp(b, t)?;
            let poly = horner(&fnp, &u);
            let cm = fam.cos(t)?.shift(-Complex64::ONE);
            let fact = mat_exp(b, n as f64 * t)?.matmul(&cm.powi(n));
            let un = u.norm2();
            let scale: f64 = abs_coeffs.iter().enumerate().map(|(k, c)| c * un.powi(k as i32)).sum();
            let rel = (&poly - &fact).norm2() / scale;
            let bound = growth.m * (growth.omega * n as f64 * t).exp() * op_norm(&cm, space)?.value.powi(n as i32);
            Ok((op_norm(&poly, space)?.value, op_norm(&fact, space)?.value, bound, rel))
        }
        .map_err(|e: Error| e.at(i, t)))
        .collect::<Result<_>>()?;
    Ok(ZeroTwoWitness {
        n,
        t_grid: t_grid.to_vec(),
        values: rows.iter().map(|r| r.0).collect(),
        factorized: rows.iter().map(|r| r.1).collect(),
        bound_ok: rows.iter().all(|r| r.1 <= r.2 * (1.0 + 1e-9) + 1e-12),
        bounds: rows.iter().map(|r| r.2).collect(),
        max_rel_diff: rows.iter().map(|r| r.3).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FattoriniResult {
    pub t: f64,
    pub omega: f64,
    /// `Σ_{n ≤ m} (-ω)^n C_n(t)` for `m = 0..=n_max`.
    pub partial_sums: Vec<ComplexMatrix>,
    /// `‖C_n(t)‖₂`.
    pub term_norms: Vec<f64>,
    /// `M e^{ωt} t^{2n}/(2n)!`.
    pub term_bounds: Vec<f64>,
    pub m: f64,
    pub bound_ok: bool,
    pub nodes: usize,
    /// `‖final partial sum - C_{A-ω}(t)‖₂`.
    pub reference_residual: f64,
}

/// Weights of an order-4 composite rule on `j` equal intervals of width `h`:
/// Simpson, with a closing 3/8 panel when `j` is odd, trapezoid for `j = 1`.
fn composite_weights(j: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; j + 1];
    match j {
        0 => {}
        1 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
        }
        _ => {
            let simpson = if j.is_multiple_of(2) { j } else { j - 3 };
            let mut k = 0;
            while k < simpson {
                w[k] += h / 3.0;
                w[k + 1] += 4.0 * h / 3.0;
                w[k + 2] += h / 3.0;
                k += 2;
            }
            if j % 2 == 1 {
                for (o, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[simpson + o] += 3.0 * h / 8.0 * c;
                }
            }
        }
    }
    w
}

/// `C_n(s_j)` for all `n ≤ n_max` and grid points `s_j = j t/J`.
fn fattorini_terms(
    cs: &[(ComplexMatrix, ComplexMatrix)],
    n_max: usize,
    h: f64,
) -> Vec<Vec<ComplexMatrix>> {
    let nodes = cs.len();
    let mut terms: Vec<Vec<ComplexMatrix>> = vec![cs.iter().map(|c| c.0.clone()).collect()];
    for _ in 1..=n_max {
        let prev = terms.last().expect("C_0 present");
        let next: Vec<ComplexMatrix> = (0..nodes)
            .into_par_iter()
            .map(|j| {
                let w = composite_weights(j, h);
                let mut acc = ComplexMatrix::zeros(cs[0].0.dim());
                for (i, wi) in w.iter().enumerate() {
                    // S(s_j - s_i) C_{n-1}(s_i)
                    if *wi != 0.0 && j > i {
                        acc = &acc + &cs[j - i].1.matmul(&prev[i]).scale_real(*wi);
                    }
                }
                acc
            })
            .collect();
        terms.push(next);
    }
    terms
}

/// Fattorini's series `Σ (-ω)^n C_n(t)` for the family of `A - ω`, with
/// `C_0 = C` and `C_n(t) = ∫_0^t S(t - s) C_{n-1}(s) ds` on a shared grid,
/// doubled from `quad_nodes` until the final partial sum moves by `< 1e-6`.
pub fn fattorini_series(
    fam: &CosineFamily,
    omega: f64,
    n_max: usize,
    t: f64,
    quad_nodes: usize,
) -> Result<FattoriniResult> {
    if !(omega >= 0.0 && omega.is_finite()) || n_max == 0 || !(t >= 0.0 && t.is_finite()) {
        return Err(Error::ParameterOutOfRange("need omega >= 0, n_max >= 1, t >= 0".into()));
    }
    let d = fam.dim();
    let reference = cosine_from_generator(&fam.generator.shift(Complex64::new(-omega, 0.0)))?.sample(t)?.0;
    let mut intervals = quad_nodes.max(4);
    let mut prev: Option<ComplexMatrix> = None;
    loop {
        let h = t / intervals as f64;
        let cs: Vec<(ComplexMatrix, ComplexMatrix)> = (0..=intervals)
            .into_par_iter()
            .map(|j| fam.sample(j as f64 * h))
            .collect::<Result<_>>()?;
        let terms = fattorini_terms(&cs, n_max, h);
        let at_t: Vec<&ComplexMatrix> = terms.iter().map(|v| &v[intervals]).collect();
        let mut partial_sums = Vec::with_capacity(n_max + 1);
        let mut acc = ComplexMatrix::zeros(d);
        for (n, c) in at_t.iter().enumerate() {
            acc = &acc + &c.scale_real((-omega).powi(n as i32));
            partial_sums.push(acc.clone());
        }
        let change = prev.as_ref().map(|p| (p - &acc).norm2());
        if t == 0.0 || change.is_some_and(|c| c < 1e-6) {
            let last = at_t[n_max].norm2() * omega.powi(n_max as i32);
            let sum_norm = acc.norm2().max(f64::MIN_POSITIVE);
            if last / sum_norm > 1e-4 {
                return Err(Error::SeriesNotConverged(last / sum_norm));
            }
            let m = cs.iter().map(|c| c.0.norm2()).fold(0.0, f64::max) * (1.0 + 1e-6);
            let term_norms: Vec<f64> = at_t.iter().map(|c| c.norm2()).collect();
            let mut fact = 1.0;
            let term_bounds: Vec<f64> = (0..=n_max)
                .map(|n| {
                    if n > 0 {
                        fact *= ((2 * n - 1) * (2 * n)) as f64;
                    }
                    m * (omega * t).exp() * t.powi(2 * n as i32) / fact
                })
                .collect();
            let bound_ok = term_norms.iter().zip(&term_bounds).all(|(v, b)| *v <= b + 1e-8);
            return Ok(FattoriniResult {
                t,
                omega,
                reference_residual: (&acc - &reference).norm2(),
                partial_sums,
                term_norms,
                term_bounds,
                m,
                bound_ok,
                nodes: intervals + 1,
            });
        }
        if 2 * intervals > FATTORINI_MAX_NODES {
            let c = change.unwrap_or(f64::INFINITY);
            return Err(Error::QuadratureDivergence {
                nodes: intervals + 1,
                relative_change: c / acc.norm2().max(f64::MIN_POSITIVE),
            });
        }
        prev = Some(acc);
        intervals *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::log_grid;
    use crate::{c64, rng};

    fn diag(v: &[f64]) -> ComplexMatrix {
        let c: Vec<Complex64> = v.iter().map(|x| c64(*x, 0.0)).collect();
        ComplexMatrix::from_diagonal(&c).unwrap()
    }

    fn random(r: &mut rng::Stream, d: usize, scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(d, |_, _| rng::complex_normal(r).scale(scale)).unwrap()
    }

    /// Dense copy of a diagonal matrix, forcing the block-exponential path.
    fn densify(a: &ComplexMatrix) -> ComplexMatrix {
        let s = ComplexMatrix::from_real(a.dim(), &{
            let d = a.dim();
            let mut v = vec![0.0; d * d];
            for i in 0..d {
                v[i * d + i] = 1.0;
                if i + 1 < d {
                    v[i * d + i + 1] = 0.5;
                }
            }
            v
        })
        .unwrap();
        a.conjugate_by(&s).unwrap()
    }

    #[test]
    fn scalar_families() {
        let fam = cosine_from_generator(&diag(&[4.0, -9.0, 0.0])).unwrap();
        let (c, s) = fam.sample(0.3).unwrap();
        assert!((c.get(0, 0).re - (0.6f64).cosh()).abs() < 1e-14);
        assert!((c.get(1, 1).re - (0.9f64).cos()).abs() < 1e-14);
        assert!((c.get(2, 2).re - 1.0).abs() < 1e-15);
        assert!((s.get(0, 0).re - (0.6f64).sinh() / 2.0).abs() < 1e-14);
        assert!((s.get(1, 1).re - (0.9f64).sin() / 3.0).abs() < 1e-14);
        assert!((s.get(2, 2).re - 0.3).abs() < 1e-15);
        let (c0, s0) = fam.sample(0.0).unwrap();
        assert_eq!(c0, ComplexMatrix::identity(3));
        assert_eq!(s0, ComplexMatrix::zeros(3));
    }

    #[test]
    fn block_path_matches_diagonal_path() {
        let a = diag(&[2.0, -1.0, -4.0]);
        let dense = densify(&a);
        let s = ComplexMatrix::from_real(3, &[1.0, 0.5, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 1.0]).unwrap();
        let fd = cosine_from_generator(&a).unwrap();
        let fb = cosine_from_generator(&dense).unwrap();
        for t in [0.1, 0.7, 1.5, -0.8] {
            let (c1, s1) = fd.sample(t).unwrap();
            let (c2, s2) = fb.sample(t).unwrap();
            assert!((&c1.conjugate_by(&s).unwrap() - &c2).norm2() < 1e-11);
            assert!((&s1.conjugate_by(&s).unwrap() - &s2).norm2() < 1e-11);
        }
    }

    #[test]
    fn invariants_random() {
        let mut r = rng::stream(31);
        let a = random(&mut r, 4, 0.7);
        let fam = cosine_from_generator(&a).unwrap();
        for t in [0.2, 0.9, 1.7] {
            assert!((&fam.cos(-t).unwrap() - &fam.cos(t).unwrap()).norm2() < 1e-10);
            assert!(generator_residual(&fam, t).unwrap() < 1e-6);
            let s = fam.sample(t).unwrap().1;
            let q = quad_strong_integral(|u| fam.cos(u), 0.0, t).unwrap().value;
            assert!((&s - &q).norm2() < 1e-8);
        }
    }

    #[test]
    fn group_matches_generator() {
        let mut r = rng::stream(32);
        let b = random(&mut r, 4, 0.6);
        let g = cosine_from_group(&b).unwrap();
        let a = cosine_from_generator(&b.matmul(&b)).unwrap();
        for k in 0..=10 {
            let t = 0.2 * k as f64;
            assert!((&g.cos(t).unwrap() - &a.cos(t).unwrap()).norm2() < 1e-8, "{t}");
        }
        assert!(generator_residual(&g, 0.5).unwrap() < 1e-6);

        let skew = cosine_from_group(&ComplexMatrix::from_diagonal(&[c64(0.0, 3.0)]).unwrap()).unwrap();
        assert!((skew.cos(0.4).unwrap().get(0, 0) - c64((1.2f64).cos(), 0.0)).norm() < 1e-15);
        assert!((skew.generator.get(0, 0) - c64(-9.0, 0.0)).norm() < 1e-15);
        let zero = cosine_from_group(&ComplexMatrix::zeros(2)).unwrap();
        assert_eq!(zero.cos(1.3).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn dalembert() {
        let fam = cosine_from_generator(&diag(&[-1.0])).unwrap();
        assert!(dalembert_residual(&fam, 0.7, 0.3).unwrap().residual <= 1e-12);
        let mut r = rng::stream(33);
        let fam = cosine_from_generator(&random(&mut r, 6, 0.5)).unwrap();
        assert!(dalembert_residual(&fam, 0.9, 0.0).unwrap().residual < 1e-12);
        for _ in 0..100 {
            let t = rng::uniform(&mut r, 0.0, 2.0);
            let s = rng::uniform(&mut r, 0.0, 2.0);
            assert!(dalembert_residual(&fam, t, s).unwrap().ok);
        }
    }

    #[test]
    fn laplace() {
        let fam = cosine_from_generator(&diag(&[-1.0])).unwrap();
        let c = laplace_transform_check(&fam, 1.0, LAPLACE_HORIZON_CAP).unwrap();
        assert!(c.residual < 1e-8, "{}", c.residual);
        let fam = cosine_from_generator(&ComplexMatrix::zeros(2)).unwrap();
        let c = laplace_transform_check(&fam, 2.0, LAPLACE_HORIZON_CAP).unwrap();
        assert!(c.residual < 1e-8);
        let mut r = rng::stream(34);
        let a = random(&mut r, 4, 0.5).shift(c64(-2.0, 0.0));
        let fam = cosine_from_generator(&a).unwrap();
        let lam = growth_rate(&fam).unwrap() + 1.0;
        let c = laplace_transform_check(&fam, lam, LAPLACE_HORIZON_CAP).unwrap();
        assert!(c.residual <= 1e-6, "{}", c.residual);
        assert!(matches!(
            laplace_transform_check(&fam, lam, 2.0),
            Err(Error::TailTooFat(_))
        ));
        let fam = cosine_from_generator(&diag(&[4.0])).unwrap();
        assert!(laplace_transform_check(&fam, 1.0, LAPLACE_HORIZON_CAP).is_err());
    }

    #[test]
    fn zero_two_profiles() {
        for n in [16usize, 64, 256] {
            let t_max = 1.0f64.max(100.0 / n as f64);
            let grid = log_grid(t_max, (t_max * n as f64).log10(), 61).unwrap();
            let a = diag(&(1..=n).map(|k| -((k * k) as f64)).collect::<Vec<_>>());
            let fams = vec![(n, cosine_from_generator(&a).unwrap())];
            let rep = zero_two_profile(&fams, &grid, &GridSpace::unit(n, 2.0).unwrap()).unwrap();
            let t_min = grid[grid.len() - 1];
            let oracle = grid
                .iter()
                .filter(|t| **t <= 10.0 * t_min * (1.0 + 1e-12))
                .map(|t| (1..=n).map(|k| 1.0 - (t * k as f64).cos()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let e = &rep.entries[0];
            assert!((e.plateau - oracle).abs() < 1e-12);
            assert!(e.plateau >= 2.0 - 20.0 / n as f64);
            assert_eq!(rep.verdict, ZeroTwoVerdict::HypothesisFailsInLimit);
        }

        let grid = log_grid(1.0, 3.0, 61).unwrap();
        let fixed = vec![(4usize, cosine_from_generator(&diag(&[-1.0, -1.25, -1.5, -2.0])).unwrap())];
        let rep = zero_two_profile(&fixed, &grid, &GridSpace::unit(4, 2.0).unwrap()).unwrap();
        assert!(rep.entries[0].plateau <= 2.0 * 1e-2);
        assert_eq!(rep.verdict, ZeroTwoVerdict::UniformlyContinuous);
    }

    #[test]
    fn zero_two_witness() {
        let grid = log_grid(1.0, 2.0, 9).unwrap();
        let g = Growth { m: 1.0, omega: 0.0 };
        let w = zero_two_polynomial_witness(&ComplexMatrix::zeros(2), g, &grid, &GridSpace::unit(2, 2.0).unwrap(), 3).unwrap();
        assert!(w.values.iter().all(|v| *v < 1e-15));

        let b = ComplexMatrix::from_diagonal(&[c64(0.0, 1.0)]).unwrap();
        let w = zero_two_polynomial_witness(&b, g, &grid, &GridSpace::unit(1, 2.0).unwrap(), 4).unwrap();
        for (t, v) in grid.iter().zip(&w.values) {
            let want = (2.0 * (t / 2.0).sin().powi(2)).powi(4);
            assert!((v - want).abs() < 1e-14);
        }
        assert!(w.bound_ok && w.max_rel_diff < 1e-14);

        let mut r = rng::stream(35);
        let x = random(&mut r, 4, 1.0);
        let skew = (&x - &x.adjoint()).scale_real(0.5);
        let w = zero_two_polynomial_witness(&skew, g, &log_grid(1.0, 2.0, 20).unwrap(), &GridSpace::unit(4, 2.0).unwrap(), 3)
            .unwrap();
        assert!(w.max_rel_diff <= 1e-8 && w.bound_ok);
    }

    #[test]
    fn fattorini_trivial_and_scalar() {
        let mut r = rng::stream(36);
        let a = random(&mut r, 3, 0.5);
        let fam = cosine_from_generator(&a).unwrap();
        let res = fattorini_series(&fam, 0.0, 3, 0.8, 16).unwrap();
        assert!((&res.partial_sums[3] - &fam.cos(0.8).unwrap()).norm2() < 1e-14);

        let fam = cosine_from_generator(&diag(&[1.0])).unwrap();
        for t in [0.5, 1.0] {
            let res = fattorini_series(&fam, 1.0, 12, t, 16).unwrap();
            assert!((res.partial_sums[12].get(0, 0) - Complex64::ONE).norm() < 1e-4);
            assert!(res.bound_ok);
        }
    }

    #[test]
    fn fattorini_random() {
        let mut r = rng::stream(37);
        for _ in 0..3 {
            let a = random(&mut r, 3, 0.6);
            let fam = cosine_from_generator(&a).unwrap();
            for omega in [0.25, 0.5, 1.0] {
                let res = fattorini_series(&fam, omega, 12, 0.8, 16).unwrap();
                assert!(res.reference_residual < 1e-4, "{}", res.reference_residual);
                assert!(res.bound_ok, "{:?} {:?}", res.term_norms, res.term_bounds);
            }
        }
    }

    #[test]
    fn composite_weights_exact_for_cubics() {
        for j in 1..9usize {
            let h = 0.3;
            let w = composite_weights(j, h);
            let b = j as f64 * h;
            let cubic: f64 = w.iter().enumerate().map(|(i, w)| w * (i as f64 * h).powi(if j == 1 { 1 } else { 3 })).sum();
            let want = if j == 1 { b * b / 2.0 } else { b.powi(4) / 4.0 };
            assert!((cubic - want).abs() < 1e-12, "{j}");
        }
    }
}
