// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Holomorphy analysis of matrix semigroups `T(t) = e^{tA}`.
//!
//! A finite matrix always generates a holomorphic semigroup, so the
//! criteria are tracked along truncation families: the quantity of interest
//! is the plateau of `‖f(T(t))‖` before it collapses to `|f(1)|` at the
//! scale `t ≈ 1/‖A‖`, and how that plateau moves with the dimension.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discpoly::{disc_norm, in_c1, power_expand, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{mat_exp, op_norm, quad_strong_integral, resolvent, ComplexMatrix};
use crate::space::GridSpace;

/// Distance below `‖f‖_D` at which a plateau counts as "no margin".
pub const FAIL_THRESHOLD: f64 = 0.05;
/// Number of log-spaced samples of `(0, t0]` in sector reports.
pub const SECTOR_SAMPLES: usize = 64;
/// Decades spanned by those samples.
pub const SECTOR_DECADES: f64 = 4.0;

/// Certified growth bound `‖T(t)‖ ≤ M e^{ωt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub m: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub matrix: ComplexMatrix,
    pub label: String,
    pub family_index: Option<usize>,
    pub growth: Option<Growth>,
}

impl GeneratorSpec {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Self {
        Self {
            matrix,
            label: label.into(),
            family_index: None,
            growth: None,
        }
    }

    pub fn with_growth(mut self, m: f64, omega: f64) -> Self {
        self.growth = Some(Growth { m, omega });
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `T(t)`.
    pub fn at(&self, t: f64) -> Result<ComplexMatrix> {
        mat_exp(&self.matrix, t)
    }

    /// Verifies the attached growth bound in the spectral norm at 64
    /// log-spaced times in `(0, horizon]`. `Ok(true)` when absent.
    pub fn check_growth(&self, horizon: f64) -> Result<bool> {
        let Some(g) = self.growth else {
            return Ok(true);
        };
        for t in log_grid(horizon, 4.0, 64)? {
            let n = self.at(t)?.norm2();
            if n > g.m * (g.omega * t).exp() + 1e-6 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The generator conjugated by `s`, i.e. the same semigroup in the
    /// renormed space with norm `x ↦ ‖S^{-1} x‖`.
    pub fn conjugated(&self, s: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.conjugate_by(s)?,
            label: format!("{} (renormed)", self.label),
            family_index: self.family_index,
            growth: None,
        })
    }
}

/// `count` log-spaced points, decreasing from `t_max` over `decades` decades.
pub fn log_grid(t_max: f64, decades: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || count < 2 || !(decades > 0.0) {
        return Err(Error::InvalidInput("bad log grid".into()));
    }
    Ok((0..count)
        .map(|k| t_max * 10f64.powf(-decades * k as f64 / (count - 1) as f64))
        .collect())
}

/// Checks that a t-grid is positive, strictly decreasing and spans at least
/// two decades.
pub fn validate_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidInput("t-grid needs at least two points".into()));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidInput("t-grid must be positive".into()));
    }
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("t-grid must be strictly decreasing".into()));
    }
    if t_grid[0] / t_grid[t_grid.len() - 1] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidInput("t-grid must span at least two decades".into()));
    }
    Ok(())
}

/// `f(T(t))·T(s)` by Horner's scheme in `T(t)`.
pub fn poly_of_semigroup(f: &Polynomial, gen: &GeneratorSpec, t: f64, s: f64) -> Result<ComplexMatrix> {
    if t < 0.0 || s < 0.0 {
        return Err(Error::InvalidInput("t and s must be nonnegative".into()));
    }
    let tt = gen.at(t)?;
    let horner = horner(f, &tt);
    if s == 0.0 {
        return Ok(horner);
    }
    Ok(horner.matmul(&gen.at(s)?))
}

/// `Σ_k a_k T(s + kt)`, the other evaluation order.
pub fn poly_of_semigroup_direct(f: &Polynomial, gen: &GeneratorSpec, t: f64, s: f64) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::zeros(gen.dim());
    for (k, a) in f.coeffs().iter().enumerate() {
        if *a != Complex64::ZERO {
            acc = &acc + &gen.at(s + k as f64 * t)?.scale(*a);
        }
    }
    Ok(acc)
}

pub(crate) fn horner(f: &Polynomial, t: &ComplexMatrix) -> ComplexMatrix {
    let c = f.coeffs();
    let mut acc = ComplexMatrix::identity(t.dim()).scale(c[c.len() - 1]);
    for a in c.iter().rev().skip(1) {
        acc = acc.matmul(t).shift(*a);
    }
    acc
}

/// Profile of an operator-norm quantity against a decreasing t-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeurlingProfile {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub disc_value: f64,
    /// Maximum of `values` over the smallest decade of the grid.
    pub empirical_limsup: f64,
    pub margin: f64,
    /// `true` if any value is only a lower bound (general `p`).
    pub lower_bound: bool,
}

impl BeurlingProfile {
    fn from_values(t_grid: Vec<f64>, values: Vec<f64>, disc_value: f64, lower_bound: bool) -> Self {
        let empirical_limsup = smallest_decade_max(&t_grid, &values);
        Self {
            margin: disc_value - empirical_limsup,
            t_grid,
            values,
            disc_value,
            empirical_limsup,
            lower_bound,
        }
    }
}

/// Maximum of `values` over the points with `t ≤ 10·t_min`.
pub fn smallest_decade_max(t_grid: &[f64], values: &[f64]) -> f64 {
    let t_min = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    t_grid
        .iter()
        .zip(values)
        .filter(|(t, _)| **t <= 10.0 * t_min * (1.0 + 1e-12))
        .map(|(_, v)| *v)
        .fold(0.0, f64::max)
}

fn sweep<F>(t_grid: &[f64], eval: F) -> Result<Vec<(f64, bool)>>
where
    F: Fn(f64) -> Result<(f64, bool)> + Sync,
{
    t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| eval(t).map_err(|e| e.at(i, t)))
        .collect()
}

/// `t ↦ ‖f(T(t))‖` on the grid.
pub fn beurling_profile(
    gen: &GeneratorSpec,
    f: &Polynomial,
    t_grid: &[f64],
    space: &GridSpace,
) -> Result<BeurlingProfile> {
    validate_t_grid(t_grid)?;
    check_dim(gen, space)?;
    let vals = sweep(t_grid, |t| {
        let n = op_norm(&poly_of_semigroup(f, gen, t, 0.0)?, space)?;
        Ok((n.value, n.estimate))
    })?;
    Ok(BeurlingProfile::from_values(
        t_grid.to_vec(),
        vals.iter().map(|v| v.0).collect(),
        disc_norm(f).value,
        vals.iter().any(|v| v.1),
    ))
}

/// `t ↦ ‖f^N(T(t))·T(Kt)‖` against `‖f‖_D^N` for `f ∈ C₁[z]`.
pub fn converse_profile(
    gen: &GeneratorSpec,
    f: &Polynomial,
    n_pow: usize,
    k_shift: f64,
    t_grid: &[f64],
    space: &GridSpace,
) -> Result<BeurlingProfile> {
    if !in_c1(f) {
        return Err(Error::ParameterOutOfRange(
            "converse profile needs |f(1)| < ‖f‖_D".into(),
        ));
    }
    if !(k_shift >= 0.0 && k_shift.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("K = {k_shift} must be >= 0")));
    }
    validate_t_grid(t_grid)?;
    check_dim(gen, space)?;
    let fnp = power_expand(f, n_pow)?;
    let vals = sweep(t_grid, |t| {
        let n = op_norm(&poly_of_semigroup(&fnp, gen, t, k_shift * t)?, space)?;
        Ok((n.value, n.estimate))
    })?;
    Ok(BeurlingProfile::from_values(
        t_grid.to_vec(),
        vals.iter().map(|v| v.0).collect(),
        disc_norm(f).value.powi(n_pow as i32),
        vals.iter().any(|v| v.1),
    ))
}

/// `(f(T(t)))^N · T(Kt)`, multiplying out the power after evaluation.
pub fn converse_factorized(
    gen: &GeneratorSpec,
    f: &Polynomial,
    n_pow: usize,
    k_shift: f64,
    t: f64,
) -> Result<ComplexMatrix> {
    let ft = poly_of_semigroup(f, gen, t, 0.0)?;
    Ok(ft.powi(n_pow).matmul(&gen.at(k_shift * t)?))
}

fn check_dim(gen: &GeneratorSpec, space: &GridSpace) -> Result<()> {
    if gen.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            got: space.dim(),
        });
    }
    Ok(())
}

/// Phases `θ ∈ (0, 2π]` and `θ̃ = θ - 2π ∈ [-2π, 0)` with `e^{iθ} = ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phases {
    pub positive: f64,
    pub negative: f64,
}

impl Phases {
    pub fn of(zeta: Complex64) -> Result<Self> {
        if (zeta.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::ParameterOutOfRange(format!("|zeta| = {} != 1", zeta.norm())));
        }
        let a = zeta.arg().rem_euclid(TAU);
        Ok(Self {
            positive: if a > 0.0 { a } else { TAU },
            negative: a - TAU,
        })
    }

    /// The phase used for frequency `alpha` (sign-matched).
    pub fn for_alpha(&self, alpha: f64) -> f64 {
        if alpha > 0.0 {
            self.positive
        } else {
            self.negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KatoIdentity {
    pub lhs: ComplexMatrix,
    pub rhs: ComplexMatrix,
    pub residual: f64,
    pub theta: f64,
}

/// Compares `(A - iα)^{-1}` with `-e^{itα}(ζ - T(t))^{-1} ∫_0^t e^{-isα} T(s) ds`
/// for `tα = θ`.
pub fn kato_resolvent_identity_check(
    gen: &GeneratorSpec,
    zeta: Complex64,
    t: f64,
    alpha: f64,
) -> Result<KatoIdentity> {
    if !(t > 0.0) || alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::ParameterOutOfRange("need t > 0 and alpha != 0".into()));
    }
    let theta = Phases::of(zeta)?.for_alpha(alpha);
    if (t * alpha - theta).abs() > 1e-10 * theta.abs().max(1.0) {
        return Err(Error::PhaseMismatch {
            got: t * alpha,
            expected: theta,
        });
    }
    let ia = Complex64::new(0.0, alpha);
    // (A - iα)^{-1} = -R(iα, A)
    let lhs = resolvent(&gen.matrix, ia)?.scale_real(-1.0);
    let inv = resolvent(&gen.at(t)?, zeta)?;
    let integral = quad_strong_integral(
        |s| Ok(gen.at(s)?.scale(Complex64::from_polar(1.0, -s * alpha))),
        0.0,
        t,
    )?
    .value;
    let rhs = inv
        .matmul(&integral)
        .scale(-Complex64::from_polar(1.0, t * alpha));
    let residual = (&lhs - &rhs).norm2() / lhs.norm2();
    Ok(KatoIdentity {
        lhs,
        rhs,
        residual,
        theta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEntry {
    pub alpha: f64,
    /// `‖α(A - iα)^{-1}‖`.
    pub value: f64,
    /// `K·M·|θ|`.
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub zeta: Complex64,
    pub t0: f64,
    pub phases: Phases,
    /// `sup ‖(ζ - T(t))^{-1}‖` over the sampled `t ∈ (0, t0]`.
    pub k: f64,
    /// `sup ‖T(t)‖` over `[0, t0]`.
    pub m: f64,
    pub alpha_grid: Vec<f64>,
    pub resolvent_sups: Vec<AlphaEntry>,
    /// Largest measured `‖α(A - iα)^{-1}‖`.
    pub c: f64,
    pub alpha0: f64,
    pub chain_holds: bool,
    pub lower_bound: bool,
}

/// Measures the constants of Kato's sectoriality lemma.
///
/// `K` is the supremum over 64 log-spaced `t ∈ (0, t0]` together with the
/// times `t = θ/α` induced by the α-grid, so the bound chain
/// `‖α(A - iα)^{-1}‖ ≤ K·M·|θ|` is checked with the very `K` it uses.
pub fn sector_report(
    gen: &GeneratorSpec,
    zeta: Complex64,
    t0: f64,
    space: &GridSpace,
    alpha_grid: &[f64],
) -> Result<SectorReport> {
    check_dim(gen, space)?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("t0 = {t0}")));
    }
    let phases = Phases::of(zeta)?;
    let admissible: Vec<f64> = alpha_grid
        .iter()
        .copied()
        .filter(|a| *a != 0.0 && a.abs() > phases.for_alpha(*a).abs() / t0)
        .collect();
    let mut ts = log_grid(t0, SECTOR_DECADES, SECTOR_SAMPLES)?;
    ts.extend(admissible.iter().map(|a| phases.for_alpha(*a) / a));

    let samples: Vec<(f64, f64, bool)> = ts
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let tt = gen.at(t)?;
            let inv = op_norm(&resolvent(&tt, zeta)?, space)?;
            let tn = op_norm(&tt, space)?;
            Ok((inv.value, tn.value, inv.estimate || tn.estimate))
        }
        .map_err(|e: Error| e.at(i, t)))
        .collect::<Result<_>>()?;
    let k = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let m = samples.iter().map(|s| s.1).fold(1.0, f64::max);
    let mut lower_bound = samples.iter().any(|s| s.2);

    let entries: Vec<(AlphaEntry, bool)> = admissible
        .par_iter()
        .map(|&alpha| {
            let r = resolvent(&gen.matrix, Complex64::new(0.0, alpha))?;
            let n = op_norm(&r, space)?;
            let value = alpha.abs() * n.value;
            let bound = k * m * phases.for_alpha(alpha).abs();
            Ok((
                AlphaEntry {
                    alpha,
                    value,
                    bound,
                    ok: value <= bound + 1e-6,
                },
                n.estimate,
            ))
        })
        .collect::<Result<_>>()?;
    lower_bound |= entries.iter().any(|e| e.1);
    let resolvent_sups: Vec<AlphaEntry> = entries.into_iter().map(|e| e.0).collect();
    Ok(SectorReport {
        zeta,
        t0,
        phases,
        k,
        m,
        alpha_grid: alpha_grid.to_vec(),
        c: resolvent_sups.iter().map(|e| e.value).fold(0.0, f64::max),
        alpha0: phases.positive.max(phases.negative.abs()) / t0,
        chain_holds: resolvent_sups.iter().all(|e| e.ok),
        resolvent_sups,
        lower_bound,
    })
}

/// Largest time grid tried by [`mild_solution`].
pub const MILD_MAX_STEPS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MildSolution {
    pub times: Vec<f64>,
    pub x: Vec<Vec<Complex64>>,
    pub maxreg_ratio: f64,
    pub n_time: usize,
}

/// Propagators over one step `h` for piecewise-linear forcing:
/// `E = e^{hA}`, `P1 = ∫_0^h e^{uA} du`, `P2 = ∫_0^h e^{uA}(h - u) du`.
struct StepMaps {
    e: ComplexMatrix,
    p1: ComplexMatrix,
    p2: ComplexMatrix,
}

fn step_maps(a: &ComplexMatrix, h: f64) -> Result<StepMaps> {
    let d = a.dim();
    if a.is_diagonal() {
        let mut e = Vec::with_capacity(d);
        let mut p1 = Vec::with_capacity(d);
        let mut p2 = Vec::with_capacity(d);
        for lam in a.diagonal() {
            let m = ComplexMatrix::from_fn(3, |i, j| match (i, j) {
                (0, 0) => lam,
                (0, 1) | (1, 2) => Complex64::ONE,
                _ => Complex64::ZERO,
            })?;
            let x = mat_exp(&m, h)?;
            e.push(x.get(0, 0));
            p1.push(x.get(0, 1));
            p2.push(x.get(0, 2));
        }
        return Ok(StepMaps {
            e: ComplexMatrix::from_diagonal(&e)?,
            p1: ComplexMatrix::from_diagonal(&p1)?,
            p2: ComplexMatrix::from_diagonal(&p2)?,
        });
    }
    let big = ComplexMatrix::from_fn(3 * d, |i, j| {
        let (bi, bj) = (i / d, j / d);
        let (ri, rj) = (i % d, j % d);
        match (bi, bj) {
            (0, 0) => a.get(ri, rj),
            (0, 1) | (1, 2) if ri == rj => Complex64::ONE,
            _ => Complex64::ZERO,
        }
    })?;
    let x = mat_exp(&big, h)?;
    let block = |c: usize| ComplexMatrix::from_fn(d, |i, j| x.get(i, c * d + j));
    Ok(StepMaps {
        e: block(0)?,
        p1: block(1)?,
        p2: block(2)?,
    })
}

fn time_lp(values: &[f64], h: f64, p: f64) -> f64 {
    let n = values.len() - 1;
    if p.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * v.powf(p)
        })
        .sum();
    (h * sum).powf(1.0 / p)
}

fn mild_on_grid<F>(a: &ComplexMatrix, forcing: &F, tau: f64, p: f64, n: usize) -> Result<MildSolution>
where
    F: Fn(f64) -> Vec<Complex64>,
{
    let d = a.dim();
    let h = tau / n as f64;
    let maps = step_maps(a, h)?;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let fs: Vec<Vec<Complex64>> = times.iter().map(|t| forcing(*t)).collect();
    if fs.iter().any(|f| f.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: fs.iter().map(|f| f.len()).find(|l| *l != d).unwrap_or(0),
        });
    }
    if fs.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("forcing"));
    }
    let mut x = vec![vec![Complex64::ZERO; d]];
    for i in 0..n {
        let slope: Vec<Complex64> = fs[i + 1].iter().zip(&fs[i]).map(|(b, a)| (b - a) / h).collect();
        let mut next = maps.e.apply(&x[i]);
        for (k, (u, v)) in maps.p1.apply(&fs[i]).into_iter().zip(maps.p2.apply(&slope)).enumerate() {
            next[k] += u + v;
        }
        x.push(next);
    }
    let space = GridSpace::unit(d, p)?;
    let ax: Vec<f64> = x.iter().map(|v| space.norm(&a.apply(v))).collect();
    let fn_: Vec<f64> = fs.iter().map(|v| space.norm(v)).collect();
    let den = time_lp(&fn_, h, p);
    let maxreg_ratio = if den > 0.0 { time_lp(&ax, h, p) / den } else { 0.0 };
    Ok(MildSolution {
        times,
        x,
        maxreg_ratio,
        n_time: n,
    })
}

/// Mild solution `x(t) = ∫_0^t T(t-s) f(s) ds` on a uniform grid and the ratio
/// `‖Ax‖_{L^p(0,τ;ℓ^p)} / ‖f‖_{L^p(0,τ;ℓ^p)}`.
///
/// The forcing is interpolated linearly between grid points and each step
/// is propagated exactly. The grid is doubled until the ratio moves by less
/// than 1%.
pub fn mild_solution<F>(gen: &GeneratorSpec, forcing: F, tau: f64, p: f64, n_time: usize) -> Result<MildSolution>
where
    F: Fn(f64) -> Vec<Complex64>,
{
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("tau = {tau}")));
    }
    if n_time < 16 {
        return Err(Error::ParameterOutOfRange(format!("n_time = {n_time} < 16")));
    }
    crate::space::check_exponent(p)?;
    let mut n = n_time;
    let mut prev = mild_on_grid(&gen.matrix, &forcing, tau, p, n)?;
    loop {
        let next = mild_on_grid(&gen.matrix, &forcing, tau, p, 2 * n)?;
        let change = (next.maxreg_ratio - prev.maxreg_ratio).abs();
        if change <= 0.01 * next.maxreg_ratio.abs() || next.maxreg_ratio == 0.0 {
            return Ok(next);
        }
        n *= 2;
        if 2 * n > MILD_MAX_STEPS {
            return Err(Error::QuadratureDivergence {
                nodes: 2 * n,
                relative_change: change / next.maxreg_ratio.abs(),
            });
        }
        prev = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CriterionHolds,
    FailsInLimit,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub dims: Vec<usize>,
    pub plateaus: Vec<f64>,
    /// Least-squares fit `plateau ≈ a + b/dim`; `a` is the extrapolated limit.
    pub fit_limit: f64,
    pub fit_slope: f64,
    pub verdict: Verdict,
}

/// Classifies a truncation family by its plateaus against `threshold`:
/// fails when the plateau at the largest dimension exceeds `threshold - 0.05`,
/// holds when the extrapolated limit stays below it by the same amount.
pub fn dichotomy(points: &[(usize, f64)], threshold: f64) -> Result<Dichotomy> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty dichotomy".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let (fit_limit, fit_slope) = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| 1.0 / p.0 as f64).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&pts).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
        let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        (my - b * mx, b)
    } else {
        (pts[0].1, 0.0)
    };
    let last = pts[pts.len() - 1].1;
    let verdict = if last > threshold - FAIL_THRESHOLD {
        Verdict::FailsInLimit
    } else if fit_limit.max(last) < threshold - FAIL_THRESHOLD {
        Verdict::CriterionHolds
    } else {
        Verdict::Undetermined
    };
    Ok(Dichotomy {
        dims: pts.iter().map(|p| p.0).collect(),
        plateaus: pts.iter().map(|p| p.1).collect(),
        fit_limit,
        fit_slope,
        verdict,
    })
}

/// Parses the text matrix format: the dimension, then `dim²` entries as
/// `re im` pairs in row-major order, separated by any whitespace.
pub fn parse_matrix_text(text: &str) -> Result<ComplexMatrix> {
    let mut tokens = text.split_whitespace();
    let dim: usize = tokens
        .next()
        .ok_or_else(|| Error::InvalidInput("empty matrix file".into()))?
        .parse()
        .map_err(|e| Error::InvalidInput(format!("bad dimension: {e}")))?;
    let nums: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad entry '{t}': {e}"))))
        .collect::<Result<_>>()?;
    if nums.len() != 2 * dim * dim {
        return Err(Error::DimensionMismatch {
            expected: 2 * dim * dim,
            got: nums.len(),
        });
    }
    let entries: Vec<Complex64> = nums.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    ComplexMatrix::from_row_major(dim, &entries)
}

/// Writes a matrix in the format read by [`parse_matrix_text`].
pub fn format_matrix_text(m: &ComplexMatrix) -> String {
    let n = m.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let z = m.get(i, j);
                format!("{:?} {:?}", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}

pub fn read_matrix_file(path: &std::path::Path) -> Result<ComplexMatrix> {
    parse_matrix_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{c64, rng};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn diag(vals: impl IntoIterator<Item = Complex64>) -> GeneratorSpec {
        let v: Vec<Complex64> = vals.into_iter().collect();
        GeneratorSpec::new(ComplexMatrix::from_diagonal(&v).unwrap(), "diag")
    }

    fn jordan(lambda: f64) -> GeneratorSpec {
        let m = ComplexMatrix::from_real(2, &[lambda, 1.0, 0.0, lambda]).unwrap();
        GeneratorSpec::new(m, "jordan")
    }

    fn random_gen(r: &mut rng::Stream, d: usize) -> GeneratorSpec {
        let m = ComplexMatrix::from_fn(d, |_, _| rng::complex_normal(r)).unwrap();
        GeneratorSpec::new(m, "random")
    }

    #[test]
    fn poly_trivial_cases() {
        let zero = GeneratorSpec::new(ComplexMatrix::zeros(3), "zero");
        let p = poly_of_semigroup(&Polynomial::kato_pazy(), &zero, 0.7, 0.0).unwrap();
        assert!(p.max_abs() < 1e-15);

        let g = jordan(-0.5);
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let p = poly_of_semigroup(&sq, &g, 0.3, 0.0).unwrap();
        assert!((&p - &g.at(0.6).unwrap()).frobenius() < 1e-13);

        let g = diag((1..=5).map(|k| c64(0.0, k as f64)));
        let p = poly_of_semigroup(&Polynomial::kato_pazy(), &g, 0.4, 0.0).unwrap();
        let want = (1..=5)
            .map(|k| (Complex64::from_polar(1.0, 0.4 * k as f64) - 1.0).norm())
            .fold(0.0, f64::max);
        assert!((p.norm2() - want).abs() < 1e-12);
    }

    #[test]
    fn two_evaluation_orders_agree() {
        let mut r = rng::stream(5);
        for d in 2..6 {
            let g = random_gen(&mut r, d);
            let f = Polynomial::new(rng::complex_vector(&mut r, 4)).unwrap();
            for (t, s) in [(0.1, 0.0), (0.3, 0.2), (0.05, 1.0)] {
                let a = poly_of_semigroup(&f, &g, t, s).unwrap();
                let b = poly_of_semigroup_direct(&f, &g, t, s).unwrap();
                assert!((&a - &b).norm2() <= 1e-9 * b.norm2().max(1e-300), "{d} {t} {s}");
            }
        }
        assert!(poly_of_semigroup(&Polynomial::identity(), &jordan(0.0), -1.0, 0.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(validate_t_grid(&[1.0, 0.1, 0.01]).is_ok());
        assert!(validate_t_grid(&[1.0, 0.1]).is_err());
        assert!(validate_t_grid(&[0.01, 0.1, 1.0]).is_err());
        assert!(validate_t_grid(&[1.0, 0.0]).is_err());
        let g = log_grid(1.0, 3.0, 31).unwrap();
        assert_eq!(g.len(), 31);
        assert!((g[30] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn profile_identity_semigroup() {
        let g = GeneratorSpec::new(ComplexMatrix::zeros(4), "zero");
        let space = GridSpace::unit(4, 2.0).unwrap();
        let grid = log_grid(1.0, 3.0, 13).unwrap();
        let prof = beurling_profile(&g, &Polynomial::kato_pazy(), &grid, &space).unwrap();
        assert!(prof.values.iter().all(|v| *v == 0.0));
        assert!((prof.margin - 2.0).abs() < 1e-9);
    }

    #[test]
    fn profile_dissipative_diagonal() {
        for n in [4usize, 32, 128] {
            let g = diag((1..=n).map(|k| c64(-(k as f64), 0.0)));
            let space = GridSpace::unit(n, 2.0).unwrap();
            let grid = log_grid(1.0, 4.0, 41).unwrap();
            let prof = beurling_profile(&g, &Polynomial::kato_pazy(), &grid, &space).unwrap();
            for (t, v) in grid.iter().zip(&prof.values) {
                let want = 1.0 - (-t * n as f64).exp();
                assert!((v - want).abs() < 1e-12);
            }
            assert!(prof.margin >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn profile_skew_plateau() {
        let n = 64usize;
        let g = diag((1..=n).map(|k| c64(0.0, k as f64)));
        let space = GridSpace::unit(n, 2.0).unwrap();
        let short = log_grid(1.0, (n as f64).log10(), 61).unwrap();
        assert!(beurling_profile(&g, &Polynomial::kato_pazy(), &short, &space).is_err());
        let grid = log_grid(10.0, 1.0 + (n as f64).log10(), 81).unwrap();
        let prof = beurling_profile(&g, &Polynomial::kato_pazy(), &grid, &space).unwrap();
        let oracle = grid
            .iter()
            .filter(|t| **t <= 10.0 * grid[grid.len() - 1] * (1.0 + 1e-12))
            .map(|t| (1..=n).map(|k| 2.0 * (t * k as f64 / 2.0).sin().abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        assert!((prof.empirical_limsup - oracle).abs() < 1e-10);
        assert!(prof.empirical_limsup >= 2.0 - 10.0 / n as f64);
    }

    #[test]
    fn limit_value_first_order_bound() {
        let mut r = rng::stream(8);
        for _ in 0..5 {
            let g = random_gen(&mut r, 4);
            let f = Polynomial::new(rng::complex_vector(&mut r, 3)).unwrap();
            let space = GridSpace::unit(4, 2.0).unwrap();
            let grid = log_grid(0.1, 4.0, 9).unwrap();
            let prof = beurling_profile(&g, &f, &grid, &space).unwrap();
            let tl = grid[grid.len() - 1];
            let a = g.matrix.norm2();
            let fp = disc_norm(&f.derivative()).value;
            let bound = fp * a * tl * (a * tl * f.degree() as f64).exp();
            let last = prof.values[prof.values.len() - 1];
            assert!((last - f.eval(Complex64::ONE).norm()).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn renorming_changes_values_by_at_most_cond() {
        let mut r = rng::stream(21);
        let n = 6;
        let g = diag((1..=n).map(|k| c64(-(k as f64), 0.5 * k as f64)));
        let space = GridSpace::unit(n, 2.0).unwrap();
        let grid = log_grid(1.0, 3.0, 16).unwrap();
        let f = Polynomial::kato_pazy();
        let base = beurling_profile(&g, &f, &grid, &space).unwrap();
        for _ in 0..5 {
            let e = ComplexMatrix::from_fn(n, |_, _| rng::complex_normal(&mut r).scale(0.15)).unwrap();
            let s = &ComplexMatrix::identity(n) + &e;
            let cond = s.norm2() * s.inverse().unwrap().norm2();
            if cond > 10.0 {
                continue;
            }
            let h = g.conjugated(&s).unwrap();
            let other = beurling_profile(&h, &f, &grid, &space).unwrap();
            for (a, b) in base.values.iter().zip(&other.values) {
                assert!(*b <= cond * a + 1e-10 && *a <= cond * b + 1e-10);
            }
            if base.margin > (1.0 - 1.0 / cond) * base.disc_value {
                assert!(other.margin > 0.0);
            }
        }
    }

    #[test]
    fn converse_profiles() {
        let zero = GeneratorSpec::new(ComplexMatrix::zeros(3), "zero");
        let space = GridSpace::unit(3, 2.0).unwrap();
        let grid = log_grid(1.0, 2.0, 9).unwrap();
        let f = Polynomial::from_real(&[-0.5, 1.0]).unwrap();
        let prof = converse_profile(&zero, &f, 3, 5.0, &grid, &space).unwrap();
        for v in &prof.values {
            assert!((v - 0.125).abs() < 1e-12);
        }
        assert!((prof.margin - (1.5f64.powi(3) - 0.125)).abs() < 1e-9);

        assert!(converse_profile(&zero, &Polynomial::identity(), 2, 1.0, &grid, &space).is_err());

        let n = 64;
        let g = diag((1..=n).map(|k| c64(-(k as f64), 0.0)));
        let space = GridSpace::unit(n, 2.0).unwrap();
        let grid = log_grid(1.0, 3.0, 31).unwrap();
        let prof = converse_profile(&g, &Polynomial::kato_pazy(), 4, 20.0, &grid, &space).unwrap();
        for (t, v) in grid.iter().zip(&prof.values) {
            let want = (1..=n)
                .map(|k| {
                    let x = t * k as f64;
                    (1.0 - (-x).exp()).powi(4) * (-20.0 * x).exp()
                })
                .fold(0.0, f64::max);
            assert!((v - want).abs() < 1e-12);
        }
        assert!(prof.margin > 0.0);

        let ft = converse_factorized(&g, &Polynomial::kato_pazy(), 4, 20.0, 0.01).unwrap();
        let fnp = power_expand(&Polynomial::kato_pazy(), 4).unwrap();
        let direct = poly_of_semigroup(&fnp, &g, 0.01, 0.2).unwrap();
        assert!((&ft - &direct).norm2() < 1e-12);
    }

    #[test]
    fn phases() {
        let p = Phases::of(c64(-1.0, 0.0)).unwrap();
        assert!((p.positive - PI).abs() < 1e-15 && (p.negative + PI).abs() < 1e-15);
        let p = Phases::of(Complex64::ONE).unwrap();
        assert_eq!((p.positive, p.negative), (TAU, -TAU));
        let p = Phases::of(c64(0.0, -1.0)).unwrap();
        assert!((p.positive - 1.5 * PI).abs() < 1e-15 && (p.negative + 0.5 * PI).abs() < 1e-15);
        assert!(Phases::of(c64(0.5, 0.0)).is_err());
    }

    #[test]
    fn kato_identity_scalar() {
        let g = diag([c64(-1.0, 0.0)]);
        let t = 0.1;
        let res = kato_resolvent_identity_check(&g, c64(-1.0, 0.0), t, PI / t).unwrap();
        assert!(res.residual <= 1e-7, "{}", res.residual);
        let closed = c64(-1.0, -PI / t).inv();
        assert!((res.lhs.get(0, 0) - closed).norm() < 1e-14);
        // negative frequency uses θ - 2π
        let res = kato_resolvent_identity_check(&g, c64(-1.0, 0.0), t, -PI / t).unwrap();
        assert!(res.residual <= 1e-7);
    }

    #[test]
    fn kato_identity_jordan() {
        let g = jordan(-1.0);
        let zeta = Complex64::i();
        for t in [0.05, 0.2, 1.0] {
            let res = kato_resolvent_identity_check(&g, zeta, t, 0.5 * PI / t).unwrap();
            assert!(res.residual <= 1e-6, "{t}: {}", res.residual);
            let res = kato_resolvent_identity_check(&g, zeta, t, -1.5 * PI / t).unwrap();
            assert!(res.residual <= 1e-6, "{t}: {}", res.residual);
        }
    }

    #[test]
    fn kato_identity_errors() {
        let g = jordan(-1.0);
        assert!(matches!(
            kato_resolvent_identity_check(&g, Complex64::i(), 0.1, 1.0),
            Err(Error::PhaseMismatch { .. })
        ));
        let alpha = 2.0 * PI;
        let g = diag([c64(0.0, alpha), c64(-1.0, 0.0)]);
        assert!(matches!(
            kato_resolvent_identity_check(&g, Complex64::ONE, 1.0, alpha),
            Err(Error::SpectrumHit { .. })
        ));
    }

    #[test]
    fn sector_dissipative() {
        let n = 32;
        let g = diag((1..=n).map(|k| c64(-(k as f64), 0.0)));
        let space = GridSpace::unit(n, 2.0).unwrap();
        let alphas: Vec<f64> = [-100.0, -20.0, -5.0, 5.0, 20.0, 100.0].to_vec();
        let rep = sector_report(&g, c64(-1.0, 0.0), 1.0, &space, &alphas).unwrap();
        assert!(rep.k <= 1.0 + 1e-12);
        assert!(rep.chain_holds);
        assert_eq!(rep.resolvent_sups.len(), 6);
    }

    #[test]
    fn sector_zero_generator() {
        let g = GeneratorSpec::new(ComplexMatrix::zeros(2), "zero");
        let space = GridSpace::unit(2, 2.0).unwrap();
        let rep = sector_report(&g, c64(-1.0, 0.0), 1.0, &space, &[4.0, -4.0, 50.0]).unwrap();
        assert!((rep.k - 0.5).abs() < 1e-12);
        assert!((rep.m - 1.0).abs() < 1e-12);
        for e in &rep.resolvent_sups {
            assert!((e.value - 1.0).abs() < 1e-12);
            assert!((e.bound - 0.5 * PI).abs() < 1e-12);
        }
        assert!(rep.chain_holds);
    }

    #[test]
    fn sector_skew_blows_up() {
        let mut ks = Vec::new();
        for n in [8usize, 32] {
            let g = diag((1..=n).map(|k| c64(0.0, k as f64)));
            let space = GridSpace::unit(n, 2.0).unwrap();
            match sector_report(&g, c64(-1.0, 0.0), 1.0, &space, &[10.0]) {
                Err(e) => assert!(matches!(e.root(), Error::SpectrumHit { .. })),
                Ok(rep) => ks.push(rep.k),
            }
        }
        if ks.len() == 2 {
            assert!(ks[1] > ks[0]);
        }
    }

    #[test]
    fn mild_zero_generator() {
        let g = GeneratorSpec::new(ComplexMatrix::zeros(2), "zero");
        let v = vec![c64(1.0, 0.0), c64(0.0, 2.0)];
        let sol = mild_solution(&g, |_| v.clone(), 1.0, 2.0, 16).unwrap();
        assert_eq!(sol.maxreg_ratio, 0.0);
        for (t, x) in sol.times.iter().zip(&sol.x) {
            assert!((x[0] - v[0] * *t).norm() < 1e-13 && (x[1] - v[1] * *t).norm() < 1e-13);
        }
    }

    #[test]
    fn mild_scalar_closed_form() {
        let g = diag([c64(-1.0, 0.0)]);
        let sol = mild_solution(&g, |_| vec![Complex64::ONE], 1.0, 2.0, 256).unwrap();
        for (t, x) in sol.times.iter().zip(&sol.x) {
            assert!((x[0].re - (1.0 - (-t).exp())).abs() < 1e-13);
        }
        // ∫_0^1 (1 - e^{-t})^2 dt
        let e1 = (-1.0f64).exp();
        let exact = (1.0 - 2.0 * (1.0 - e1) + 0.5 * (1.0 - e1 * e1)).sqrt();
        assert!((sol.maxreg_ratio - exact).abs() < 1e-4);
    }

    #[test]
    fn mild_dense_matches_diagonal_path() {
        let a = ComplexMatrix::from_real(2, &[-1.0, 0.0, 0.0, -3.0]).unwrap();
        let s = ComplexMatrix::from_real(2, &[1.0, 0.3, 0.0, 1.0]).unwrap();
        let dense = GeneratorSpec::new(a.conjugate_by(&s).unwrap(), "dense");
        let maps_d = step_maps(&a, 0.1).unwrap();
        let maps_n = step_maps(&dense.matrix, 0.1).unwrap();
        let back = |m: &ComplexMatrix| m.conjugate_by(&s.inverse().unwrap()).unwrap();
        assert!((&back(&maps_n.p1) - &maps_d.p1).frobenius() < 1e-13);
        assert!((&back(&maps_n.p2) - &maps_d.p2).frobenius() < 1e-13);
        assert!(mild_solution(&dense, |_| vec![Complex64::ONE; 3], 1.0, 2.0, 16).is_err());
        assert!(mild_solution(&dense, |_| vec![Complex64::ONE; 2], 1.0, 2.0, 8).is_err());
    }

    #[test]
    fn dichotomy_verdicts() {
        let d = dichotomy(&[(8, 1.80), (64, 1.97), (512, 1.99)], 2.0).unwrap();
        assert_eq!(d.verdict, Verdict::FailsInLimit);
        let d = dichotomy(&[(8, 0.6), (64, 0.6), (512, 0.6)], 2.0).unwrap();
        assert_eq!(d.verdict, Verdict::CriterionHolds);
        assert!((d.fit_limit - 0.6).abs() < 1e-12);
        let d = dichotomy(&[(8, 1.0), (16, 1.5), (32, 1.75)], 2.0).unwrap();
        assert_eq!(d.verdict, Verdict::Undetermined);
        assert!((d.fit_limit - 2.0).abs() < 1e-12);
    }

    #[test]
    fn growth_check() {
        let g = diag([c64(-1.0, 0.0), c64(0.0, 3.0)]).with_growth(1.0, 0.0);
        assert!(g.check_growth(5.0).unwrap());
        let g = jordan(0.0).with_growth(1.0, 0.0);
        assert!(!g.check_growth(5.0).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn profile_values_nonnegative(seed in 0u64..1000, d in 1usize..5) {
            let mut r = rng::stream(seed);
            let g = random_gen(&mut r, d);
            let f = Polynomial::new(rng::complex_vector(&mut r, 3)).unwrap();
            let space = GridSpace::unit(d, 2.0).unwrap();
            let grid = log_grid(0.5, 2.0, 5).unwrap();
            let prof = beurling_profile(&g, &f, &grid, &space).unwrap();
            prop_assert!(prof.values.iter().all(|v| *v >= 0.0));
            prop_assert!(prof.empirical_limsup <= prof.values.iter().copied().fold(0.0, f64::max));
            prop_assert_eq!(prof.margin, prof.disc_value - prof.empirical_limsup);
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = ComplexMatrix::from_fn(3, |i, j| c64(i as f64 - 0.1 * j as f64, 1.0 / (1.0 + i as f64 + j as f64))).unwrap();
        assert_eq!(parse_matrix_text(&format_matrix_text(&m)).unwrap(), m);
        assert_eq!(parse_matrix_text("1\n2 -3").unwrap().get(0, 0), c64(2.0, -3.0));
        assert!(parse_matrix_text("2\n1 0 0 0").is_err());
        assert!(parse_matrix_text("0").is_err());
        assert!(parse_matrix_text("1 x 0").is_err());
    }
}
