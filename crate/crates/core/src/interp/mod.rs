// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! The discrete `L^p` interpolation scale and the extrapolation bench.
//!
//! Triples store `θ` weighting `p2`: `1/p = (1-θ)/p1 + θ/p2`. Where the
//! opposite convention appears it is named `theta_weighting_p1`.

mod gaussian;

pub use gaussian::{
    gaussian_apply, gaussian_estimate_check, gaussian_kernel, gaussian_matrix, gaussian_square_function_bench,
    maximal_domination_check, maximal_function, random_bumps, write_trials_csv, DominationReport, KernelSpec,
    SquareFunctionBench, SquareTrial, IMAGE_RANGE, PERIODIZATION_TOL,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discpoly::{disc_norm, power_expand, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix};
use crate::semigroup::{log_grid, poly_of_semigroup, smallest_decade_max, validate_t_grid, GeneratorSpec, FAIL_THRESHOLD};
use crate::space::{check_exponent, GridSpace};

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationTriple {
    #[serde(with = "crate::space::exponent")]
    pub p1: f64,
    #[serde(with = "crate::space::exponent")]
    pub p2: f64,
    /// Weight of `p2`.
    pub theta: f64,
    #[serde(with = "crate::space::exponent")]
    pub p: f64,
}

impl InterpolationTriple {
    pub fn new(p1: f64, p2: f64, theta: f64) -> Result<Self> {
        check_exponent(p1)?;
        check_exponent(p2)?;
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!("theta = {theta} not in (0, 1)")));
        }
        if p1 == p2 {
            return Err(Error::ParameterOutOfRange("p1 and p2 must differ".into()));
        }
        let ip = (1.0 - theta) * inv(p1) + theta * inv(p2);
        let p = if ip == 0.0 { f64::INFINITY } else { 1.0 / ip };
        Ok(Self { p1, p2, theta, p })
    }

    /// The triple through a given `p` strictly between the endpoints.
    pub fn through(p1: f64, p2: f64, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if p1 == p2 {
            return Err(Error::ParameterOutOfRange("p1 and p2 must differ".into()));
        }
        let theta = (inv(p1) - inv(p)) / (inv(p1) - inv(p2));
        let t = Self::new(p1, p2, theta)?;
        Ok(Self { p, ..t })
    }

    /// `θ` in the convention `1/p = θ/p1 + (1-θ)/p2`.
    pub fn theta_weighting_p1(&self) -> f64 {
        1.0 - self.theta
    }

    /// Recomputes `p` and checks it against the stored value.
    pub fn validate(&self) -> Result<()> {
        let again = Self::new(self.p1, self.p2, self.theta)?;
        let (a, b) = (inv(again.p), inv(self.p));
        if (a - b).abs() > 1e-12 * a.max(b).max(1e-300) {
            return Err(Error::InvalidInput(format!(
                "stored p = {} disagrees with derived p = {}",
                self.p, again.p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `‖x‖_p ≤ ‖x‖_{p1}^{1-θ} ‖x‖_{p2}^θ`.
pub fn lp_logconvexity_check(x: &[Complex64], triple: &InterpolationTriple, weights: &[f64]) -> Result<Comparison> {
    triple.validate()?;
    if x.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: x.len(),
        });
    }
    let norm = |p: f64| -> Result<f64> { Ok(GridSpace::new(weights.to_vec(), p)?.norm(x)) };
    let lhs = norm(triple.p)?;
    let rhs = norm(triple.p1)?.powf(1.0 - triple.theta) * norm(triple.p2)?.powf(triple.theta);
    Ok(Comparison {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-9,
    })
}

fn exact_endpoint(p: f64) -> bool {
    p == 1.0 || p == 2.0 || p.is_infinite()
}

/// Lower bound of `‖T‖_p` against `‖T‖_{p1}^{1-θ} ‖T‖_{p2}^θ` with exact
/// endpoint norms.
pub fn riesz_thorin_check(t: &ComplexMatrix, triple: &InterpolationTriple, weights: &[f64]) -> Result<Comparison> {
    triple.validate()?;
    if !exact_endpoint(triple.p1) || !exact_endpoint(triple.p2) {
        return Err(Error::ParameterOutOfRange("endpoints must be 1, 2 or inf".into()));
    }
    let norm = |p: f64| -> Result<f64> { Ok(op_norm(t, &GridSpace::new(weights.to_vec(), p)?)?.value) };
    let lhs = norm(triple.p)?;
    let rhs = norm(triple.p1)?.powf(1.0 - triple.theta) * norm(triple.p2)?.powf(triple.theta);
    Ok(Comparison {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub n: usize,
    pub t: f64,
    /// Lower bound of `‖f^N(T(t))‖` at the derived exponent.
    pub measured: f64,
    pub chain: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub triple: InterpolationTriple,
    pub theta_weighting_p1: f64,
    /// `f/‖f‖_D`, the polynomial the chain is evaluated for.
    pub f_normalized: Polynomial,
    /// Plateau of `‖f(T(t))‖` at `p1` over the smallest decade.
    pub rho: f64,
    /// `sup ‖T(s)‖` at `p2` over `s ∈ [0, max(1, N_max·deg f·t_max)]`.
    pub m: f64,
    pub entries: Vec<ChainEntry>,
    pub all_ok: bool,
    /// Smallest `N` in the range whose chain value is below 1.
    pub smallest_n: Option<usize>,
}

/// Evaluates `M^{1-ϑ}(Nn + 1)^{1-ϑ} ρ^{ϑN}` (with `ϑ` weighting `p1`)
/// against measured `‖f^N(T(t))‖_p` at every grid point of the smallest
/// decade, where `‖f(T(t))‖_{p1} ≤ ρ`.
pub fn extrapolation_bench(
    gen: &GeneratorSpec,
    f: &Polynomial,
    triple: &InterpolationTriple,
    t_grid: &[f64],
    n_range: &[usize],
) -> Result<ExtrapolationReport> {
    triple.validate()?;
    validate_t_grid(t_grid)?;
    if n_range.is_empty() || n_range.contains(&0) {
        return Err(Error::ParameterOutOfRange("N range must be nonempty and positive".into()));
    }
    let dn = disc_norm(f).value;
    if !(dn > 0.0) {
        return Err(Error::ParameterOutOfRange("f must be nonzero".into()));
    }
    let fu = f.scale(Complex64::new(1.0 / dn, 0.0));
    let d = gen.dim();
    let s1 = GridSpace::unit(d, triple.p1)?;
    let s2 = GridSpace::unit(d, triple.p2)?;
    let sp = GridSpace::unit(d, triple.p)?;

    let profile: Vec<f64> = t_grid
        .par_iter()
        .enumerate()
        .map(|(i, t)| Ok(op_norm(&poly_of_semigroup(&fu, gen, *t, 0.0)?, &s1)?.value).map_err(|e: Error| e.at(i, *t)))
        .collect::<Result<_>>()?;
    let rho = smallest_decade_max(t_grid, &profile);
    if rho > 1.0 - FAIL_THRESHOLD / dn {
        return Err(Error::ChainInapplicable(rho));
    }

    let n_max = *n_range.iter().max().expect("nonempty");
    let deg = f.degree();
    let t_min = t_grid[t_grid.len() - 1];
    let horizon = 1f64.max((n_max * deg) as f64 * t_grid[0]);
    let mut samples = log_grid(horizon, (horizon / t_min).log10().max(1.0), 64)?;
    samples.push(0.0);
    let m = samples
        .par_iter()
        .map(|s| Ok(op_norm(&gen.at(*s)?, &s2)?.value))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(1.0, f64::max);

    let vt = triple.theta_weighting_p1();
    let chain = |n: usize| {
        let nn = (n * deg) as f64;
        (m * (nn + 1.0)).powf(1.0 - vt) * rho.powf(vt * n as f64)
    };
    let window: Vec<f64> = t_grid
        .iter()
        .copied()
        .filter(|t| *t <= 10.0 * t_min * (1.0 + 1e-12))
        .collect();
    let cases: Vec<(usize, f64)> = n_range.iter().flat_map(|n| window.iter().map(move |t| (*n, *t))).collect();
    let powers: Vec<(usize, Polynomial)> = n_range
        .iter()
        .map(|n| Ok((*n, power_expand(&fu, *n)?)))
        .collect::<Result<_>>()?;
    let entries: Vec<ChainEntry> = cases
        .par_iter()
        .map(|(n, t)| {
            let fnp = &powers.iter().find(|(k, _)| k == n).expect("expanded").1;
            let measured = op_norm(&poly_of_semigroup(fnp, gen, *t, 0.0)?, &sp)?.value;
            let c = chain(*n);
            Ok(ChainEntry {
                n: *n,
                t: *t,
                measured,
                chain: c,
                ok: measured <= c + 1e-6,
            })
        })
        .collect::<Result<_>>()?;
    let mut sorted: Vec<usize> = n_range.to_vec();
    sorted.sort_unstable();
    Ok(ExtrapolationReport {
        triple: *triple,
        theta_weighting_p1: vt,
        f_normalized: fu,
        rho,
        m,
        all_ok: entries.iter().all(|e| e.ok),
        entries,
        smallest_n: sorted.into_iter().find(|n| chain(*n) < 1.0),
    })
}
