// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Gaussian kernels on periodic grids, Gaussian domination and the maximal
//! function.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rbound::square_function_norm;
use crate::rng;
use crate::space::GridSpace;

/// Periods summed on each side when periodizing the kernel.
pub const IMAGE_RANGE: i64 = 8;
/// Largest Gaussian mass allowed outside the summed images.
pub const PERIODIZATION_TOL: f64 = 1e-10;
/// Largest relative change of a fitted constant under refinement.
const STABILITY: f64 = 0.1;
/// Relative floor below which kernel values count as zero.
const ZERO_FLOOR: f64 = 1e-13;

/// Uniform periodic grid in `N ≤ 3` dimensions with Gaussian-bound constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub dim_ambient: usize,
    /// Time dilation in `|T(t)f| ≤ C G(at)|f|`.
    pub a: f64,
    pub c: f64,
    pub points: usize,
    pub period: f64,
}

impl KernelSpec {
    pub fn new(dim_ambient: usize, points: usize, period: f64) -> Result<Self> {
        let s = Self {
            dim_ambient,
            a: 1.0,
            c: 1.0,
            points,
            period,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim_ambient) {
            return Err(Error::ParameterOutOfRange(format!(
                "spatial dimension {} not in 1..=3",
                self.dim_ambient
            )));
        }
        if self.points < 4 || self.points % 2 == 1 {
            return Err(Error::ParameterOutOfRange("points per axis must be even and >= 4".into()));
        }
        if !(self.period > 0.0 && self.period.is_finite() && self.a > 0.0 && self.c > 0.0) {
            return Err(Error::ParameterOutOfRange("period, a and C must be positive".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.period / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim_ambient as i32)
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim_ambient as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The same grid with twice the points per axis.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points,
            ..self.clone()
        }
    }

    /// `L^p` of the grid with cell-volume weights.
    pub fn space(&self, p: f64) -> Result<GridSpace> {
        GridSpace::new(vec![self.cell_volume(); self.len()], p)
    }

    /// Axis indices of a flat index; axis 0 varies fastest.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        (0..self.dim_ambient)
            .map(|_| {
                let i = idx % self.points;
                idx /= self.points;
                i
            })
            .collect()
    }

    pub fn position(&self, idx: usize) -> Vec<f64> {
        self.unflatten(idx).into_iter().map(|i| i as f64 * self.h()).collect()
    }

    /// Minimal-image squared distance between two points.
    pub fn periodic_dist2(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(a, b)| {
                let d = (a - b).rem_euclid(self.period);
                d.min(self.period - d).powi(2)
            })
            .sum()
    }
}

/// `(4πt)^{-N/2} e^{-|x|²/4t}` with `N = x.len()`.
pub fn gaussian_kernel(t: f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (4.0 * PI * t).powf(-(x.len() as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
}

/// Periodized one-dimensional kernel at displacements `j h`, normalized to
/// unit mass (`Σ K h = 1`).
fn kernel_1d(spec: &KernelSpec, t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("t = {t} must be positive")));
    }
    let l = spec.period;
    let tail = erfc((IMAGE_RANGE as f64 + 0.5) * l / (2.0 * t.sqrt()));
    if tail > PERIODIZATION_TOL {
        return Err(Error::PeriodizationError(tail));
    }
    let n = spec.points;
    let h = spec.h();
    let mut k: Vec<f64> = (0..n)
        .map(|j| {
            let d = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 } * h;
            (-IMAGE_RANGE..=IMAGE_RANGE)
                .map(|m| gaussian_kernel(t, &[d + m as f64 * l]))
                .sum()
        })
        .collect();
    let mass: f64 = k.iter().sum::<f64>() * h;
    k.iter_mut().for_each(|v| *v /= mass);
    Ok(k)
}

/// `G(t)f`: circular convolution with the periodized kernel along each axis.
pub fn gaussian_apply(spec: &KernelSpec, t: f64, f: &[Complex64]) -> Result<Vec<Complex64>> {
    spec.validate()?;
    if f.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: f.len(),
        });
    }
    let k = kernel_1d(spec, t)?;
    let n = spec.points;
    let h = spec.h();
    let mut cur = f.to_vec();
    for axis in 0..spec.dim_ambient {
        let stride = n.pow(axis as u32);
        let lines: Vec<usize> = (0..cur.len()).filter(|i| (i / stride).is_multiple_of(n)).collect();
        let out: Vec<Vec<Complex64>> = lines
            .par_iter()
            .map(|&base| {
                let line: Vec<Complex64> = (0..n).map(|j| cur[base + j * stride]).collect();
                (0..n)
                    .map(|i| (0..n).map(|j| line[j] * (k[(i + n - j) % n] * h)).sum())
                    .collect()
            })
            .collect();
        for (base, line) in lines.iter().zip(out) {
            for (j, v) in line.into_iter().enumerate() {
                cur[base + j * stride] = v;
            }
        }
    }
    Ok(cur)
}

fn apply_real(spec: &KernelSpec, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    let z: Vec<Complex64> = f.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    Ok(gaussian_apply(spec, t, &z)?.into_iter().map(|z| z.re).collect())
}

/// Matrix of `G(t)` on the grid (at most 4096 points).
pub fn gaussian_matrix(spec: &KernelSpec, t: f64) -> Result<ComplexMatrix> {
    let len = spec.len();
    if len > 4096 {
        return Err(Error::ParameterOutOfRange(format!("grid of {len} points is too large")));
    }
    let cols: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![Complex64::ZERO; len];
            e[j] = Complex64::ONE;
            gaussian_apply(spec, t, &e)
        })
        .collect::<Result<_>>()?;
    ComplexMatrix::from_fn(len, |i, j| cols[j][i])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub fitted: f64,
    /// The same constant on the grid refined by two.
    pub fitted_refined: f64,
    pub stable: bool,
    pub ok: bool,
}

fn stability(c1: f64, c2: f64) -> DominationReport {
    let stable = (c2 - c1).abs() <= STABILITY * c1.abs();
    DominationReport {
        fitted: c1,
        fitted_refined: c2,
        stable,
        ok: c1.is_finite() && c2.is_finite() && stable,
    }
}

fn check_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("t-grid must be nonempty and positive".into()));
    }
    Ok(())
}

/// Fits `C` in `|T(t)f| ≤ C G(at)f` over the t-grid, the probes and the grid
/// points, on `spec` and on its refinement. `family` and `probes` are
/// rebuilt for each resolution.
pub fn gaussian_estimate_check<F, P>(family: F, spec: &KernelSpec, t_grid: &[f64], probes: P) -> Result<DominationReport>
where
    F: Fn(&KernelSpec, f64) -> Result<ComplexMatrix> + Sync,
    P: Fn(&KernelSpec) -> Vec<Vec<f64>>,
{
    spec.validate()?;
    check_t_grid(t_grid)?;
    let fit = |s: &KernelSpec| -> Result<f64> {
        let probes = probes(s);
        if probes.iter().flatten().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidInput("probes must be nonnegative".into()));
        }
        let per_t: Vec<f64> = t_grid
            .par_iter()
            .map(|&t| {
                let m = family(s, t)?;
                let mut best: f64 = 0.0;
                for f in &probes {
                    let z: Vec<Complex64> = f.iter().map(|v| Complex64::new(*v, 0.0)).collect();
                    let num = m.apply(&z);
                    let den = apply_real(s, s.a * t, f)?;
                    let floor = ZERO_FLOOR * den.iter().copied().fold(0.0, f64::max);
                    for (i, (u, g)) in num.iter().zip(&den).enumerate() {
                        let u = u.norm();
                        if *g <= floor {
                            if u > floor {
                                return Err(Error::DominationFailure { t, index: i });
                            }
                            best = best.max(1.0);
                        } else {
                            best = best.max(u / g);
                        }
                    }
                }
                Ok(best)
            })
            .collect::<Result<_>>()?;
        Ok(per_t.into_iter().fold(0.0, f64::max))
    };
    Ok(stability(fit(spec)?, fit(&spec.refined())?))
}

/// Offsets within half a period, sorted by distance, with the number of
/// offsets inside each grid-aligned radius `0, h, …, (n/2) h`.
fn ball_offsets(spec: &KernelSpec) -> (Vec<Vec<i64>>, Vec<usize>) {
    let n = spec.points as i64;
    let half = n / 2;
    let dim = spec.dim_ambient;
    let mut offs: Vec<(i64, Vec<i64>)> = Vec::new();
    let total = (n as usize).pow(dim as u32);
    for idx in 0..total {
        let v: Vec<i64> = spec.unflatten(idx).into_iter().map(|i| i as i64 - half).collect();
        let d2: i64 = v.iter().map(|x| x * x).sum();
        if d2 <= half * half {
            offs.push((d2, v));
        }
    }
    offs.sort();
    let counts = (0..=half).map(|m| offs.partition_point(|o| o.0 <= m * m)).collect();
    (offs.into_iter().map(|o| o.1).collect(), counts)
}

/// Centered maximal function over discrete Euclidean balls of grid-aligned
/// radii up to half the period.
pub fn maximal_function(f: &[Complex64], spec: &KernelSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if f.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: f.len(),
        });
    }
    let (offs, counts) = ball_offsets(spec);
    let n = spec.points as i64;
    let abs: Vec<f64> = f.iter().map(|z| z.norm()).collect();
    Ok((0..f.len())
        .into_par_iter()
        .map(|i| {
            let base: Vec<i64> = spec.unflatten(i).into_iter().map(|x| x as i64).collect();
            let mut sum = 0.0;
            let mut best: f64 = 0.0;
            let mut next = 0;
            for (k, o) in offs.iter().enumerate() {
                let mut idx = 0usize;
                for a in (0..o.len()).rev() {
                    idx = idx * n as usize + (base[a] + o[a]).rem_euclid(n) as usize;
                }
                sum += abs[idx];
                while next < counts.len() && counts[next] == k + 1 {
                    best = best.max(sum / (k + 1) as f64);
                    next += 1;
                }
            }
            best
        })
        .collect())
}

/// Fits `c` in `sup_t |G(t)f|(x) ≤ c Mf(x)` on `spec` and its refinement.
pub fn maximal_domination_check<B>(spec: &KernelSpec, f: B, t_grid: &[f64]) -> Result<DominationReport>
where
    B: Fn(&KernelSpec) -> Vec<Complex64>,
{
    spec.validate()?;
    check_t_grid(t_grid)?;
    let fit = |s: &KernelSpec| -> Result<f64> {
        let f = f(s);
        let mf = maximal_function(&f, s)?;
        let mut sup = vec![0.0f64; f.len()];
        for t in t_grid {
            for (s, v) in sup.iter_mut().zip(gaussian_apply(s, *t, &f)?) {
                *s = s.max(v.norm());
            }
        }
        let floor = ZERO_FLOOR * mf.iter().copied().fold(0.0, f64::max);
        Ok(sup
            .iter()
            .zip(&mf)
            .map(|(g, m)| if *m <= floor && *g <= floor { 1.0 } else { g / m })
            .fold(0.0, f64::max))
    };
    Ok(stability(fit(spec)?, fit(&spec.refined())?))
}

/// Four Gaussian bumps with random centres, widths in `[0.3, 1.5]·L/8` and
/// complex amplitudes, sampled on the grid. Resolution independent.
pub fn random_bumps(spec: &KernelSpec, r: &mut rng::Stream) -> Vec<Complex64> {
    let l = spec.period;
    let bumps: Vec<(Vec<f64>, f64, Complex64)> = (0..4)
        .map(|_| {
            let c: Vec<f64> = (0..spec.dim_ambient).map(|_| rng::uniform(r, 0.0, l)).collect();
            let w = rng::uniform(r, 0.3, 1.5) * l / 8.0;
            (c, w, rng::complex_normal(r))
        })
        .collect();
    (0..spec.len())
        .map(|i| {
            let x = spec.position(i);
            bumps
                .iter()
                .map(|(c, w, a)| a * (-spec.periodic_dist2(&x, c) / (2.0 * w * w)).exp())
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareTrial {
    pub trial: usize,
    pub n: usize,
    pub ratio: f64,
    pub ratio_refined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareFunctionBench {
    pub fitted: f64,
    pub fitted_refined: f64,
    pub stable: bool,
    pub trials: Vec<SquareTrial>,
}

/// Max over trials of `‖(Σ|G(t_k)f_k|²)^{1/2}‖_p / ‖(Σ|f_k|²)^{1/2}‖_p` with
/// `n ≤ 8` random bumps and `t_k ∈ (0, 1)`, at two resolutions.
pub fn gaussian_square_function_bench(spec: &KernelSpec, p: f64, trials: usize, seed: u64) -> Result<SquareFunctionBench> {
    spec.validate()?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("p = {p} not in (1, inf)")));
    }
    let fine = spec.refined();
    let ratio = |s: &KernelSpec, i: usize| -> Result<(usize, f64)> {
        let mut r = rng::substream(seed, i as u64);
        let n = 1 + (rng::uniform(&mut r, 0.0, 8.0) as usize).min(7);
        let mut fs = Vec::with_capacity(n);
        let mut gs = Vec::with_capacity(n);
        for _ in 0..n {
            let t = rng::uniform(&mut r, 1e-3, 1.0);
            let f = random_bumps(s, &mut r);
            gs.push(gaussian_apply(s, t, &f)?);
            fs.push(f);
        }
        let space = s.space(p)?;
        Ok((n, square_function_norm(&gs, &space)? / square_function_norm(&fs, &space)?))
    };
    let rows: Vec<SquareTrial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (n, a) = ratio(spec, i)?;
            let (_, b) = ratio(&fine, i)?;
            Ok(SquareTrial {
                trial: i,
                n,
                ratio: a,
                ratio_refined: b,
            })
        })
        .collect::<Result<_>>()?;
    let c1 = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let c2 = rows.iter().map(|r| r.ratio_refined).fold(0.0, f64::max);
    let rep = stability(c1, c2);
    Ok(SquareFunctionBench {
        fitted: c1,
        fitted_refined: c2,
        stable: rep.stable,
        trials: rows,
    })
}

/// Writes per-trial rows as CSV with a header line.
pub fn write_trials_csv<W: Write>(mut w: W, trials: &[SquareTrial]) -> std::io::Result<()> {
    writeln!(w, "trial,n,ratio,ratio_refined")?;
    for t in trials {
        writeln!(w, "{},{},{:e},{:e}", t.trial, t.n, t.ratio, t.ratio_refined)?;
    }
    Ok(())
}
