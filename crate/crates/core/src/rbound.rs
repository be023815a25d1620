// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Rademacher averages and R-boundedness.
//!
//! R-bounds are only ever estimated from below: every estimate carries the
//! selection and vectors that attain it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discpoly::{disc_norm, in_c1, power_expand, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::{contour_integral, mat_exp, op_norm, resolvent, ComplexMatrix, ContourSpec};
use crate::rng;
use crate::semigroup::{log_grid, poly_of_semigroup, validate_t_grid, GeneratorSpec, Phases};
use crate::space::GridSpace;

/// Number of batches used for Monte Carlo standard errors.
pub const MC_BATCHES: usize = 32;
/// Relative standard error above which a Monte Carlo value is unconverged.
pub const MC_MAX_REL_SE: f64 = 0.02;
/// Minimum distance from the contour to the poles of `e^z/(e^z - ζ)`.
pub const CONTOUR_MIN_DISTANCE: f64 = 1e-3;

const ASCENT_STEPS: usize = 100;
const ASCENT_COORDS: usize = 128;
const FD_STEP: f64 = 1e-6;
const CHUNK_BITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RademacherConfig {
    #[serde(with = "crate::space::exponent")]
    pub p: f64,
    pub mode: RadMode,
    pub mc_samples: usize,
    pub seed: u64,
    pub exact_cap: usize,
    /// Largest random selection tried by [`rbound_estimate`].
    pub max_selection: usize,
}

impl Default for RademacherConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            mode: RadMode::Exact,
            mc_samples: 4096,
            seed: 0,
            exact_cap: 14,
            max_selection: 6,
        }
    }
}

impl RademacherConfig {
    pub fn exact(p: f64) -> Self {
        Self {
            p,
            ..Self::default()
        }
    }

    pub fn monte_carlo(p: f64, mc_samples: usize, seed: u64) -> Self {
        Self {
            p,
            mode: RadMode::MonteCarlo,
            mc_samples,
            seed,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        crate::space::check_exponent(self.p)?;
        if self.mc_samples == 0 || self.exact_cap == 0 || self.max_selection == 0 {
            return Err(Error::InvalidInput(
                "mc_samples, exact_cap and max_selection must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadNorm {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub mode: RadMode,
    pub converged: bool,
}

fn check_vectors(vectors: &[Vec<Complex64>], space: &GridSpace) -> Result<()> {
    for v in vectors {
        if v.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

fn p_mean(sum: f64, count: f64, p: f64) -> f64 {
    if p.is_infinite() {
        sum
    } else {
        (sum / count).powf(1.0 / p)
    }
}

fn accumulate(acc: f64, norm: f64, p: f64) -> f64 {
    if p.is_infinite() {
        acc.max(norm)
    } else {
        acc + norm.powf(p)
    }
}

/// `(2^{-n} Σ_ε ‖Σ ε_k x_k‖^p)^{1/p}` by Gray-code enumeration.
///
/// `ε` and `-ε` give the same norm, so the first sign is pinned to `+1`.
pub(crate) fn rad_exact(vectors: &[Vec<Complex64>], space: &GridSpace, p: f64) -> f64 {
    let n = vectors.len();
    if n == 0 {
        return 0.0;
    }
    let d = space.dim();
    let free = n - 1;
    let hi = free.min(CHUNK_BITS);
    let lo = free - hi;
    // bits 0..lo index vectors 1..=lo; bits lo..free the remaining ones
    let chunk = |c: usize| -> f64 {
        let mut sum = vectors[0].clone();
        for (k, v) in vectors.iter().enumerate().skip(1) {
            let b = k - 1;
            let neg = b >= lo && (c >> (b - lo)) & 1 == 1;
            for i in 0..d {
                if neg {
                    sum[i] -= v[i];
                } else {
                    sum[i] += v[i];
                }
            }
        }
        let mut acc = accumulate(0.0, space.norm(&sum), p);
        let mut gray = 0usize;
        for j in 1..(1usize << lo) {
            let bit = j.trailing_zeros() as usize;
            gray ^= 1 << bit;
            let v = &vectors[bit + 1];
            let sign = if gray >> bit & 1 == 1 { -2.0 } else { 2.0 };
            for i in 0..d {
                sum[i] += v[i] * sign;
            }
            acc = accumulate(acc, space.norm(&sum), p);
        }
        acc
    };
    let parts: Vec<f64> = (0..1usize << hi).into_par_iter().map(chunk).collect();
    let total = if p.is_infinite() {
        parts.iter().copied().fold(0.0, f64::max)
    } else {
        parts.iter().sum()
    };
    p_mean(total, (1u64 << free) as f64, p)
}

fn rad_monte_carlo(vectors: &[Vec<Complex64>], space: &GridSpace, cfg: &RademacherConfig) -> RadNorm {
    let p = cfg.p;
    let per = cfg.mc_samples.div_ceil(MC_BATCHES);
    let d = space.dim();
    let batches: Vec<f64> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::substream(cfg.seed, b as u64);
            let mut acc = 0.0;
            let mut sum = vec![Complex64::ZERO; d];
            for _ in 0..per {
                sum.iter_mut().for_each(|z| *z = Complex64::ZERO);
                for v in vectors {
                    let s = if r.random::<bool>() { 1.0 } else { -1.0 };
                    for i in 0..d {
                        sum[i] += v[i] * s;
                    }
                }
                acc = accumulate(acc, space.norm(&sum), p);
            }
            if p.is_infinite() {
                acc
            } else {
                acc / per as f64
            }
        })
        .collect();
    let samples = per * MC_BATCHES;
    if p.is_infinite() {
        let value = batches.iter().copied().fold(0.0, f64::max);
        return RadNorm {
            value,
            std_error: 0.0,
            samples,
            mode: RadMode::MonteCarlo,
            converged: true,
        };
    }
    let nb = MC_BATCHES as f64;
    let mean = batches.iter().sum::<f64>() / nb;
    let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (nb - 1.0);
    let se_mean = (var / nb).sqrt();
    let value = mean.powf(1.0 / p);
    // delta method for m ↦ m^{1/p}
    let std_error = if mean > 0.0 {
        se_mean * value / (p * mean)
    } else {
        0.0
    };
    RadNorm {
        value,
        std_error,
        samples,
        mode: RadMode::MonteCarlo,
        converged: value == 0.0 || std_error / value <= MC_MAX_REL_SE,
    }
}

/// Rademacher norm `‖Σ r_k x_k‖_{L^p([0,1]; X)}` of the vectors in `space`.
pub fn rademacher_norm(vectors: &[Vec<Complex64>], space: &GridSpace, cfg: &RademacherConfig) -> Result<RadNorm> {
    cfg.validate()?;
    check_vectors(vectors, space)?;
    match cfg.mode {
        RadMode::Exact => {
            if vectors.len() > cfg.exact_cap {
                return Err(Error::EnumerationTooLarge {
                    n: vectors.len(),
                    cap: cfg.exact_cap,
                });
            }
            Ok(RadNorm {
                value: rad_exact(vectors, space, cfg.p),
                std_error: 0.0,
                samples: if vectors.is_empty() { 0 } else { 1 << (vectors.len() - 1) },
                mode: RadMode::Exact,
                converged: true,
            })
        }
        RadMode::MonteCarlo => Ok(rad_monte_carlo(vectors, space, cfg)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KahaneCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ok: bool,
}

/// `‖Σ r_k a_k x_k‖ ≤ c·max|a_k|·‖Σ r_k x_k‖` with `c = 1` for real and
/// `c = 2` for complex coefficients.
pub fn kahane_contraction_check(
    vectors: &[Vec<Complex64>],
    scalars: &[Complex64],
    space: &GridSpace,
    cfg: &RademacherConfig,
) -> Result<KahaneCheck> {
    if scalars.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            got: scalars.len(),
        });
    }
    if scalars.iter().any(|a| a.norm() > 1.0 + 1e-12) {
        return Err(Error::ParameterOutOfRange("contraction scalars need |a_k| <= 1".into()));
    }
    let cfg = RademacherConfig {
        mode: RadMode::Exact,
        ..cfg.clone()
    };
    let scaled: Vec<Vec<Complex64>> = vectors
        .iter()
        .zip(scalars)
        .map(|(v, a)| v.iter().map(|z| z * a).collect())
        .collect();
    let lhs = rademacher_norm(&scaled, space, &cfg)?.value;
    let constant = if scalars.iter().all(|a| a.im == 0.0) { 1.0 } else { 2.0 };
    let amax = scalars.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let rhs = constant * amax * rademacher_norm(vectors, space, &cfg)?.value;
    Ok(KahaneCheck {
        lhs,
        rhs,
        constant,
        ok: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBoundWitness {
    pub indices: Vec<usize>,
    pub vectors: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBoundEstimate {
    /// Certified lower bound for the R-bound.
    pub value: f64,
    pub witness: RBoundWitness,
    /// `true` when the final ascent stopped at a stationary point.
    pub converged: bool,
    pub trials: usize,
}

/// `‖Σ r_k T_k x_k‖ / ‖Σ r_k x_k‖` by exact enumeration.
pub fn witness_ratio(family: &[ComplexMatrix], w: &RBoundWitness, space: &GridSpace, p: f64) -> f64 {
    let images: Vec<Vec<Complex64>> = w
        .indices
        .iter()
        .zip(&w.vectors)
        .map(|(k, x)| family[*k].apply(x))
        .collect();
    let den = rad_exact(&w.vectors, space, p);
    if den == 0.0 {
        return 0.0;
    }
    rad_exact(&images, space, p) / den
}

fn check_family(family: &[ComplexMatrix], space: &GridSpace) -> Result<()> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty operator family".into()));
    }
    for t in family {
        if t.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: t.dim(),
            });
        }
    }
    Ok(())
}

fn normalize(w: &mut RBoundWitness) {
    let s: f64 = w.vectors.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if s > 0.0 {
        w.vectors.iter_mut().flatten().for_each(|z| *z /= s);
    }
}

fn perturbed(w: &RBoundWitness, coord: usize, h: f64) -> RBoundWitness {
    let mut w = w.clone();
    let d = w.vectors[0].len();
    let (k, rest) = (coord / (2 * d), coord % (2 * d));
    let z = &mut w.vectors[k][rest / 2];
    if rest % 2 == 0 {
        z.re += h;
    } else {
        z.im += h;
    }
    w
}

/// Finite-difference gradient ascent on the vectors of a fixed selection.
fn ascend(
    family: &[ComplexMatrix],
    start: RBoundWitness,
    space: &GridSpace,
    p: f64,
    seed: u64,
) -> (RBoundWitness, f64, bool, usize) {
    let mut r = rng::substream(seed, u64::MAX);
    let mut w = start;
    normalize(&mut w);
    let mut best = witness_ratio(family, &w, space, p);
    let d = space.dim();
    let ncoord = 2 * d * w.vectors.len();
    let mut eta = 0.1;
    let mut evals = 0;
    for _ in 0..ASCENT_STEPS {
        let coords: Vec<usize> = if ncoord <= ASCENT_COORDS {
            (0..ncoord).collect()
        } else {
            (0..ASCENT_COORDS).map(|_| r.random_range(0..ncoord)).collect()
        };
        let scale = (1.0 / ncoord as f64).sqrt();
        let h = FD_STEP * scale;
        let grad: Vec<f64> = coords
            .par_iter()
            .map(|&c| (witness_ratio(family, &perturbed(&w, c, h), space, p) - best) / h)
            .collect();
        evals += coords.len();
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(gnorm > 0.0 && gnorm.is_finite()) {
            return (w, best, true, evals);
        }
        let mut improved = false;
        while eta > 1e-10 {
            let mut cand = w.clone();
            for (c, g) in coords.iter().zip(&grad) {
                cand = perturbed(&cand, *c, eta * g / gnorm);
            }
            normalize(&mut cand);
            let v = witness_ratio(family, &cand, space, p);
            evals += 1;
            if v > best {
                w = cand;
                best = v;
                eta *= 1.5;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            return (w, best, true, evals);
        }
    }
    (w, best, false, evals)
}

/// Lower bound for the R-bound of `family` on `space` with `Rad_p`.
///
/// Tries every singleton at its norm-attaining vector, `budget` random
/// selections (with repetition) and random vectors, and then runs a
/// finite-difference ascent on the best selection found.
pub fn rbound_estimate(
    family: &[ComplexMatrix],
    space: &GridSpace,
    cfg: &RademacherConfig,
    budget: usize,
) -> Result<RBoundEstimate> {
    cfg.validate()?;
    check_family(family, space)?;
    if budget == 0 {
        return Err(Error::ParameterOutOfRange("budget must be >= 1".into()));
    }
    let p = cfg.p;
    let singles: Vec<(f64, RBoundWitness)> = family
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let n = op_norm(t, space)?;
            let mut x = n.witness;
            if x.iter().all(|z| *z == Complex64::ZERO) {
                x = vec![Complex64::ZERO; space.dim()];
                x[0] = Complex64::ONE;
            }
            let w = RBoundWitness {
                indices: vec![k],
                vectors: vec![x],
            };
            Ok((witness_ratio(family, &w, space, p), w))
        })
        .collect::<Result<_>>()?;
    let max_m = cfg.max_selection.min(cfg.exact_cap);
    let randoms: Vec<(f64, RBoundWitness)> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(cfg.seed, i as u64);
            let m = r.random_range(1..=max_m);
            let w = RBoundWitness {
                indices: (0..m).map(|_| r.random_range(0..family.len())).collect(),
                vectors: (0..m).map(|_| rng::complex_vector(&mut r, space.dim())).collect(),
            };
            (witness_ratio(family, &w, space, p), w)
        })
        .collect();
    let pick = |xs: &[(f64, RBoundWitness)]| -> Option<(f64, RBoundWitness)> {
        xs.iter()
            .fold(None::<&(f64, RBoundWitness)>, |b, x| match b {
                Some(b) if b.0 >= x.0 => Some(b),
                _ => Some(x),
            })
            .cloned()
    };
    let best_single = pick(&singles).expect("nonempty family");
    let start = pick(&randoms)
        .filter(|r| r.1.indices.len() > 1)
        .unwrap_or_else(|| best_single.clone());
    let (aw, av, converged, evals) = ascend(family, start.1, space, p, cfg.seed);
    let mut best = best_single;
    for cand in randoms.into_iter().chain(std::iter::once((av, aw))) {
        if cand.0 > best.0 {
            best = cand;
        }
    }
    Ok(RBoundEstimate {
        value: best.0,
        witness: best.1,
        converged,
        trials: family.len() + budget + evals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalculusReport {
    pub trials: usize,
    pub sum_violations: usize,
    pub product_violations: usize,
    /// Largest `ratio(T+S) - ratio(T) - ratio(S)` seen (should be ≤ 0).
    pub worst_sum_excess: f64,
    /// Largest `ratio(TS) - ratio_T(Sx)·ratio(S)` seen (should be ≤ 0).
    pub worst_product_excess: f64,
}

fn pair(fam: &[ComplexMatrix], k: usize) -> &ComplexMatrix {
    if fam.len() == 1 {
        &fam[0]
    } else {
        &fam[k]
    }
}

/// Checks the sum and product rules for R-bounds on every witness tried:
/// random selections and the witness of the sum family's estimate.
pub fn rbound_calculus_check(
    fam_t: &[ComplexMatrix],
    fam_s: &[ComplexMatrix],
    space: &GridSpace,
    cfg: &RademacherConfig,
    budget: usize,
) -> Result<CalculusReport> {
    check_family(fam_t, space)?;
    check_family(fam_s, space)?;
    let m = fam_t.len().max(fam_s.len());
    if (fam_t.len() != m && fam_t.len() != 1) || (fam_s.len() != m && fam_s.len() != 1) {
        return Err(Error::DimensionMismatch {
            expected: fam_t.len(),
            got: fam_s.len(),
        });
    }
    let ts: Vec<ComplexMatrix> = (0..m).map(|k| pair(fam_t, k).clone()).collect();
    let ss: Vec<ComplexMatrix> = (0..m).map(|k| pair(fam_s, k).clone()).collect();
    let sums: Vec<ComplexMatrix> = (0..m).map(|k| &ts[k] + &ss[k]).collect();
    let prods: Vec<ComplexMatrix> = (0..m).map(|k| ts[k].matmul(&ss[k])).collect();
    let p = cfg.p;
    let est = rbound_estimate(&sums, space, cfg, budget)?;
    let max_m = cfg.max_selection.min(cfg.exact_cap);
    let mut witnesses = vec![est.witness];
    for i in 0..budget {
        let mut r = rng::substream(cfg.seed ^ 0xca1c, i as u64);
        let n = r.random_range(1..=max_m);
        witnesses.push(RBoundWitness {
            indices: (0..n).map(|_| r.random_range(0..m)).collect(),
            vectors: (0..n).map(|_| rng::complex_vector(&mut r, space.dim())).collect(),
        });
    }
    let excesses: Vec<(f64, f64)> = witnesses
        .par_iter()
        .map(|w| {
            let sum = witness_ratio(&sums, w, space, p) - witness_ratio(&ts, w, space, p) - witness_ratio(&ss, w, space, p);
            let sx = RBoundWitness {
                indices: w.indices.clone(),
                vectors: w.indices.iter().zip(&w.vectors).map(|(k, x)| ss[*k].apply(x)).collect(),
            };
            let prod = witness_ratio(&prods, w, space, p)
                - witness_ratio(&ts, &sx, space, p) * witness_ratio(&ss, w, space, p);
            (sum, prod)
        })
        .collect();
    Ok(CalculusReport {
        trials: excesses.len(),
        sum_violations: excesses.iter().filter(|e| e.0 > 1e-9).count(),
        product_violations: excesses.iter().filter(|e| e.1 > 1e-9).count(),
        worst_sum_excess: excesses.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max),
        worst_product_excess: excesses.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// `‖(Σ_k |f_k|²)^{1/2}‖` in `space`.
pub fn square_function_norm(functions: &[Vec<Complex64>], space: &GridSpace) -> Result<f64> {
    check_vectors(functions, space)?;
    let g: Vec<f64> = (0..space.dim())
        .map(|i| functions.iter().map(|f| f[i].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok(space.norm_abs(&g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSectorReport {
    pub zeta: Complex64,
    pub t0: f64,
    pub t_samples: Vec<f64>,
    pub alphas: Vec<f64>,
    pub r_semigroup: RBoundEstimate,
    pub r_resolvent: RBoundEstimate,
    pub r_alpha: RBoundEstimate,
    pub sup_semigroup: f64,
    pub sup_resolvent: f64,
    pub sup_alpha: f64,
    /// Largest phase magnitude used for the α-family.
    pub theta: f64,
    /// `K·θ·R{T(t)}` with `K` the measured resolvent-family estimate.
    pub chain_value: f64,
    pub chain_holds: bool,
}

/// R-versions of the sectoriality constants over 16 log-spaced `t ∈ (0, t0]`
/// spanning three decades, with `α = θ/t` for both phase orientations.
pub fn r_sector_report(
    gen: &GeneratorSpec,
    zeta: Complex64,
    t0: f64,
    space: &GridSpace,
    cfg: &RademacherConfig,
    budget: usize,
) -> Result<RSectorReport> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("t0 = {t0}")));
    }
    let phases = Phases::of(zeta)?;
    let ts = log_grid(t0, 3.0, 16)?;
    let alphas: Vec<f64> = ts
        .iter()
        .flat_map(|t| [phases.positive / t, phases.negative / t])
        .collect();
    let semis: Vec<ComplexMatrix> = ts.par_iter().map(|t| gen.at(*t)).collect::<Result<_>>()?;
    let resolvents: Vec<ComplexMatrix> = semis.par_iter().map(|tt| resolvent(tt, zeta)).collect::<Result<_>>()?;
    let alpha_fam: Vec<ComplexMatrix> = alphas
        .par_iter()
        .map(|a| Ok(resolvent(&gen.matrix, Complex64::new(0.0, *a))?.scale_real(-a)))
        .collect::<Result<_>>()?;
    let sup = |fam: &[ComplexMatrix]| -> Result<f64> {
        let v: Vec<f64> = fam.par_iter().map(|m| Ok(op_norm(m, space)?.value)).collect::<Result<_>>()?;
        Ok(v.into_iter().fold(0.0, f64::max))
    };
    let r_semigroup = rbound_estimate(&semis, space, cfg, budget)?;
    let r_resolvent = rbound_estimate(&resolvents, space, cfg, budget)?;
    let r_alpha = rbound_estimate(&alpha_fam, space, cfg, budget)?;
    let theta = phases.positive.max(phases.negative.abs());
    let chain_value = r_resolvent.value * theta * r_semigroup.value;
    Ok(RSectorReport {
        zeta,
        t0,
        sup_semigroup: sup(&semis)?,
        sup_resolvent: sup(&resolvents)?,
        sup_alpha: sup(&alpha_fam)?,
        t_samples: ts,
        alphas,
        chain_holds: r_alpha.value <= chain_value + 1e-4,
        r_semigroup,
        r_resolvent,
        r_alpha,
        theta,
        chain_value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BtCheck {
    pub residual: f64,
    /// Smallest sampled `|e^z - ζ|` on the contour.
    pub distance: f64,
    pub nodes: usize,
    pub contour: ContourSpec,
}

/// Rectangle around the Gershgorin discs of `tA`, padded by
/// `0.25 + 0.1·(its larger side)` except on the right, where the pad is
/// `0.25`.
pub fn gershgorin_rectangle(a: &ComplexMatrix, t: f64, nodes_per_side: usize) -> ContourSpec {
    let d = a.dim();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..d {
        let c = a.get(i, i) * t;
        let r: f64 = (0..d).filter(|j| *j != i).map(|j| a.get(i, j).norm() * t).sum();
        x0 = x0.min(c.re - r);
        x1 = x1.max(c.re + r);
        y0 = y0.min(c.im - r);
        y1 = y1.max(c.im + r);
    }
    let pad = 0.25 + 0.1 * (x1 - x0).max(y1 - y0);
    // the right edge stays close so poles with small Re z remain outside
    ContourSpec::rectangle(x0 - pad, x1 + 0.25, y0 - pad, y1 + pad, nodes_per_side)
}

/// Compares `(ζ - T(t))^{-1}` with `ζ^{-1}(I - B(t))`, where
/// `B(t) = (1/2πi) ∮ e^z/(e^z - ζ) (z - tA)^{-1} dz`.
///
/// Without an explicit contour the Gershgorin rectangle of `tA` is used and
/// rejected if it encloses a pole `log ζ + 2πik`.
pub fn bt_contour_check(
    gen: &GeneratorSpec,
    zeta: Complex64,
    t: f64,
    gamma: Option<&ContourSpec>,
) -> Result<BtCheck> {
    if !(zeta.norm() >= 1.0 - 1e-12) || (zeta - 1.0).norm() < 1e-12 {
        return Err(Error::ParameterOutOfRange(format!(
            "zeta = {zeta} must satisfy |zeta| >= 1 and zeta != 1"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("t = {t}")));
    }
    let contour = match gamma {
        Some(g) => g.clone(),
        None => {
            let g = gershgorin_rectangle(&gen.matrix, t, 32);
            check_poles_outside(&g, zeta)?;
            g
        }
    };
    contour.validate()?;
    let distance = contour
        .sample_points()
        .iter()
        .map(|z| (z.exp() - zeta).norm())
        .fold(f64::INFINITY, f64::min);
    if distance < CONTOUR_MIN_DISTANCE {
        return Err(Error::ContourTooClose(distance));
    }
    let ta = gen.matrix.scale_real(t);
    let b = contour_integral(
        |z| {
            let ez = z.exp();
            Ok(resolvent(&ta, z)?.scale(ez / (ez - zeta)))
        },
        &contour,
    )?;
    let lhs = resolvent(&gen.at(t)?, zeta)?;
    let rhs = (&ComplexMatrix::identity(gen.dim()) - &b.value).scale(zeta.inv());
    Ok(BtCheck {
        residual: (&lhs - &rhs).norm2() / lhs.norm2(),
        distance,
        nodes: b.nodes,
        contour,
    })
}

fn check_poles_outside(g: &ContourSpec, zeta: Complex64) -> Result<()> {
    let pts = g.sample_points();
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, z| (a.0.min(z.re), a.1.max(z.re)));
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, z| (a.0.min(z.im), a.1.max(z.im)));
    let re = zeta.norm().ln();
    let arg = zeta.arg();
    let k0 = ((y0 - arg) / (2.0 * PI)).floor() as i64;
    let k1 = ((y1 - arg) / (2.0 * PI)).ceil() as i64;
    for k in k0..=k1 {
        let im = arg + 2.0 * PI * k as f64;
        if re > x0 && re < x1 && im > y0 && im < y1 {
            return Err(Error::ParameterOutOfRange(format!(
                "contour encloses the pole {re} + {im}i of e^z/(e^z - zeta)"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBeurlingProfile {
    /// Decreasing window tops `ε`.
    pub eps: Vec<f64>,
    /// Lower bounds for `R{f(T(t)) : t ∈ grid, t ≤ ε}`, nonincreasing in the ladder.
    pub values: Vec<f64>,
    /// `sup ‖f(T(t))‖` over each window.
    pub sup_norms: Vec<f64>,
    pub disc_value: f64,
    pub final_value: f64,
    pub margin: f64,
}

/// R-bound ladder over nested windows of the t-grid, about eight rungs.
///
/// Each rung is estimated with the same seed and then replaced by the
/// largest estimate among the windows it contains, which makes the ladder
/// monotone while keeping every value a lower bound.
pub fn r_beurling_profile(
    gen: &GeneratorSpec,
    f: &Polynomial,
    t_grid: &[f64],
    space: &GridSpace,
    cfg: &RademacherConfig,
    budget: usize,
) -> Result<RBeurlingProfile> {
    validate_t_grid(t_grid)?;
    let mats: Vec<ComplexMatrix> = t_grid
        .par_iter()
        .enumerate()
        .map(|(i, t)| poly_of_semigroup(f, gen, *t, 0.0).map_err(|e| e.at(i, *t)))
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = mats.par_iter().map(|m| Ok(op_norm(m, space)?.value)).collect::<Result<_>>()?;
    let step = (t_grid.len() / 8).max(1);
    let rungs: Vec<usize> = (0..t_grid.len()).step_by(step).collect();
    let raw: Vec<f64> = rungs
        .iter()
        .map(|&j| Ok(rbound_estimate(&mats[j..], space, cfg, budget)?.value))
        .collect::<Result<_>>()?;
    let mut values = raw.clone();
    for j in (0..values.len().saturating_sub(1)).rev() {
        values[j] = values[j].max(values[j + 1]);
    }
    let sup_norms = rungs.iter().map(|&j| norms[j..].iter().copied().fold(0.0, f64::max)).collect();
    let disc_value = disc_norm(f).value;
    let final_value = values[values.len() - 1];
    Ok(RBeurlingProfile {
        eps: rungs.iter().map(|&j| t_grid[j]).collect(),
        values,
        sup_norms,
        disc_value,
        final_value,
        margin: disc_value - final_value,
    })
}

/// Closed-form bound `R(|f(1)|^N (1 - C₁^{N+1})/(1 - C₁) + C₂^{N+1}/(1 - C₂))`
/// for `R{f^N(T(t))T(Kt) : t ≤ 1/K}` with `C₁ = Nn/(|f(1)| K sin δ)` and
/// `C₂ = Nn/(K sin δ)`. The first term is dropped when `f(1) = 0`.
pub fn r_converse_bound_eval(f: &Polynomial, n_pow: usize, k: f64, delta: f64, r: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < PI / 2.0) {
        return Err(Error::ParameterOutOfRange(format!("delta = {delta} not in (0, pi/2)")));
    }
    if n_pow == 0 || !(k > 0.0) || !(r >= 0.0) {
        return Err(Error::ParameterOutOfRange("need N >= 1, K > 0, R >= 0".into()));
    }
    if (disc_norm(f).value - 1.0).abs() > 1e-6 || !in_c1(f) {
        return Err(Error::ParameterOutOfRange("f must be normalized and in C1".into()));
    }
    let nn = (n_pow * f.degree()) as f64;
    let ks = k * delta.sin();
    let c2 = nn / ks;
    if c2 >= 1.0 {
        return Err(Error::ParameterOutOfRange(format!("C2 = {c2} >= 1; need K > Nn/sin(delta)")));
    }
    let np1 = n_pow as i32 + 1;
    let f1 = f.eval(Complex64::ONE).norm();
    let first = if f1 == 0.0 {
        0.0
    } else {
        let c1 = nn / (f1 * ks);
        let geom = if (c1 - 1.0).abs() < 1e-12 {
            np1 as f64
        } else {
            (1.0 - c1.powi(np1)) / (1.0 - c1)
        };
        f1.powi(n_pow as i32) * geom
    };
    Ok(r * (first + c2.powi(np1) / (1.0 - c2)))
}

/// Lower bound for `R{T(z) : z = ρe^{iφ}}` with 8 radii log-spaced in
/// `[1e-4, radius]` and 9 angles evenly inside `(-δ, δ)`.
pub fn sector_r_estimate(
    gen: &GeneratorSpec,
    delta: f64,
    radius: f64,
    space: &GridSpace,
    cfg: &RademacherConfig,
    budget: usize,
) -> Result<RBoundEstimate> {
    if !(delta > 0.0 && delta < PI / 2.0) || !(radius > 1e-4) {
        return Err(Error::ParameterOutOfRange("need 0 < delta < pi/2 and radius > 1e-4".into()));
    }
    let radii = log_grid(radius, (radius / 1e-4).log10(), 8)?;
    let zs: Vec<Complex64> = radii
        .iter()
        .flat_map(|r| (0..9).map(move |j| Complex64::from_polar(*r, -delta + 2.0 * delta * (j as f64 + 1.0) / 10.0)))
        .collect();
    let fam: Vec<ComplexMatrix> = zs
        .par_iter()
        .map(|z| mat_exp(&gen.matrix.scale(*z), 1.0))
        .collect::<Result<_>>()?;
    rbound_estimate(&fam, space, cfg, budget)
}

/// Lower bound for `R{f^N(T(t))T(Kt) : t ≤ 1/K}` over `samples` log-spaced
/// times spanning three decades below `1/K`.
#[allow(clippy::too_many_arguments)]
pub fn r_converse_estimate(
    gen: &GeneratorSpec,
    f: &Polynomial,
    n_pow: usize,
    k: f64,
    space: &GridSpace,
    cfg: &RademacherConfig,
    budget: usize,
    samples: usize,
) -> Result<RBoundEstimate> {
    if !(k > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("K = {k}")));
    }
    let fnp = power_expand(f, n_pow)?;
    let ts = log_grid(1.0 / k, 3.0, samples.max(2))?;
    let fam: Vec<ComplexMatrix> = ts
        .par_iter()
        .map(|t| poly_of_semigroup(&fnp, gen, *t, k * t))
        .collect::<Result<_>>()?;
    rbound_estimate(&fam, space, cfg, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use proptest::prelude::*;

    fn vecs(r: &mut rng::Stream, n: usize, d: usize) -> Vec<Vec<Complex64>> {
        (0..n).map(|_| rng::complex_vector(r, d)).collect()
    }

    /// Naive enumeration over all 2^n sign patterns.
    fn rad_naive(v: &[Vec<Complex64>], space: &GridSpace, p: f64) -> f64 {
        let n = v.len();
        let mut acc = 0.0;
        for mask in 0..1usize << n {
            let mut s = vec![Complex64::ZERO; space.dim()];
            for (k, x) in v.iter().enumerate() {
                let e = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
                for i in 0..s.len() {
                    s[i] += x[i] * e;
                }
            }
            acc += space.norm(&s).powf(p);
        }
        (acc / (1usize << n) as f64).powf(1.0 / p)
    }

    #[test]
    fn gray_code_matches_naive() {
        let mut r = rng::stream(1);
        let space = GridSpace::new(vec![0.5, 1.0, 2.0, 1.5], 3.0).unwrap();
        for n in [1usize, 2, 5, 9, 11] {
            let v = vecs(&mut r, n, 4);
            for p in [1.0, 2.0, 4.0] {
                let a = rad_exact(&v, &space, p);
                let b = rad_naive(&v, &space, p);
                assert!((a - b).abs() < 1e-12 * b, "{n} {p}");
            }
        }
    }

    #[test]
    fn single_vector_and_hilbert() {
        let mut r = rng::stream(2);
        let space = GridSpace::unit(5, 2.0).unwrap();
        let cfg = RademacherConfig::exact(2.0);
        let v = vecs(&mut r, 1, 5);
        assert!((rademacher_norm(&v, &space, &cfg).unwrap().value - space.norm(&v[0])).abs() < 1e-14);
        let v = vecs(&mut r, 7, 5);
        let want: f64 = v.iter().map(|x| space.norm(x).powi(2)).sum();
        let got = rademacher_norm(&v, &space, &cfg).unwrap().value;
        assert!((got * got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn enumeration_cap() {
        let mut r = rng::stream(3);
        let space = GridSpace::unit(2, 2.0).unwrap();
        let v = vecs(&mut r, 15, 2);
        assert!(matches!(
            rademacher_norm(&v, &space, &RademacherConfig::exact(2.0)),
            Err(Error::EnumerationTooLarge { n: 15, cap: 14 })
        ));
        assert!(rademacher_norm(&v, &space, &RademacherConfig::monte_carlo(2.0, 2048, 1)).is_ok());
    }

    #[test]
    fn monte_carlo_near_exact() {
        let mut r = rng::stream(4);
        let space = GridSpace::unit(6, 4.0).unwrap();
        let v = vecs(&mut r, 3, 6);
        let exact = rademacher_norm(&v, &space, &RademacherConfig::exact(4.0)).unwrap().value;
        let mc = rademacher_norm(&v, &space, &RademacherConfig::monte_carlo(4.0, 8192, 11)).unwrap();
        assert!(mc.std_error > 0.0);
        assert!((mc.value - exact).abs() <= 3.0 * mc.std_error, "{} {} {}", mc.value, exact, mc.std_error);
        let again = rademacher_norm(&v, &space, &RademacherConfig::monte_carlo(4.0, 8192, 11)).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn kahane_examples() {
        let mut r = rng::stream(5);
        let space = GridSpace::unit(4, 2.0).unwrap();
        let cfg = RademacherConfig::exact(4.0);
        let v = vecs(&mut r, 5, 4);
        let ones = vec![Complex64::ONE; 5];
        let k = kahane_contraction_check(&v, &ones, &space, &cfg).unwrap();
        assert!((k.lhs - k.rhs).abs() < 1e-12 && k.ok && k.constant == 1.0);
        let signs: Vec<Complex64> = [1.0, -1.0, -1.0, 1.0, -1.0].iter().map(|s| c64(*s, 0.0)).collect();
        let k = kahane_contraction_check(&v, &signs, &space, &cfg).unwrap();
        assert!((k.lhs - k.rhs).abs() < 1e-12 && k.ok);
        for p in [1.0, 2.0, 4.0] {
            let cfg = RademacherConfig::exact(p);
            let space = GridSpace::unit(3, p).unwrap();
            for i in 0..40 {
                let n = 1 + i % 8;
                let v = vecs(&mut r, n, 3);
                let a: Vec<Complex64> = (0..n).map(|_| rng::unit_disc(&mut r)).collect();
                assert!(kahane_contraction_check(&v, &a, &space, &cfg).unwrap().ok);
            }
        }
        assert!(kahane_contraction_check(&v, &[c64(2.0, 0.0); 5], &space, &cfg).is_err());
    }

    #[test]
    fn singleton_estimate_is_operator_norm() {
        let mut r = rng::stream(6);
        for p in [1.0, 2.0, f64::INFINITY] {
            let space = GridSpace::unit(4, p).unwrap();
            let t = ComplexMatrix::from_fn(4, |_, _| rng::complex_normal(&mut r)).unwrap();
            let est = rbound_estimate(std::slice::from_ref(&t), &space, &RademacherConfig::exact(p.min(4.0)), 8).unwrap();
            let n = op_norm(&t, &space).unwrap().value;
            assert!(est.value >= n - 1e-9);
            let again = witness_ratio(std::slice::from_ref(&t), &est.witness, &space, p.min(4.0));
            assert!((again - est.value).abs() < 1e-9);
        }
    }

    #[test]
    fn hilbert_collapse() {
        let mut r = rng::stream(7);
        let space = GridSpace::unit(5, 2.0).unwrap();
        let fam: Vec<ComplexMatrix> = (0..4)
            .map(|_| ComplexMatrix::from_fn(5, |_, _| rng::complex_normal(&mut r)).unwrap())
            .collect();
        let est = rbound_estimate(&fam, &space, &RademacherConfig::exact(2.0), 30).unwrap();
        let sup = fam.iter().map(|t| t.norm2()).fold(0.0, f64::max);
        assert!((est.value - sup).abs() < 1e-6, "{} {}", est.value, sup);
    }

    #[test]
    fn scalar_family_between_kahane_bounds() {
        let mut r = rng::stream(8);
        let space = GridSpace::unit(3, 4.0).unwrap();
        let a: Vec<Complex64> = (0..4).map(|_| rng::complex_normal(&mut r)).collect();
        let fam: Vec<ComplexMatrix> = a.iter().map(|x| ComplexMatrix::identity(3).scale(*x)).collect();
        let est = rbound_estimate(&fam, &space, &RademacherConfig::exact(4.0), 40).unwrap();
        let m = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(est.value >= m - 1e-6 && est.value <= 2.0 * m + 1e-6);
    }

    #[test]
    fn calculus_rules() {
        let mut r = rng::stream(9);
        let space = GridSpace::unit(4, 2.0).unwrap();
        let cfg = RademacherConfig::exact(2.0);
        let fam: Vec<ComplexMatrix> = (0..3)
            .map(|_| ComplexMatrix::from_fn(4, |_, _| rng::complex_normal(&mut r)).unwrap())
            .collect();
        let zero = [ComplexMatrix::zeros(4)];
        let rep = rbound_calculus_check(&fam, &zero, &space, &cfg, 20).unwrap();
        assert_eq!(rep.sum_violations, 0);
        assert!(rep.worst_sum_excess.abs() < 1e-9);
        let id = [ComplexMatrix::identity(4)];
        let rep = rbound_calculus_check(&id, &id, &space, &cfg, 5).unwrap();
        assert_eq!((rep.sum_violations, rep.product_violations), (0, 0));
        let other: Vec<ComplexMatrix> = (0..3)
            .map(|_| ComplexMatrix::from_fn(4, |_, _| rng::complex_normal(&mut r)).unwrap())
            .collect();
        let rep = rbound_calculus_check(&fam, &other, &space, &cfg, 200).unwrap();
        assert_eq!((rep.sum_violations, rep.product_violations), (0, 0));
        assert_eq!(rep.trials, 201);
    }

    #[test]
    fn square_function_examples() {
        let mut r = rng::stream(10);
        let space = GridSpace::new(vec![1.0, 0.5, 2.0, 1.0], 2.0).unwrap();
        let f = vecs(&mut r, 1, 4);
        assert!((square_function_norm(&f, &space).unwrap() - space.norm(&f[0])).abs() < 1e-14);
        let f = vecs(&mut r, 6, 4);
        let rad = rademacher_norm(&f, &space, &RademacherConfig::exact(2.0)).unwrap().value;
        assert!((square_function_norm(&f, &space).unwrap() - rad).abs() < 1e-10);
        let space = GridSpace::unit(5, 1.0).unwrap();
        let e: Vec<Vec<Complex64>> = (0..3)
            .map(|k| (0..5).map(|i| if i == k { Complex64::ONE } else { Complex64::ZERO }).collect())
            .collect();
        assert!((square_function_norm(&e, &space).unwrap() - 3.0).abs() < 1e-14);
    }

    fn diag(vals: impl IntoIterator<Item = Complex64>) -> GeneratorSpec {
        let v: Vec<Complex64> = vals.into_iter().collect();
        GeneratorSpec::new(ComplexMatrix::from_diagonal(&v).unwrap(), "diag")
    }

    #[test]
    fn r_sector_hilbert_and_zero() {
        let g = GeneratorSpec::new(ComplexMatrix::zeros(3), "zero");
        let space = GridSpace::unit(3, 2.0).unwrap();
        let rep = r_sector_report(&g, c64(-1.0, 0.0), 1.0, &space, &RademacherConfig::exact(2.0), 10).unwrap();
        assert!((rep.r_semigroup.value - 1.0).abs() < 1e-9);
        assert!((rep.r_resolvent.value - 0.5).abs() < 1e-9);

        let g = diag((1..=6).map(|k| c64(-(k as f64), 0.3 * k as f64)));
        let space = GridSpace::unit(6, 2.0).unwrap();
        let rep = r_sector_report(&g, c64(-1.0, 0.0), 1.0, &space, &RademacherConfig::exact(2.0), 10).unwrap();
        assert!((rep.r_semigroup.value - rep.sup_semigroup).abs() < 1e-6);
        assert!((rep.r_resolvent.value - rep.sup_resolvent).abs() < 1e-6);
        assert!((rep.r_alpha.value - rep.sup_alpha).abs() < 1e-6);
        assert!(rep.chain_holds);
    }

    #[test]
    fn r_sector_weighted_p4_chain() {
        let g = diag((1..=8).map(|k| c64(-(k as f64), 0.0)));
        let w: Vec<f64> = (1..=8).map(|k| 1.0 + 0.1 * k as f64).collect();
        let space = GridSpace::new(w, 4.0).unwrap();
        let rep = r_sector_report(&g, c64(-1.0, 0.0), 1.0, &space, &RademacherConfig::exact(4.0), 20).unwrap();
        assert!(rep.chain_holds, "{} vs {}", rep.r_alpha.value, rep.chain_value);
    }

    #[test]
    fn bt_contour_scalar_and_jordan() {
        let g = diag([c64(-1.0, 0.0)]);
        let rect = ContourSpec::rectangle(-0.5, 0.4, -0.5, 0.5, 32);
        let c = bt_contour_check(&g, c64(-1.0, 0.0), 0.1, Some(&rect)).unwrap();
        assert!(c.residual <= 1e-5, "{}", c.residual);
        let c = bt_contour_check(&g, c64(-1.0, 0.0), 0.1, None).unwrap();
        assert!(c.residual <= 1e-5, "{}", c.residual);

        let m = ComplexMatrix::from_real(2, &[-2.0, 1.0, 0.0, -2.0]).unwrap();
        let g = GeneratorSpec::new(m, "jordan");
        let c = bt_contour_check(&g, c64(0.0, 2.0), 0.2, None).unwrap();
        assert!(c.residual <= 1e-4, "{}", c.residual);
    }

    #[test]
    fn bt_contour_rejections() {
        let g = diag([c64(-1.0, 0.0)]);
        assert!(matches!(
            bt_contour_check(&g, Complex64::ONE, 0.1, None),
            Err(Error::ParameterOutOfRange(_))
        ));
        // contour hugging log(-1) = iπ
        let rect = ContourSpec::circle(c64(0.0, PI), 5e-4, 16);
        assert!(matches!(
            bt_contour_check(&g, c64(-1.0, 0.0), 0.1, Some(&rect)),
            Err(Error::ContourTooClose(_))
        ));
        // huge tA: the Gershgorin box swallows iπ
        let g = diag([c64(-1.0, 0.0), c64(0.0, 40.0)]);
        assert!(bt_contour_check(&g, c64(-1.0, 0.0), 1.0, None).is_err());
    }

    #[test]
    fn r_beurling_ladder() {
        let g = diag((1..=6).map(|k| c64(-(k as f64), 0.5 * k as f64)));
        let space = GridSpace::unit(6, 2.0).unwrap();
        let grid = log_grid(1.0, 3.0, 17).unwrap();
        let f = Polynomial::kato_pazy();
        let prof = r_beurling_profile(&g, &f, &grid, &space, &RademacherConfig::exact(2.0), 10).unwrap();
        for (v, s) in prof.values.iter().zip(&prof.sup_norms) {
            assert!((v - s).abs() < 1e-6);
        }
        assert!(prof.values.windows(2).all(|w| w[1] <= w[0]));

        let zero = GeneratorSpec::new(ComplexMatrix::zeros(2), "zero");
        let f = Polynomial::from_real(&[0.3, 0.5]).unwrap();
        let prof = r_beurling_profile(&zero, &f, &grid, &GridSpace::unit(2, 4.0).unwrap(), &RademacherConfig::exact(4.0), 5)
            .unwrap();
        assert!((prof.final_value - 0.8).abs() < 1e-9);
    }

    #[test]
    fn converse_bound_examples() {
        let f = Polynomial::from_real(&[-0.5, 0.5]).unwrap();
        let delta = PI / 6.0;
        // Nn/(K sin δ) = 1/2 with N = 3, n = 1
        let k = 3.0 / (0.5 * delta.sin());
        let v = r_converse_bound_eval(&f, 3, k, delta, 1.0).unwrap();
        assert!((v - 0.125).abs() < 1e-12);

        let f = Polynomial::from_real(&[-0.25, 0.75]).unwrap();
        let k = 8.0 / delta.sin();
        let v = r_converse_bound_eval(&f, 2, k, delta, 1.0).unwrap();
        assert!((v - (0.25 * 0.875 / 0.5 + (1.0 / 64.0) / 0.75)).abs() < 1e-12);
        assert!((v - 0.458333333333).abs() < 1e-9);

        let v = r_converse_bound_eval(&f, 2, 1e12, delta, 3.0).unwrap();
        assert!((v - 3.0 * 0.25).abs() < 1e-9);

        assert!(r_converse_bound_eval(&f, 2, 1.0, delta, 1.0).is_err());
        assert!(r_converse_bound_eval(&Polynomial::kato_pazy(), 2, 100.0, delta, 1.0).is_err());
    }

    #[test]
    fn converse_estimate_below_bound() {
        let g = diag((1..=8).map(|k| Complex64::from_polar(k as f64, PI + 0.25 * PI)));
        let space = GridSpace::unit(8, 2.0).unwrap();
        let cfg = RademacherConfig::exact(2.0);
        let f = Polynomial::from_real(&[-0.5, 0.5]).unwrap();
        let delta = PI / 8.0;
        let r = sector_r_estimate(&g, delta, 2.0, &space, &cfg, 10).unwrap().value;
        let k = 2.0 * 4.0 / delta.sin();
        let est = r_converse_estimate(&g, &f, 4, k, &space, &cfg, 10, 16).unwrap().value;
        let bound = r_converse_bound_eval(&f, 4, k, delta, r).unwrap();
        assert!(est <= bound, "{est} {bound}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn rad_is_a_norm(seed in 0u64..10_000, n in 1usize..7, lam in -3.0f64..3.0) {
            let mut r = rng::stream(seed);
            let space = GridSpace::new(vec![1.0, 2.0, 0.5], 3.0).unwrap();
            let x = vecs(&mut r, n, 3);
            let y = vecs(&mut r, n, 3);
            let p = 3.0;
            let nx = rad_exact(&x, &space, p);
            let scaled: Vec<Vec<Complex64>> = x.iter().map(|v| v.iter().map(|z| z * lam).collect()).collect();
            prop_assert!((rad_exact(&scaled, &space, p) - lam.abs() * nx).abs() < 1e-9 * (1.0 + nx));
            let sum: Vec<Vec<Complex64>> = x.iter().zip(&y).map(|(a, b)| a.iter().zip(b).map(|(u, v)| u + v).collect()).collect();
            prop_assert!(rad_exact(&sum, &space, p) <= nx + rad_exact(&y, &space, p) + 1e-9);
        }
    }
}
