// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Legendre quadrature of matrix-valued functions on intervals and on
//! piecewise smooth contours.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Nodes per Gauss–Legendre panel.
pub const PANEL_NODES: usize = 16;
/// Maximum number of integrand evaluations per integral.
pub const NODE_CAP: usize = 1 << 14;

const CONTOUR_TOL: f64 = 1e-8;
const STRONG_TOL: f64 = 1e-9;
const DIVERGENCE_RELATIVE: f64 = 1e-4;

/// Result of a quadrature together with its convergence status.
#[derive(Debug, Clone)]
pub struct QuadOutcome {
    pub value: ComplexMatrix,
    pub converged: bool,
    pub nodes: usize,
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// One 16-point panel of `∫_a^b g(s) ds`.
fn panel<G>(g: &G, a: f64, b: f64) -> Result<ComplexMatrix>
where
    G: Fn(f64) -> Result<ComplexMatrix>,
{
    let (x, w) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc: Option<ComplexMatrix> = None;
    for (xi, wi) in x.iter().zip(w) {
        let v = g(mid + half * xi)?.scale_real(wi * half);
        acc = Some(match acc {
            None => v,
            Some(s) => &s + &v,
        });
    }
    Ok(acc.expect("panel has nodes"))
}

/// Adaptive `∫_a^b G(s) ds` with absolute tolerance `1e-9` per entry.
pub fn quad_strong_integral<G>(g: G, a: f64, b: f64) -> Result<QuadOutcome>
where
    G: Fn(f64) -> Result<ComplexMatrix>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        let dim = g(a)?.dim();
        return Ok(QuadOutcome {
            value: ComplexMatrix::zeros(dim),
            converged: true,
            nodes: 1,
        });
    }
    let width = b - a;
    let mut nodes = PANEL_NODES;
    let whole = panel(&g, a, b)?;
    let mut stack = vec![(a, b, whole)];
    let mut total: Option<ComplexMatrix> = None;
    let mut leftover_error = 0.0;
    let mut capped = false;

    while let Some((l, r, coarse)) = stack.pop() {
        let m = 0.5 * (l + r);
        if capped || nodes + 2 * PANEL_NODES > NODE_CAP {
            capped = true;
            leftover_error += estimate_gap(&coarse, None);
            total = Some(accumulate(total, coarse));
            continue;
        }
        let left = panel(&g, l, m)?;
        let right = panel(&g, m, r)?;
        nodes += 2 * PANEL_NODES;
        let fine = &left + &right;
        let err = (&fine - &coarse).max_abs();
        if err <= STRONG_TOL * ((r - l) / width).max(1e-3) || (r - l) < 1e-12 * width {
            total = Some(accumulate(total, fine));
        } else {
            stack.push((m, r, right));
            stack.push((l, m, left));
        }
    }
    let value = total.expect("at least one interval");
    finish(value, nodes, capped, leftover_error)
}

fn accumulate(total: Option<ComplexMatrix>, v: ComplexMatrix) -> ComplexMatrix {
    match total {
        None => v,
        Some(t) => &t + &v,
    }
}

fn estimate_gap(coarse: &ComplexMatrix, fine: Option<&ComplexMatrix>) -> f64 {
    match fine {
        Some(f) => (f - coarse).max_abs(),
        // unrefined panels: the panel value bounds its own error
        None => coarse.max_abs(),
    }
}

fn finish(value: ComplexMatrix, nodes: usize, capped: bool, err: f64) -> Result<QuadOutcome> {
    if !capped {
        return Ok(QuadOutcome {
            value,
            converged: true,
            nodes,
        });
    }
    let relative_change = err / value.max_abs().max(f64::MIN_POSITIVE);
    if relative_change > DIVERGENCE_RELATIVE {
        return Err(Error::QuadratureDivergence {
            nodes,
            relative_change,
        });
    }
    Ok(QuadOutcome {
        value,
        converged: false,
        nodes,
    })
}

/// Smooth arc `s ∈ [0, 1] ↦ z(s)` with a minimum node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
        nodes: usize,
    },
    Arc {
        center: Complex64,
        radius: f64,
        theta0: f64,
        theta1: f64,
        nodes: usize,
    },
}

impl Segment {
    fn nodes(&self) -> usize {
        match self {
            Segment::Line { nodes, .. } | Segment::Arc { nodes, .. } => *nodes,
        }
    }

    /// `(z(s), z'(s))`.
    fn eval(&self, s: f64) -> (Complex64, Complex64) {
        match *self {
            Segment::Line { from, to, .. } => (from + (to - from) * s, to - from),
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
                ..
            } => {
                let th = theta0 + (theta1 - theta0) * s;
                let e = Complex64::from_polar(radius, th);
                (center + e, Complex64::i() * e * (theta1 - theta0))
            }
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to, .. } => (to - from).norm(),
            Segment::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius.abs() * (theta1 - theta0).abs(),
        }
    }
}

/// Closed contour made of smooth segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub segments: Vec<Segment>,
    pub counterclockwise: bool,
}

impl ContourSpec {
    pub fn circle(center: Complex64, radius: f64, nodes: usize) -> Self {
        Self {
            segments: vec![Segment::Arc {
                center,
                radius,
                theta0: 0.0,
                theta1: 2.0 * PI,
                nodes,
            }],
            counterclockwise: true,
        }
    }

    /// Counterclockwise rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nodes_per_side: usize) -> Self {
        let c = [
            Complex64::new(x0, y0),
            Complex64::new(x1, y0),
            Complex64::new(x1, y1),
            Complex64::new(x0, y1),
        ];
        let segments = (0..4)
            .map(|k| Segment::Line {
                from: c[k],
                to: c[(k + 1) % 4],
                nodes: nodes_per_side,
            })
            .collect();
        Self {
            segments,
            counterclockwise: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidInput("contour has no segments".into()));
        }
        if self.segments.iter().any(|s| s.nodes() < 2) {
            return Err(Error::InvalidInput(
                "every contour segment needs at least 2 nodes".into(),
            ));
        }
        let len: f64 = self.segments.iter().map(Segment::length).sum();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::InvalidInput(format!("contour length {len}")));
        }
        let area = self.signed_area();
        if (area > 0.0) != self.counterclockwise {
            return Err(Error::InvalidInput(
                "contour orientation flag disagrees with its parametrization".into(),
            ));
        }
        Ok(())
    }

    /// Shoelace area of a fine polygonal sample; positive for counterclockwise.
    fn signed_area(&self) -> f64 {
        let pts: Vec<Complex64> = self
            .segments
            .iter()
            .flat_map(|s| (0..64).map(move |k| s.eval(k as f64 / 64.0).0))
            .collect();
        let n = pts.len();
        0.5 * (0..n)
            .map(|k| {
                let (a, b) = (pts[k], pts[(k + 1) % n]);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
    }

    /// All quadrature nodes at the initial resolution (for distance checks).
    pub fn sample_points(&self) -> Vec<Complex64> {
        let (x, _) = panel_rule();
        self.segments
            .iter()
            .flat_map(|s| {
                let panels = s.nodes().div_ceil(PANEL_NODES).max(1) * 4;
                (0..panels).flat_map(move |p| {
                    x.iter().map(move |xi| {
                        s.eval((p as f64 + 0.5 * (xi + 1.0)) / panels as f64).0
                    })
                })
            })
            .collect()
    }
}

fn contour_pass<F>(f: &F, gamma: &ContourSpec, refinement: usize) -> Result<(ComplexMatrix, usize)>
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    let (x, w) = panel_rule();
    let mut acc: Option<ComplexMatrix> = None;
    let mut nodes = 0;
    for seg in &gamma.segments {
        let panels = seg.nodes().div_ceil(PANEL_NODES).max(1) * refinement;
        let h = 1.0 / panels as f64;
        for p in 0..panels {
            for (xi, wi) in x.iter().zip(w) {
                let s = h * (p as f64 + 0.5 * (xi + 1.0));
                let (z, dz) = seg.eval(s);
                let v = f(z)?.scale(dz * (0.5 * h * wi));
                acc = Some(accumulate(acc, v));
                nodes += 1;
            }
        }
    }
    let scale = Complex64::new(0.0, -1.0 / (2.0 * PI)); // 1/(2πi)
    Ok((acc.expect("contour has nodes").scale(scale), nodes))
}

/// `(1/2πi) ∮_Γ F(z) dz` with panel doubling until successive estimates agree
/// to `1e-8` in Frobenius norm.
pub fn contour_integral<F>(f: F, gamma: &ContourSpec) -> Result<QuadOutcome>
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    gamma.validate()?;
    let mut refinement = 1;
    let (mut prev, mut used) = contour_pass(&f, gamma, refinement)?;
    loop {
        refinement *= 2;
        let (next, n) = contour_pass(&f, gamma, refinement)?;
        used += n;
        let change = (&next - &prev).frobenius();
        if change < CONTOUR_TOL {
            return Ok(QuadOutcome {
                value: next,
                converged: true,
                nodes: used,
            });
        }
        if 2 * n > NODE_CAP {
            return finish(next, used, true, change);
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::linalg::{mat_exp, resolvent};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact through degree 31
        let i30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((i30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn constant_integrand() {
        let r = quad_strong_integral(|_| Ok(ComplexMatrix::identity(2)), 0.0, 1.0).unwrap();
        assert!((&r.value - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn exponential_integrand() {
        let a = ComplexMatrix::from_diagonal(&[c64(-1.0, 0.0)]).unwrap();
        let r = quad_strong_integral(|s| mat_exp(&a, s), 0.0, 1.0).unwrap();
        assert!((r.value.get(0, 0).re - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn cauchy_integrals_on_the_unit_circle() {
        let g = ContourSpec::circle(Complex64::ZERO, 1.0, 32);
        let id = ComplexMatrix::identity(2);
        let r = contour_integral(|z| Ok(id.scale(z.inv())), &g).unwrap();
        assert!((&r.value - &id).max_abs() < 1e-12);
        let r = contour_integral(|z| Ok(id.scale((z * z).inv())), &g).unwrap();
        assert!(r.value.max_abs() < 1e-12);
    }

    #[test]
    fn spectral_projection_is_idempotent() {
        let a = ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), c64(2.0, 0.0)]).unwrap();
        let g = ContourSpec::circle(c64(1.0, 0.0), 0.5, 32);
        let p = contour_integral(|z| resolvent(&a, z), &g).unwrap().value;
        let expect = ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!((&p - &expect).max_abs() < 1e-10);
        assert!((&p.matmul(&p) - &p).max_abs() < 1e-8);
    }

    #[test]
    fn dense_spectral_projection() {
        // non-normal 3x3 with eigenvalues 1, 2, 4
        let a = ComplexMatrix::from_real(3, &[1.0, 5.0, -2.0, 0.0, 2.0, 7.0, 0.0, 0.0, 4.0]).unwrap();
        let s = ComplexMatrix::from_real(3, &[1.0, 0.2, 0.0, 0.1, 1.0, 0.3, 0.0, 0.4, 1.0]).unwrap();
        let a = a.conjugate_by(&s).unwrap();
        let g = ContourSpec::rectangle(0.5, 2.5, -0.7, 0.7, 32);
        let p = contour_integral(|z| resolvent(&a, z), &g).unwrap().value;
        assert!((&p.matmul(&p) - &p).frobenius() < 1e-8);
        let trace: Complex64 = (0..3).map(|i| p.get(i, i)).sum();
        assert!((trace - c64(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn orientation_is_checked() {
        let mut g = ContourSpec::rectangle(0.0, 1.0, 0.0, 1.0, 16);
        g.counterclockwise = false;
        assert!(g.validate().is_err());
        let bad = ContourSpec::circle(Complex64::ZERO, 1.0, 1);
        assert!(bad.validate().is_err());
    }
}
