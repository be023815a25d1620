// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Generator families with known limiting regularity, truncated to a
//! requested dimension.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::semigroup::GeneratorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    HolomorphicInLimit,
    NotHolomorphicInLimit,
    Group,
    CosineSource,
}

impl Expected {
    pub fn as_str(self) -> &'static str {
        match self {
            Expected::HolomorphicInLimit => "holomorphic_in_limit",
            Expected::NotHolomorphicInLimit => "not_holomorphic_in_limit",
            Expected::Group => "group",
            Expected::CosineSource => "cosine_source",
        }
    }

    /// Whether the limiting semigroup is holomorphic.
    pub fn holomorphic(self) -> bool {
        matches!(self, Expected::HolomorphicInLimit | Expected::CosineSource)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZooEntry {
    pub name: &'static str,
    /// `None` when the label depends on the parameters.
    pub expected: Option<Expected>,
    pub params: &'static str,
    pub notes: &'static str,
}

pub const CATALOG: &[ZooEntry] = &[
    ZooEntry {
        name: "diag_ray",
        expected: Some(Expected::HolomorphicInLimit),
        params: "phi (default pi/4, |phi| < pi/2)",
        notes: "diag(-e^{i phi} k); normal, |e^{tA}|_2 = e^{-t cos phi}",
    },
    ZooEntry {
        name: "skew_diag",
        expected: Some(Expected::Group),
        params: "",
        notes: "diag(i k); unitary group, isometric at p = 2",
    },
    ZooEntry {
        name: "skew_squared",
        expected: Some(Expected::CosineSource),
        params: "",
        notes: "diag(-k^2) = (skew_diag)^2; cosine family diag(cos tk)",
    },
    ZooEntry {
        name: "jordan",
        expected: Some(Expected::HolomorphicInLimit),
        params: "lambda = [re, im] (default [-1, 0])",
        notes: "single Jordan block; |A| <= |lambda| + 1 uniformly, so the limit is bounded",
    },
    ZooEntry {
        name: "tridiag_laplacian",
        expected: Some(Expected::HolomorphicInLimit),
        params: "h (default 1/(dim+1))",
        notes: "Dirichlet second difference / h^2; self-adjoint, negative",
    },
    ZooEntry {
        name: "shift_periodic",
        expected: Some(Expected::Group),
        params: "period (default 2 pi)",
        notes: "spectral derivative on the periodic grid; generates cyclic translations",
    },
    ZooEntry {
        name: "heat_conv",
        expected: Some(Expected::HolomorphicInLimit),
        params: "period (default 2 pi)",
        notes: "periodic heat generator, Fourier symbol -(2 pi k / period)^2",
    },
    ZooEntry {
        name: "mult_symbol",
        expected: None,
        params: "symbol = [[re, im], ...] of length dim",
        notes: "diagonal multiplication; label from the symbol's sector",
    },
];

/// Optional parameters of the zoo builders.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZooParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Vec<[f64; 2]>>,
}

impl ZooParams {
    /// Parses `key=value` assignments; values are JSON.
    pub fn parse_assignments(items: &[String]) -> Result<Self> {
        let mut map = serde_json::Map::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::BadParams(format!("expected key=value, got '{item}'")))?;
            let v: serde_json::Value =
                serde_json::from_str(v.trim()).map_err(|e| Error::BadParams(format!("{k}: {e}")))?;
            map.insert(k.trim().to_string(), v);
        }
        serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| Error::BadParams(e.to_string()))
    }

    fn given(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.phi.is_some() {
            v.push("phi");
        }
        if self.lambda.is_some() {
            v.push("lambda");
        }
        if self.h.is_some() {
            v.push("h");
        }
        if self.period.is_some() {
            v.push("period");
        }
        if self.symbol.is_some() {
            v.push("symbol");
        }
        v
    }

    fn allow(&self, name: &str, allowed: &[&str]) -> Result<()> {
        match self.given().into_iter().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::BadParams(format!("{name} takes no parameter '{k}'"))),
            None => Ok(()),
        }
    }
}

pub fn entry(name: &str) -> Result<&'static ZooEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::BadParams(format!("{name} must be positive, got {v}")))
    }
}

fn diag(d: Vec<Complex64>) -> Result<ComplexMatrix> {
    ComplexMatrix::from_diagonal(&d)
}

/// Circulant matrix with the given Fourier symbol at frequencies
/// `-dim/2 < k ≤ dim/2`.
fn circulant(dim: usize, symbol: impl Fn(i64) -> Complex64) -> Result<ComplexMatrix> {
    let n = dim as i64;
    let freqs: Vec<(i64, Complex64)> = (0..n)
        .map(|k| {
            let kk = if k > n / 2 { k - n } else { k };
            (kk, symbol(kk) / dim as f64)
        })
        .collect();
    ComplexMatrix::from_fn(dim, |i, j| {
        freqs
            .iter()
            .map(|(k, s)| s * Complex64::from_polar(1.0, TAU * (*k * (i as i64 - j as i64)).rem_euclid(n) as f64 / n as f64))
            .sum()
    })
}

fn symbol_sector(symbol: &[Complex64]) -> Expected {
    if symbol.iter().all(|z| z.re.abs() <= 1e-12 * z.norm().max(1.0)) {
        return Expected::Group;
    }
    // half-angle of the smallest sector about the negative axis
    let angle = symbol
        .iter()
        .filter(|z| z.norm() > 0.0)
        .map(|z| (-z).arg().abs())
        .fold(0.0, f64::max);
    if angle < FRAC_PI_2 - 0.05 {
        Expected::HolomorphicInLimit
    } else {
        Expected::NotHolomorphicInLimit
    }
}

/// Builds the named family at dimension `dim` and returns it with its label.
pub fn build_labeled(name: &str, dim: usize, params: &ZooParams) -> Result<(GeneratorSpec, Expected)> {
    let e = entry(name)?;
    if dim == 0 {
        return Err(Error::BadParams("dimension must be positive".into()));
    }
    let ks = || (1..=dim).map(|k| k as f64);
    let label = format!("{name}({dim})");
    let (matrix, growth, expected) = match name {
        "diag_ray" => {
            params.allow(name, &["phi"])?;
            let phi = params.phi.unwrap_or(FRAC_PI_4);
            if !(phi.abs() < FRAC_PI_2) {
                return Err(Error::BadParams(format!("|phi| = {} must be below pi/2", phi.abs())));
            }
            let ray = -Complex64::from_polar(1.0, phi);
            (diag(ks().map(|k| ray * k).collect())?, (1.0, 0.0), e.expected)
        }
        "skew_diag" => {
            params.allow(name, &[])?;
            (diag(ks().map(|k| Complex64::new(0.0, k)).collect())?, (1.0, 0.0), e.expected)
        }
        "skew_squared" => {
            params.allow(name, &[])?;
            (diag(ks().map(|k| Complex64::new(-k * k, 0.0)).collect())?, (1.0, 0.0), e.expected)
        }
        "jordan" => {
            params.allow(name, &["lambda"])?;
            let [re, im] = params.lambda.unwrap_or([-1.0, 0.0]);
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::BadParams("lambda must be finite".into()));
            }
            let m = ComplexMatrix::from_fn(dim, |i, j| {
                if i == j {
                    Complex64::new(re, im)
                } else if j == i + 1 {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            })?;
            (m, (1.0, re + 1.0), e.expected)
        }
        "tridiag_laplacian" => {
            params.allow(name, &["h"])?;
            let h = positive("h", params.h.unwrap_or(1.0 / (dim as f64 + 1.0)))?;
            let s = 1.0 / (h * h);
            let m = ComplexMatrix::from_fn(dim, |i, j| match i.abs_diff(j) {
                0 => Complex64::new(-2.0 * s, 0.0),
                1 => Complex64::new(s, 0.0),
                _ => Complex64::ZERO,
            })?;
            (m, (1.0, 0.0), e.expected)
        }
        "shift_periodic" => {
            params.allow(name, &["period"])?;
            let l = positive("period", params.period.unwrap_or(TAU))?;
            let half = dim as i64 / 2;
            let m = circulant(dim, |k| {
                if dim.is_multiple_of(2) && k == half {
                    Complex64::ZERO
                } else {
                    Complex64::new(0.0, TAU * k as f64 / l)
                }
            })?;
            (m, (1.0, 0.0), e.expected)
        }
        "heat_conv" => {
            params.allow(name, &["period"])?;
            let l = positive("period", params.period.unwrap_or(TAU))?;
            let m = circulant(dim, |k| Complex64::new(-(TAU * k as f64 / l).powi(2), 0.0))?;
            (m, (1.0, 0.0), e.expected)
        }
        "mult_symbol" => {
            params.allow(name, &["symbol"])?;
            let sym: Vec<Complex64> = params
                .symbol
                .as_ref()
                .ok_or_else(|| Error::BadParams("mult_symbol needs a symbol".into()))?
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            if sym.len() != dim {
                return Err(Error::BadParams(format!("symbol has {} entries, dimension is {dim}", sym.len())));
            }
            if sym.iter().any(|z| !z.is_finite()) {
                return Err(Error::BadParams("symbol must be finite".into()));
            }
            let omega = sym.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let expected = symbol_sector(&sym);
            (diag(sym)?, (1.0, omega), Some(expected))
        }
        _ => unreachable!("catalog entry without builder"),
    };
    let mut spec = GeneratorSpec::new(matrix, label).with_growth(growth.0, growth.1);
    spec.family_index = Some(dim);
    Ok((spec, expected.expect("label resolved")))
}

/// Builds the named family at dimension `dim`.
pub fn build(name: &str, dim: usize, params: &ZooParams) -> Result<GeneratorSpec> {
    Ok(build_labeled(name, dim, params)?.0)
}

/// Truncation dimensions used for scaling studies.
pub fn default_dims() -> Vec<usize> {
    (3..=9).map(|k| 1usize << k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::discpoly::Polynomial;
    use crate::rng;
    use crate::semigroup::{beurling_profile, log_grid};
    use crate::space::GridSpace;

    fn none() -> ZooParams {
        ZooParams::default()
    }

    #[test]
    fn documented_matrices() {
        let s = build("skew_diag", 4, &none()).unwrap();
        assert_eq!(s.matrix.diagonal(), vec![c64(0.0, 1.0), c64(0.0, 2.0), c64(0.0, 3.0), c64(0.0, 4.0)]);
        assert!(s.matrix.is_diagonal());
        let p = ZooParams {
            h: Some(1.0),
            ..none()
        };
        let l = build("tridiag_laplacian", 3, &p).unwrap();
        let want = ComplexMatrix::from_real(3, &[-2.0, 1.0, 0.0, 1.0, -2.0, 1.0, 0.0, 1.0, -2.0]).unwrap();
        assert_eq!(l.matrix, want);
        let j = build("jordan", 3, &none()).unwrap();
        assert_eq!(j.matrix.get(0, 1), Complex64::ONE);
        assert_eq!(j.matrix.get(1, 0), Complex64::ZERO);
    }

    #[test]
    fn diag_ray_decay() {
        let phi = FRAC_PI_4;
        let s = build("diag_ray", 16, &none()).unwrap();
        for t in [0.01, 0.3, 2.0] {
            let n = s.at(t).unwrap().norm2();
            assert!((n - (-t * phi.cos()).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn skew_isometric() {
        let s = build("skew_diag", 32, &none()).unwrap();
        let sp = build("shift_periodic", 32, &none()).unwrap();
        let mut r = rng::stream(60);
        for t in [0.001, 0.5, 3.0] {
            for g in [&s, &sp] {
                let x = rng::complex_vector(&mut r, 32);
                let y = g.at(t).unwrap().apply(&x);
                let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let ny: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!((nx - ny).abs() < 1e-12 * nx);
            }
        }
    }

    #[test]
    fn shift_translates_trig_polynomials() {
        let n = 16;
        let g = build("shift_periodic", n, &none()).unwrap();
        let h = TAU / n as f64;
        let f = |x: f64| (3.0 * x).sin() + 0.5 * (2.0 * x).cos();
        let x: Vec<Complex64> = (0..n).map(|j| c64(f(j as f64 * h), 0.0)).collect();
        let y = g.at(0.7).unwrap().apply(&x);
        for (j, v) in y.iter().enumerate() {
            assert!((v.re - f(j as f64 * h + 0.7)).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn heat_symbol() {
        let n = 8;
        let g = build("heat_conv", n, &none()).unwrap();
        let x: Vec<Complex64> = (0..n).map(|j| c64((2.0 * TAU * j as f64 / n as f64).cos(), 0.0)).collect();
        let y = g.at(0.1).unwrap().apply(&x);
        for (a, b) in x.iter().zip(&y) {
            assert!((a * (-0.4f64).exp() - b).norm() < 1e-12);
        }
    }

    #[test]
    fn growth_data_holds() {
        let lam = ZooParams {
            lambda: Some([0.3, 2.0]),
            ..none()
        };
        let sym = ZooParams {
            symbol: Some(vec![[-1.0, 3.0], [0.5, 0.0], [0.0, -2.0]]),
            ..none()
        };
        for (name, dim, p) in [
            ("diag_ray", 8, none()),
            ("skew_diag", 8, none()),
            ("jordan", 6, lam),
            ("tridiag_laplacian", 8, none()),
            ("shift_periodic", 8, none()),
            ("heat_conv", 8, none()),
            ("mult_symbol", 3, sym),
        ] {
            let g = build(name, dim, &p).unwrap();
            assert_eq!(g.dim(), dim);
            assert!(g.check_growth(4.0).unwrap(), "{name}");
        }
    }

    #[test]
    fn labels_and_errors() {
        assert!(matches!(build("nope", 4, &none()), Err(Error::UnknownEntry(_))));
        let bad_phi = ZooParams {
            phi: Some(2.0),
            ..none()
        };
        assert!(matches!(build("diag_ray", 4, &bad_phi), Err(Error::BadParams(_))));
        assert!(matches!(build("skew_diag", 4, &bad_phi), Err(Error::BadParams(_))));
        assert!(matches!(build("mult_symbol", 4, &none()), Err(Error::BadParams(_))));
        assert!(matches!(build("skew_diag", 0, &none()), Err(Error::BadParams(_))));
        let p = ZooParams::parse_assignments(&["phi=0.3".into(), "lambda=[1,2]".into()]).unwrap();
        assert_eq!(p.phi, Some(0.3));
        assert_eq!(p.lambda, Some([1.0, 2.0]));
        assert!(ZooParams::parse_assignments(&["bogus=1".into()]).is_err());

        let sym = |v: Vec<[f64; 2]>| {
            let n = v.len();
            build_labeled("mult_symbol", n, &ZooParams { symbol: Some(v), ..none() }).unwrap().1
        };
        assert_eq!(sym(vec![[-1.0, 0.5], [-2.0, 0.0]]), Expected::HolomorphicInLimit);
        assert_eq!(sym(vec![[0.0, 1.0], [0.0, -2.0]]), Expected::Group);
        assert_eq!(sym(vec![[-1e-3, 5.0], [-1.0, 0.0]]), Expected::NotHolomorphicInLimit);
    }

    #[test]
    fn margins_match_labels() {
        let f = Polynomial::kato_pazy();
        for e in CATALOG.iter().filter(|e| e.name != "mult_symbol") {
            let dim = 64;
            let (g, label) = build_labeled(e.name, dim, &none()).unwrap();
            let norm = g.matrix.norm2();
            let grid = log_grid(100.0 / norm, 2.0, 41).unwrap();
            let prof = beurling_profile(&g, &f, &grid, &GridSpace::unit(dim, 2.0).unwrap()).unwrap();
            if label.holomorphic() {
                assert!(prof.margin >= 0.1, "{} {}", e.name, prof.margin);
            } else {
                assert!(prof.margin <= 0.1, "{} {}", e.name, prof.margin);
            }
        }
    }
}
