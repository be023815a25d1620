// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Weighted discrete L^p spaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ℓ^p` over `dim` atoms with measure `weights[i]` on atom `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    weights: Vec<f64>,
    #[serde(with = "exponent")]
    p: f64,
}

impl GridSpace {
    pub fn new(weights: Vec<f64>, p: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidInput(
                "weights must be strictly positive and finite".into(),
            ));
        }
        check_exponent(p)?;
        Ok(Self { weights, p })
    }

    pub fn unit(dim: usize, p: f64) -> Result<Self> {
        Self::new(vec![1.0; dim], p)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_unit_weight(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Same weights, different exponent.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self {
            weights: self.weights.clone(),
            p,
        })
    }

    pub fn norm(&self, x: &[Complex64]) -> f64 {
        weighted_norm(x.iter().map(|z| z.norm()), &self.weights, self.p)
    }

    /// Norm of a vector of magnitudes.
    pub fn norm_abs(&self, x: &[f64]) -> f64 {
        weighted_norm(x.iter().map(|v| v.abs()), &self.weights, self.p)
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

fn weighted_norm(abs: impl Iterator<Item = f64>, weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return abs.fold(0.0, f64::max);
    }
    let vals: Vec<f64> = abs.collect();
    // rescale by the largest entry to avoid overflow in |x|^p
    let scale = vals.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = vals
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v / scale).powf(p))
        .sum();
    scale * sum.powf(1.0 / p)
}

/// Serializes `f64::INFINITY` as the string `"inf"`.
pub(crate) mod exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => super::parse_exponent(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `"2"`, `"4.5"`, `"inf"` or `"infinity"`.
pub fn parse_exponent(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|e| format!("bad exponent '{text}': {e}"))
}
