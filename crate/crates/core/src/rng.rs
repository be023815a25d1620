// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random streams. All randomness in the crate flows through here so
//! that a seed fully determines every result.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-stream `index` of `seed` (fixed stride, so results do not
/// depend on how work is split across threads).
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub fn normal(rng: &mut Stream) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal(rng: &mut Stream) -> Complex64 {
    Complex64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_vector(rng: &mut Stream, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform point in the closed unit disc.
pub fn unit_disc(rng: &mut Stream) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    Complex64::from_polar(r, uniform(rng, 0.0, std::f64::consts::TAU))
}
