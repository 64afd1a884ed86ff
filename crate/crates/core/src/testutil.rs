//! Seeded random complex matrices for tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{CMat, CVec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard circular complex Gaussian sample.
pub fn cn<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_cmat<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    DMatrix::from_fn(rows, cols, |_, _| cn(rng))
}

pub fn random_cvec<R: Rng>(rng: &mut R, len: usize) -> CVec {
    DVector::from_fn(len, |_, _| cn(rng))
}

/// Unit-modulus matrix with uniform phases.
pub fn random_phases<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    DMatrix::from_fn(rows, cols, |_, _| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
}

/// Uniform point on the sphere `||Y||_F^2 = power`.
pub fn random_power_point<R: Rng>(rng: &mut R, rows: usize, cols: usize, power: f64) -> CMat {
    let y = random_cmat(rng, rows, cols);
    let scale = (power / y.norm_squared()).sqrt();
    y * Complex64::from(scale)
}
