//! Random matrices and states shared by the integration tests.

#![allow(dead_code)]

use ionlink::linalg::{expm_hermitian_generator, ComplexMatrix};
use ionlink::space::{DensityMatrix, SpaceLayout};
use num_complex::Complex64 as C64;
use rand::Rng;

pub fn gaussian_like<R: Rng>(rng: &mut R) -> f64 {
    // sum of uniforms: cheap, symmetric and good enough to spread samples
    (0..4).map(|_| rng.gen_range(-1.0..1.0)).sum::<f64>() / 2.0
}

pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(gaussian_like(rng), gaussian_like(rng)))
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let a = random_matrix(n, rng);
    (&a + &a.dagger()).scale_real(0.5)
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    expm_hermitian_generator(&random_hermitian(n, rng), 1.0).unwrap()
}

/// `G G^dagger / tr`, full rank with probability one.
pub fn random_density<R: Rng>(layout: SpaceLayout, rng: &mut R) -> DensityMatrix {
    let g = random_matrix(layout.total_dim(), rng);
    let m = &g * &g.dagger();
    let tr = m.trace().re;
    DensityMatrix::new(layout, m.scale_real(1.0 / tr)).unwrap()
}

/// Rank-one state from a random vector.
pub fn random_pure_density<R: Rng>(layout: SpaceLayout, rng: &mut R) -> DensityMatrix {
    let v: Vec<C64> = (0..layout.total_dim())
        .map(|_| C64::new(gaussian_like(rng), gaussian_like(rng)))
        .collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.iter().map(|a| a / n).collect();
    DensityMatrix::new(layout, ComplexMatrix::outer(&v, &v)).unwrap()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}
