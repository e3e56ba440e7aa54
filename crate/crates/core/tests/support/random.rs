//! Seeded random test matrices with prescribed singular values.

use calderon::linsolve::DenseMatrix;
use num_complex::Complex64;
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};

pub fn rng(seed: u64) -> TestRng {
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_mut(8) {
        chunk.copy_from_slice(&seed.to_le_bytes());
    }
    TestRng::from_seed(RngAlgorithm::ChaCha, &bytes)
}

pub fn complex_vec(rng: &mut TestRng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.dim();
    DenseMatrix::from_fn(n, |i, j| (0..n).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

/// I - 2 v v* / |v|^2
fn householder(rng: &mut TestRng, n: usize) -> DenseMatrix {
    let v = complex_vec(rng, n);
    let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    DenseMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) - v[i] * v[j].conj() * (2.0 / norm2)
    })
}

/// U diag(sigma) V* with unitary U, V and sigma log-spaced from 1 down to
/// 1/cond, so the 2-norm condition number is exactly `cond`.
pub fn conditioned(rng: &mut TestRng, n: usize, cond: f64) -> DenseMatrix {
    let u = matmul(&householder(rng, n), &householder(rng, n));
    let v = matmul(&householder(rng, n), &householder(rng, n));
    let sigma: Vec<f64> = (0..n)
        .map(|k| cond.powf(-(k as f64) / (n - 1).max(1) as f64))
        .collect();
    DenseMatrix::from_fn(n, |i, j| (0..n).map(|k| u[(i, k)] * sigma[k] * v[(k, j)]).sum())
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
