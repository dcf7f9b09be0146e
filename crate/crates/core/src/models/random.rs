//! Seeded random ensembles.
//!
//! All draws come from ChaCha8 streams. Each constructor uses its own stream
//! id, so e.g. `random_hermitian(d, 7)` and `random_state(d, 7)` are
//! independent. Determinism holds within one build of this crate; bit
//! equality with other implementations is not a goal.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::{op_norm, vec_dot, vec_norm, ComplexMatrix};

/// Stream ids; one per kind of draw.
mod streams {
    pub const HERMITIAN: u64 = 1;
    pub const STATE: u64 = 2;
    pub const UNITARY: u64 = 3;
    pub const GINIBRE: u64 = 4;
}

/// Seeded generator with split-stream semantics.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Independent generator for sub-stream `stream` of the same seed.
    pub fn split(&self, stream: u64) -> Self {
        let mut inner = self.inner.clone();
        inner.set_stream(stream);
        inner.set_word_pos(0);
        Self { inner }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Pair of independent standard normals (Box–Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // 1 − U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// Standard complex Gaussian with independent N(0,1) real and imaginary parts.
    pub fn complex_normal(&mut self) -> C64 {
        let (re, im) = self.normal_pair();
        C64::new(re, im)
    }
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SeededRng::with_stream(seed, streams::GINIBRE);
    ComplexMatrix::from_fn(dim, |_, _| rng.complex_normal())
}

/// GUE-like Hermitian matrix `(A + A†)/2`, rescaled to unit operator norm.
pub fn random_hermitian(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("random_hermitian needs dim ≥ 2, got {dim}")));
    }
    let mut rng = SeededRng::with_stream(seed, streams::HERMITIAN);
    let a = ComplexMatrix::from_fn(dim, |_, _| rng.complex_normal());
    let h = a.hermitian_part();
    let norm = op_norm(&h);
    Ok(h.scale_real(1.0 / norm))
}

/// Normalized complex Gaussian state vector.
pub fn random_state(dim: usize, seed: u64) -> Result<Vec<C64>> {
    if dim < 1 {
        return Err(Error::InvalidArgument("random_state needs dim ≥ 1".into()));
    }
    let mut rng = SeededRng::with_stream(seed, streams::STATE);
    let v: Vec<C64> = (0..dim).map(|_| rng.complex_normal()).collect();
    let n = vec_norm(&v);
    Ok(v.into_iter().map(|z| z / n).collect())
}

/// Haar-like unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SeededRng::with_stream(seed, streams::UNITARY);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| rng.complex_normal()).collect();
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for u in &cols {
                let p = vec_dot(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= p * ui;
                }
            }
        }
        let n = vec_norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Hermitian matrix `U diag(eigenvalues) U†` with a random unitary `U`.
///
/// Repeated entries in `eigenvalues` give exactly degenerate spectra, up to
/// rounding in the product.
pub fn random_hermitian_with_spectrum(eigenvalues: &[f64], seed: u64) -> ComplexMatrix {
    let n = eigenvalues.len();
    let u = random_unitary(n, seed);
    let scaled = ComplexMatrix::from_fn(n, |i, j| u[(i, j)] * eigenvalues[j]);
    scaled.matmul(&u.adjoint()).hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_unit_norm_and_deterministic() {
        let a = random_hermitian(6, 7).unwrap();
        assert!(a.is_hermitian(0.0));
        assert!((op_norm(&a) - 1.0).abs() < 1e-12);
        assert_eq!(a, random_hermitian(6, 7).unwrap());
        let b = random_hermitian(6, 8).unwrap();
        assert!((&a - &b).frobenius_norm() > 1e-6);
        assert!(random_hermitian(1, 0).is_err());
    }

    #[test]
    fn state_is_normalized() {
        let s = random_state(5, 3).unwrap();
        assert!((vec_norm(&s) - 1.0).abs() < 1e-14);
        assert_eq!(s, random_state(5, 3).unwrap());
        let t = random_state(5, 4).unwrap();
        assert!(vec_dot(&s, &t).norm() < 1.0 - 1e-6);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(8, 11);
        assert!(u.unitarity_residual() < 1e-13);
    }

    #[test]
    fn split_streams_differ() {
        let base = SeededRng::new(5);
        let mut a = base.split(1);
        let mut b = base.split(2);
        assert_ne!(a.uniform(), b.uniform());
        let mut c = base.split(1);
        let mut a2 = base.split(1);
        assert_eq!(c.uniform(), a2.uniform());
    }

    #[test]
    fn box_muller_moments() {
        let mut rng = SeededRng::new(42);
        let n = 20000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let (a, b) = rng.normal_pair();
            s += a + b;
            s2 += a * a + b * b;
        }
        let mean = s / (2 * n) as f64;
        let var = s2 / (2 * n) as f64 - mean * mean;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }
}
