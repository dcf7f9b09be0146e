//! Instance generators shared by the property tests.
#![allow(dead_code)]

use kamstab::models::{random_hermitian, random_hermitian_with_spectrum, SeededRng};
use kamstab::ComplexMatrix;

/// Sorted levels with spacing at least `min_gap`, each repeated according to
/// a random partition of `dim` (all multiplicities 1 unless `degenerate`).
pub fn spectrum(dim: usize, seed: u64, degenerate: bool, min_gap: f64) -> Vec<f64> {
    let mut rng = SeededRng::with_stream(seed, 901);
    let mut mult = Vec::new();
    let mut left = dim;
    while left > 0 {
        let m = if degenerate { 1 + (rng.uniform() * 3.0) as usize } else { 1 };
        // Keep at least two distinct levels.
        let m = m.min(left).min(dim.saturating_sub(1).max(1));
        mult.push(m);
        left -= m;
    }
    if degenerate && mult.len() == dim && dim > 2 {
        // Force at least one repeated level.
        mult.pop();
        mult[0] += 1;
    }
    let mut level = -1.0;
    let mut out = Vec::with_capacity(dim);
    for m in mult {
        out.extend(std::iter::repeat_n(level, m));
        level += min_gap * (1.0 + rng.uniform());
    }
    out
}

/// GUE when not `degenerate`, otherwise a constructed degenerate spectrum.
pub fn hermitian(dim: usize, seed: u64, degenerate: bool) -> ComplexMatrix {
    if degenerate {
        random_hermitian_with_spectrum(&spectrum(dim, seed, true, 0.2), seed)
    } else {
        random_hermitian(dim, seed).unwrap()
    }
}

/// Controlled-gap Hermitian matrix, degenerate or not.
pub fn gapped(dim: usize, seed: u64, degenerate: bool, min_gap: f64) -> ComplexMatrix {
    random_hermitian_with_spectrum(&spectrum(dim, seed, degenerate, min_gap), seed)
}
