//! Two-level analytic examples.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

/// Degenerate two-level system whose conserved observable splits the
/// degeneracy: `H = e·I`, `M = diag(m_1, m_2)`, `V = σ_x`, `ψ_0 = |0⟩`.
///
/// Under `H + εV`, `⟨M⟩_t − ⟨M⟩_0 = −Δ sin²(εt)` with `Δ = m_1 − m_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragileExample {
    pub h: ComplexMatrix,
    pub m: ComplexMatrix,
    pub v: ComplexMatrix,
    pub delta: f64,
    pub psi0: Vec<C64>,
}

impl FragileExample {
    /// Closed-form deviation `−Δ sin²(εt)`.
    pub fn deviation(&self, epsilon: f64, t: f64) -> f64 {
        -self.delta * (epsilon * t).sin().powi(2)
    }
}

pub fn fragile_example(e: f64, m1: f64, m2: f64) -> Result<FragileExample> {
    if !(m1 > m2) {
        return Err(Error::InvalidArgument(format!("fragile example needs m1 > m2, got m1 = {m1}, m2 = {m2}")));
    }
    Ok(FragileExample {
        h: ComplexMatrix::diag_real(&[e, e]),
        m: ComplexMatrix::diag_real(&[m1, m2]),
        v: ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?,
        delta: m1 - m2,
        psi0: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    })
}

/// `(ε_n, t_n)` at which the Zeno approximation of `σ_z + ε σ_x` is
/// maximally wrong: `ε_n = √(4n+3)/(2n+1)`, `t_n = π/(√(1+ε_n²) − 1)`.
///
/// Since `√(1+ε_n²) = 2(n+1)/(2n+1)`, `t_n = (2n+1)π`; the exact and Zeno
/// propagators are then `+I` and `−I`.
pub fn zeno_saturation_sequence(n: u32) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("zeno saturation index must be ≥ 1".into()));
    }
    let k = f64::from(n);
    let eps = (4.0 * k + 3.0).sqrt() / (2.0 * k + 1.0);
    let t = std::f64::consts::PI / ((1.0 + eps * eps).sqrt() - 1.0);
    Ok((eps, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fragile_structure() {
        let f = fragile_example(0.0, 1.0, -1.0).unwrap();
        assert_eq!(f.delta, 2.0);
        assert!(f.h.commutator(&f.m).max_abs() == 0.0);
        assert!((f.deviation(0.1, PI / 0.2) + 2.0).abs() < 1e-12);
        assert_eq!(f.deviation(0.0, 100.0), 0.0);
        assert!(fragile_example(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn saturation_sequence() {
        let (e1, t1) = zeno_saturation_sequence(1).unwrap();
        assert!((e1 - 7f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((t1 - 3.0 * PI).abs() < 1e-12);
        let (e2, t2) = zeno_saturation_sequence(2).unwrap();
        assert!((e2 - 11f64.sqrt() / 5.0).abs() < 1e-15);
        assert!((t2 - 5.0 * PI).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for n in 1..50 {
            let (e, _) = zeno_saturation_sequence(n).unwrap();
            assert!(e < prev);
            prev = e;
        }
        assert!(zeno_saturation_sequence(0).is_err());
    }
}
