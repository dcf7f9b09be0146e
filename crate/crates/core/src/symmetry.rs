//! Block-diagonal (Zeno) projection and the split of an observable into
//! non-conserved, robust and fragile parts relative to a spectral resolution.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{op_norm, structural_tol, ComplexMatrix};
use crate::spectral::SpectralResolution;

/// Default relative threshold for [`classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;

fn check_dim(res: &SpectralResolution, m: &ComplexMatrix) -> Result<()> {
    if m.dim() != res.dim() {
        return Err(Error::DimensionMismatch { expected: res.dim(), found: m.dim() });
    }
    m.check_finite()
}

/// `⟨V⟩ = Σ_k P_k V P_k`
pub fn zeno_project(res: &SpectralResolution, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim(res, v)?;
    let mut out = ComplexMatrix::zeros(v.dim());
    for p in &res.projections {
        out += &p.matmul(v).matmul(p);
    }
    Ok(out)
}

/// `{V} = V − ⟨V⟩`
pub fn offdiag(res: &SpectralResolution, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(v - &zeno_project(res, v)?)
}

/// `Σ_k tr(P_k M)/d_k · P_k`: the part of `M` acting as a scalar on every
/// eigenspace.
pub fn robust_part(res: &SpectralResolution, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim(res, m)?;
    let weights: Vec<C64> = res
        .projections
        .iter()
        .zip(&res.multiplicities)
        .map(|(p, &dk)| p.matmul(m).trace() / dk as f64)
        .collect();
    Ok(res.weighted_sum(&weights))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableDecomposition {
    pub noncons: ComplexMatrix,
    pub robust: ComplexMatrix,
    pub fragile: ComplexMatrix,
    /// `‖M_noncons + M_robust + M_fragile − M‖_F`
    pub residual: f64,
}

impl ObservableDecomposition {
    /// Operator norms of the (non-conserved, robust, fragile) parts.
    pub fn part_norms(&self) -> [f64; 3] {
        [op_norm(&self.noncons), op_norm(&self.robust), op_norm(&self.fragile)]
    }

    /// `M_robust + M_fragile`
    pub fn conserved(&self) -> ComplexMatrix {
        &self.robust + &self.fragile
    }
}

pub fn decompose_observable(res: &SpectralResolution, m: &ComplexMatrix) -> Result<ObservableDecomposition> {
    check_dim(res, m)?;
    let tol = structural_tol(m);
    let residual = m.hermiticity_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let conserved = zeno_project(res, m)?;
    let noncons = m - &conserved;
    let robust = robust_part(res, m)?;
    let fragile = &conserved - &robust;
    let recon = &(&noncons + &robust) + &fragile;
    Ok(ObservableDecomposition {
        residual: (&recon - m).frobenius_norm(),
        noncons,
        robust,
        fragile,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RobustnessLabel {
    Robust,
    Fragile,
    NonConserved,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessClass {
    pub label: RobustnessLabel,
    /// Operator norms of the (non-conserved, robust, fragile) parts.
    pub part_norms: [f64; 3],
    /// Absolute threshold a part norm must exceed to count as present.
    pub threshold: f64,
}

/// Labels `M` by which parts have operator norm above `tol·max(1, ‖M‖)`.
///
/// The zero observable and pure polynomials in `H` are `Robust`; two or more
/// present parts give `Mixed`.
pub fn classify(res: &SpectralResolution, m: &ComplexMatrix, tol: f64) -> Result<RobustnessClass> {
    let dec = decompose_observable(res, m)?;
    let part_norms = dec.part_norms();
    let threshold = tol * op_norm(m).max(1.0);
    let present: Vec<bool> = part_norms.iter().map(|&x| x > threshold).collect();
    let label = match (present[0], present[1], present[2]) {
        (false, _, false) => RobustnessLabel::Robust,
        (true, false, false) => RobustnessLabel::NonConserved,
        (false, false, true) => RobustnessLabel::Fragile,
        _ => RobustnessLabel::Mixed,
    };
    Ok(RobustnessClass { label, part_norms, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::matfun_herm;
    use crate::models::{heisenberg_chain, magnetization, Axis};
    use crate::spectral::{resolve, resolve_default};

    fn sz_res() -> SpectralResolution {
        resolve(&Axis::Z.matrix(), 1e-8).unwrap()
    }

    #[test]
    fn zeno_of_pauli_x_vanishes() {
        let r = sz_res();
        assert_eq!(zeno_project(&r, &Axis::X.matrix()).unwrap().max_abs(), 0.0);
        assert!((&zeno_project(&r, &Axis::Z.matrix()).unwrap() - &Axis::Z.matrix()).max_abs() < 1e-15);
        assert!((&offdiag(&r, &Axis::X.matrix()).unwrap() - &Axis::X.matrix()).max_abs() < 1e-15);
        assert!(offdiag(&r, &Axis::Z.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn zeno_of_all_ones() {
        let r = resolve(&ComplexMatrix::diag_real(&[1.0, 1.0, 2.0]), 1e-8).unwrap();
        let ones = ComplexMatrix::from_fn(3, |_, _| C64::new(1.0, 0.0));
        let z = zeno_project(&r, &ones).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!((&z - &want).max_abs() < 1e-15);
        assert!(zeno_project(&r, &ComplexMatrix::zeros(2)).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_observable(&sz_res(), &Axis::X.matrix()).unwrap();
        assert!((&d.noncons - &Axis::X.matrix()).max_abs() < 1e-15);
        assert!(d.robust.max_abs() < 1e-15 && d.fragile.max_abs() < 1e-15);

        let r = resolve(&ComplexMatrix::diag_real(&[1.0, 1.0, 2.0]), 1e-8).unwrap();
        let d = decompose_observable(&r, &ComplexMatrix::diag_real(&[3.0, 5.0, 7.0])).unwrap();
        assert!(d.noncons.max_abs() < 1e-14);
        assert!((&d.robust - &ComplexMatrix::diag_real(&[4.0, 4.0, 7.0])).max_abs() < 1e-14);
        assert!((&d.fragile - &ComplexMatrix::diag_real(&[-1.0, 1.0, 0.0])).max_abs() < 1e-14);
        assert!(d.residual < 1e-14);
    }

    #[test]
    fn function_of_h_is_robust() {
        let h = heisenberg_chain(3, 1.0).unwrap();
        let r = resolve_default(&h).unwrap();
        let g = matfun_herm(&h, |x| C64::new((-0.3 * x).exp(), 0.0)).unwrap();
        let d = decompose_observable(&r, &g).unwrap();
        assert!((&d.robust - &g).max_abs() < 1e-10);
        assert!(d.noncons.max_abs() < 1e-10 && d.fragile.max_abs() < 1e-10);
        assert_eq!(classify(&r, &g, DEFAULT_CLASSIFY_TOL).unwrap().label, RobustnessLabel::Robust);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(decompose_observable(&sz_res(), &a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn classification_examples() {
        let r = sz_res();
        assert_eq!(classify(&r, &Axis::Z.matrix(), 1e-8).unwrap().label, RobustnessLabel::Robust);
        assert_eq!(classify(&r, &Axis::X.matrix(), 1e-8).unwrap().label, RobustnessLabel::NonConserved);
        let mixed = Axis::X.matrix().add_scaled(C64::new(1.0, 0.0), &Axis::Z.matrix());
        assert_eq!(classify(&r, &mixed, 1e-8).unwrap().label, RobustnessLabel::Mixed);

        let h = heisenberg_chain(4, 1.0).unwrap();
        let rh = resolve_default(&h).unwrap();
        let q1 = magnetization(4, Axis::Z).unwrap();
        let c = classify(&rh, &q1, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(c.label, RobustnessLabel::Fragile);
        assert!(c.part_norms[2] > 1.0);
    }
}
