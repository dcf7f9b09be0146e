//! Self-contained dense complex linear algebra.

mod expm;
mod general;
mod herm;
mod matrix;

use num_complex::Complex64 as C64;

pub use self::expm::{expm, expm_with_cap, DEFAULT_EXPM_CAP};
pub use self::general::{gen_eig, gen_eig_with_cap, inverse, GenEig, Lu, DEFAULT_CONDITION_CAP, GEN_EIG_MAX_DIM};
pub use self::herm::{herm_eig, HermEig, JACOBI_MAX_SWEEPS};
pub use self::matrix::{vec_dot, vec_norm, ComplexMatrix};

use crate::error::{Error, Result};

/// Relative tolerance for structural checks (Hermiticity, unitarity, ...).
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// `STRUCTURAL_TOL · max(1, ‖A‖_F)`
pub fn structural_tol(a: &ComplexMatrix) -> f64 {
    STRUCTURAL_TOL * a.frobenius_norm().max(1.0)
}

/// Spectral norm (largest singular value) as `√λ_max(A†A)`.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    let gram = a.adjoint().matmul(a).hermitian_part();
    match herm_eig(&gram, f64::INFINITY) {
        Ok(eig) => eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

/// Primary matrix function `f(A)` of a Hermitian matrix.
pub fn matfun_herm(a: &ComplexMatrix, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
    let eig = herm_eig(a, structural_tol(a))?;
    let mut values = Vec::with_capacity(eig.eigenvalues.len());
    for &x in &eig.eigenvalues {
        let y = f(x);
        if !y.re.is_finite() || !y.im.is_finite() {
            return Err(Error::DomainError { at: x });
        }
        values.push(y);
    }
    Ok(eig.from_diagonal(&values))
}

/// `A^{−1/2}` for Hermitian positive-definite `A`.
pub fn inv_sqrt_psd(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(a, structural_tol(a))?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min <= tol {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(eig.map(|x| C64::new(1.0 / x.sqrt(), 0.0)))
}
