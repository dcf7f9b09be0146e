//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Maximum number of full Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Sweeps stop once the off-diagonal Frobenius mass falls below this fraction
/// of the Frobenius norm of the input.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-14;

/// Eigendecomposition `A = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    /// `V diag(λ) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| C64::new(x, 0.0))
    }

    /// `V diag(f(λ)) V†`
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let vals: Vec<C64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        self.from_diagonal(&vals)
    }

    /// `V diag(d) V†` for arbitrary diagonal entries `d`.
    pub fn from_diagonal(&self, d: &[C64]) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(i, k)] * d[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Largest residual `‖A v_i − λ_i v_i‖` over all eigenpairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        let n = a.dim();
        (0..n)
            .map(|i| {
                let v = self.eigenvectors.column(i);
                let av = a.matvec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - y * self.eigenvalues[i]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// `tol` bounds the accepted Frobenius norm of `A − A†`; the solver works on
/// the Hermitian part of `A`.
pub fn herm_eig(a: &ComplexMatrix, tol: f64) -> Result<HermEig> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("herm_eig of an empty matrix".into()));
    }
    a.check_finite()?;
    let residual = a.hermiticity_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }

    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFFDIAG_TOL * m.frobenius_norm();

    let mut converged = false;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Once past the first few sweeps, drop elements that no longer
                // affect the diagonal in floating point.
                if sweep > 3 && app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs() {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut m, &mut v, p, q, app, aqq, apq);
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged && off_diagonal_norm(&m) > threshold {
        return Err(Error::NoConvergence { method: "Jacobi", iterations: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = v.permute_columns(&order);
    Ok(HermEig { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Applies `M ← J† M J`, `V ← V J` with the unitary rotation `J` on the
/// (p, q) plane that annihilates `M[p][q]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, app: f64, aqq: f64, apq: C64) {
    let n = m.dim();
    let r = apq.norm();
    let phase = apq / r; // e^{iφ}
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = [[c, s e^{iφ}], [−s e^{−iφ}, c]] on (p, q).
    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c + akq * jqp;
        m[(k, q)] = akp * jpq + akq * c;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c + aqk * jqp.conj();
        m[(q, k)] = apk * jpq.conj() + aqk * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = herm_eig(&sigma_x(), 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(e.max_residual(&sigma_x()) < 1e-14);
    }

    #[test]
    fn tilted_two_level_spectrum() {
        let a = sigma_z().add_scaled(C64::new(0.75, 0.0), &sigma_x());
        let e = herm_eig(&a, 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.25).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.25).abs() < 1e-14);
    }

    #[test]
    fn identity_is_already_diagonal() {
        let e = herm_eig(&ComplexMatrix::identity(4), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        assert_eq!(e.eigenvectors, ComplexMatrix::identity(4));
    }

    #[test]
    fn complex_off_diagonal() {
        // σ_y has eigenvalues ±1.
        let y = ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let e = herm_eig(&y, 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!(e.max_residual(&y) < 1e-14);
        assert!(e.eigenvectors.unitarity_residual() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(herm_eig(&a, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_matrix() {
        let e = herm_eig(&ComplexMatrix::zeros(3), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }
}
