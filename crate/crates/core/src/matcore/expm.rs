//! Matrix exponential by scaling and squaring with a diagonal [6/6] Padé
//! approximant.

use num_complex::Complex64 as C64;

use super::general::Lu;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest accepted `‖tA‖`.
pub const DEFAULT_EXPM_CAP: f64 = 1e8;

const PADE_ORDER: usize = 6;
/// After scaling, `‖tA‖ / 2^s ≤ SCALED_NORM_TARGET`.
const SCALED_NORM_TARGET: f64 = 0.5;

/// `e^{tA}`
pub fn expm(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    expm_with_cap(a, t, DEFAULT_EXPM_CAP)
}

pub fn expm_with_cap(a: &ComplexMatrix, t: f64, cap: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("expm time must be finite, got {t}")));
    }
    a.check_finite()?;
    let n = a.dim();
    let x = a.scale_real(t);
    // max(‖·‖₁, ‖·‖∞) bounds the spectral norm from above.
    let norm = x.norm_one().max(x.norm_inf());
    if norm > cap {
        return Err(Error::Overflow { norm, cap });
    }
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }

    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > SCALED_NORM_TARGET {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let x = x.scale_real(0.5f64.powi(squarings as i32));

    let coeffs = pade_coefficients(PADE_ORDER);
    let mut num = ComplexMatrix::identity(n).scale_real(coeffs[0]);
    let mut den = num.clone();
    let mut power = ComplexMatrix::identity(n);
    for (k, &ck) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&x);
        num = num.add_scaled(C64::new(ck, 0.0), &power);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        den = den.add_scaled(C64::new(sign * ck, 0.0), &power);
    }

    let lu = Lu::new(&den)?;
    let mut r = ComplexMatrix::zeros(n);
    for j in 0..n {
        r.set_column(j, &lu.solve(&num.column(j)));
    }
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// Coefficients `c_k = (2p−k)! p! / ((2p)! k! (p−k)!)` of the diagonal
/// Padé approximant of order `p`.
fn pade_coefficients(p: usize) -> Vec<f64> {
    let mut c = vec![1.0; p + 1];
    for k in 1..=p {
        c[k] = c[k - 1] * (p + 1 - k) as f64 / (k * (2 * p + 1 - k)) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn pauli_rotation() {
        let ix = sigma_x().scale(c(0.0, 1.0));
        for &t in &[0.0, 0.3, 1.0, 7.5, -4.2] {
            let u = expm(&ix, t).unwrap();
            let expected = ComplexMatrix::identity(2)
                .scale_real(t.cos())
                .add_scaled(c(0.0, t.sin()), &sigma_x());
            assert!((&u - &expected).max_abs() < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn zero_generator() {
        let u = expm(&ComplexMatrix::zeros(3), 2.0).unwrap();
        assert_eq!(u, ComplexMatrix::identity(3));
    }

    #[test]
    fn full_turn_of_tilted_two_level() {
        // t√(1+ε²) = 4π for ε = √7/3, t = 3π
        let eps = 7f64.sqrt() / 3.0;
        let h = ComplexMatrix::diag_real(&[1.0, -1.0]).add_scaled(c(eps, 0.0), &sigma_x());
        let u = expm(&h.scale(c(0.0, 1.0)), 3.0 * std::f64::consts::PI).unwrap();
        assert!((&u - &ComplexMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn overflow_cap() {
        let a = ComplexMatrix::identity(2).scale_real(10.0);
        assert!(matches!(expm_with_cap(&a, 1.0, 5.0), Err(Error::Overflow { .. })));
        assert!(expm(&a, f64::NAN).is_err());
    }

    #[test]
    fn pade_coefficients_order_six() {
        let c = pade_coefficients(6);
        assert!((c[1] - 0.5).abs() < 1e-16);
        assert!((c[2] - 5.0 / 44.0).abs() < 1e-16);
        assert!((c[6] - 1.0 / 665280.0).abs() < 1e-20);
    }
}
