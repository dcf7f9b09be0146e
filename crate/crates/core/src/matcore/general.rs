//! Non-Hermitian eigenproblems and dense linear solves.
//!
//! Eigenvalues come from Householder reduction to upper Hessenberg form
//! followed by single-shift complex QR iteration with Wilkinson shifts.
//! Eigenvectors are obtained from the resulting Schur form by triangular
//! back-substitution and mapped back through the accumulated Schur vectors.

use num_complex::Complex64 as C64;

use super::herm::herm_eig;
use super::matrix::{vec_norm, ComplexMatrix};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`gen_eig`].
pub const GEN_EIG_MAX_DIM: usize = 64;

/// Eigenvector matrices with a 2-norm condition estimate above this are
/// treated as evidence of a defective or nearly defective input.
pub const DEFAULT_CONDITION_CAP: f64 = 1e10;

const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigendecomposition `A = S diag(λ) S⁻¹` of a diagonalizable matrix.
#[derive(Debug, Clone)]
pub struct GenEig {
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors as unit-norm columns.
    pub eigenvectors: ComplexMatrix,
    /// `‖S‖₂ ‖S⁻¹‖₂`
    pub condition: f64,
    /// Largest eigenpair residual `‖A v − λ v‖`.
    pub residual: f64,
    inverse: ComplexMatrix,
}

impl GenEig {
    /// `S⁻¹`, computed once during the decomposition.
    pub fn inverse_eigenvectors(&self) -> &ComplexMatrix {
        &self.inverse
    }

    /// `S diag(d) S⁻¹`
    pub fn from_diagonal(&self, d: &[C64]) -> ComplexMatrix {
        let s = &self.eigenvectors;
        let n = s.dim();
        let scaled = ComplexMatrix::from_fn(n, |i, j| s[(i, j)] * d[j]);
        scaled.matmul(&self.inverse)
    }
}

/// General eigendecomposition with the default condition cap.
pub fn gen_eig(a: &ComplexMatrix, tol: f64) -> Result<GenEig> {
    gen_eig_with_cap(a, tol, DEFAULT_CONDITION_CAP)
}

pub fn gen_eig_with_cap(a: &ComplexMatrix, tol: f64, condition_cap: f64) -> Result<GenEig> {
    let n = a.dim();
    if n == 0 || n > GEN_EIG_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "gen_eig supports dimensions 1..={GEN_EIG_MAX_DIM}, got {n}"
        )));
    }
    a.check_finite()?;

    let (mut t, mut z) = hessenberg(a);
    schur_qr(&mut t, &mut z)?;
    let eigenvalues: Vec<C64> = t.diagonal();
    let y = triangular_eigenvectors(&t);
    let mut s = z.matmul(&y);
    for j in 0..n {
        let col = s.column(j);
        let norm = vec_norm(&col);
        let unit: Vec<C64> = col.iter().map(|&x| x / norm).collect();
        s.set_column(j, &unit);
    }

    let inverse = match inverse(&s) {
        Ok(inv) => inv,
        Err(_) => return Err(Error::IllConditioned { condition: f64::INFINITY }),
    };
    let condition = op_norm_unchecked(&s) * op_norm_unchecked(&inverse);
    if !condition.is_finite() || condition > condition_cap {
        return Err(Error::IllConditioned { condition });
    }

    let residual = (0..n)
        .map(|j| {
            let v = s.column(j);
            let av = a.matvec(&v);
            let r: Vec<C64> = av.iter().zip(&v).map(|(x, y)| x - y * eigenvalues[j]).collect();
            vec_norm(&r)
        })
        .fold(0.0, f64::max);
    let scale = a.frobenius_norm().max(1.0);
    if residual > tol * scale {
        return Err(Error::IllConditioned { condition });
    }

    Ok(GenEig { eigenvalues, eigenvectors: s, condition, residual, inverse })
}

fn op_norm_unchecked(a: &ComplexMatrix) -> f64 {
    let g = a.adjoint().matmul(a).hermitian_part();
    match herm_eig(&g, f64::INFINITY) {
        Ok(e) => e.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::INFINITY,
    }
}

/// Householder reduction `A = Q H Q†`; returns `(H, Q)`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = vec_norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        // v = x + e^{iθ}‖x‖ e_1; reflector P = I − 2 v v†/(v†v)
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← P H
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + idx, j)];
            }
            let f = dot * (2.0 / vnorm2);
            for (idx, vi) in v.iter().enumerate() {
                h[(k + 1 + idx, j)] -= vi * f;
            }
        }
        // H ← H P, Q ← Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = C64::new(0.0, 0.0);
                for (idx, vi) in v.iter().enumerate() {
                    dot += m[(i, k + 1 + idx)] * vi;
                }
                let f = dot * (2.0 / vnorm2);
                for (idx, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + idx)] -= f * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Givens rotation `G = [[c, s], [−s̄, c]]` with real `c` such that
/// `G [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Applies `G` to rows `(p, p+1)` from the left over columns `cols`.
fn rot_rows(m: &mut ComplexMatrix, p: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = m[(p, j)];
        let y = m[(p + 1, j)];
        m[(p, j)] = x * c + s * y;
        m[(p + 1, j)] = -s.conj() * x + y * c;
    }
}

/// Applies `G†` to columns `(p, p+1)` from the right over rows `rows`.
fn rot_cols(m: &mut ComplexMatrix, p: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = m[(i, p)];
        let y = m[(i, p + 1)];
        m[(i, p)] = x * c + y * s.conj();
        m[(i, p + 1)] = -x * s + y * c;
    }
}

/// Reduces upper Hessenberg `t` to upper triangular Schur form in place,
/// accumulating the unitary transformations into `z`.
fn schur_qr(t: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<()> {
    let n = t.dim();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let max_iter = QR_ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;

    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let mut scale = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if scale == 0.0 {
                scale = t.max_abs();
            }
            if sub <= eps * scale {
                t[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }

        total += 1;
        iter_since_deflation += 1;
        if total > max_iter {
            return Err(Error::NoConvergence { method: "shifted QR", iterations: max_iter });
        }

        let shift = if iter_since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            t[(hi, hi)] + C64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        // Implicit single-shift QR sweep on the block [lo, hi].
        let mut x = t[(lo, lo)] - shift;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let col_start = if k > lo { k - 1 } else { k };
            rot_rows(t, k, c, s, col_start..n);
            let row_end = (k + 3).min(hi + 1);
            rot_cols(t, k, c, s, 0..row_end);
            rot_cols(z, k, c, s, 0..n);
            if k > lo {
                t[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvectors of an upper triangular matrix, one per column, with unit
/// diagonal component.
fn triangular_eigenvectors(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.dim();
    let smallnum = f64::MIN_POSITIVE * (n as f64) / f64::EPSILON;
    let tnorm = t.max_abs();
    let mut y = ComplexMatrix::zeros(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let smin = (f64::EPSILON * (lambda.norm().max(tnorm))).max(smallnum);
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for m in j + 1..=k {
                acc += t[(j, m)] * y[(m, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < smin {
                denom = C64::new(smin, 0.0);
            }
            y[(j, k)] = -acc / denom;
        }
    }
    y
}

/// LU factorization with partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular);
        }
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::Singular);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.lu.dim();
        let mut inv = ComplexMatrix::zeros(n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            inv.set_column(j, &self.solve(&e));
        }
        inv
    }
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::new(a)?.inverse())
}
