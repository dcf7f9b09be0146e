//! Spectral resolutions `A = Σ e_k P_k` with explicit eigenvalue clustering.
//!
//! Hermitian inputs give orthogonal projections built from orthonormal
//! eigenvector blocks; general diagonalizable inputs (superoperators) give
//! oblique Riesz projections `S E_k S⁻¹`.

use std::cmp::Ordering;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{gen_eig, herm_eig, op_norm, structural_tol, ComplexMatrix};

/// Relative scale of the default clustering tolerance.
pub const DEFAULT_CLUSTER_REL_TOL: f64 = 1e-8;

/// Relative residual accepted from the general eigensolver in [`riesz_resolve`].
pub const RIESZ_EIG_TOL: f64 = 1e-9;

/// Relative robustness threshold used by [`poly_coeffs_default`].
pub const DEFAULT_POLY_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResolution {
    /// Distinct eigenvalues, ascending by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    pub projections: Vec<ComplexMatrix>,
    pub multiplicities: Vec<usize>,
    /// Smallest distance between distinct eigenvalues; 0 when `d = 1`.
    pub gap: f64,
    /// `true` for Riesz (non-orthogonal) projections.
    pub oblique: bool,
}

impl SpectralResolution {
    /// Number of distinct eigenvalues.
    pub fn d(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.projections[0].dim()
    }

    /// `Σ_k e_k P_k`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.weighted_sum(&self.eigenvalues)
    }

    /// `Σ_k w_k P_k`
    pub fn weighted_sum(&self, weights: &[C64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (w, p) in weights.iter().zip(&self.projections) {
            out = out.add_scaled(*w, p);
        }
        out
    }

    /// Index of the cluster whose eigenvalue is nearest to `value`.
    pub fn nearest(&self, value: C64) -> usize {
        let mut best = 0;
        for k in 1..self.d() {
            if (self.eigenvalues[k] - value).norm() < (self.eigenvalues[best] - value).norm() {
                best = k;
            }
        }
        best
    }

    /// Largest violation of the projection invariants: idempotence and
    /// mutual annihilation, completeness, reconstruction of `a`, and (for
    /// orthogonal resolutions) Hermiticity.
    pub fn invariant_residual(&self, a: &ComplexMatrix) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut total = ComplexMatrix::zeros(n);
        for (k, pk) in self.projections.iter().enumerate() {
            total += pk;
            for (l, pl) in self.projections.iter().enumerate() {
                let prod = pk.matmul(pl);
                let want = if k == l { pl.clone() } else { ComplexMatrix::zeros(n) };
                worst = worst.max((&prod - &want).max_abs());
            }
            if !self.oblique {
                worst = worst.max(pk.hermiticity_residual());
            }
        }
        worst = worst.max((&total - &ComplexMatrix::identity(n)).max_abs());
        worst.max((&self.reconstruct() - a).max_abs())
    }
}

/// `1e−8 · max(1, ‖A‖)`
pub fn default_cluster_tol(a: &ComplexMatrix) -> f64 {
    DEFAULT_CLUSTER_REL_TOL * op_norm(a).max(1.0)
}

/// Orthogonal spectral resolution of a Hermitian matrix.
///
/// Sorted eigenvalues are chain-merged when adjacent spacings are at most
/// `cluster_tol`; a spacing inside `(cluster_tol, 10·cluster_tol)` is
/// rejected as ambiguous.
pub fn resolve(a: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralResolution> {
    let eig = herm_eig(a, structural_tol(a))?;
    let n = a.dim();

    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        let spacing = eig.eigenvalues[i] - eig.eigenvalues[i - 1];
        check_spacing(spacing, cluster_tol)?;
        if spacing <= cluster_tol {
            groups.last_mut().expect("nonempty").push(i);
        } else {
            groups.push(vec![i]);
        }
    }

    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut projections = Vec::with_capacity(groups.len());
    let mut multiplicities = Vec::with_capacity(groups.len());
    for g in &groups {
        let mean = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
        let mut p = ComplexMatrix::zeros(n);
        for &c in g {
            let v = eig.eigenvectors.column(c);
            p += &ComplexMatrix::outer(&v, &v);
        }
        eigenvalues.push(C64::new(mean, 0.0));
        projections.push(p);
        multiplicities.push(g.len());
    }
    let gap = eigenvalues.windows(2).map(|w| (w[1] - w[0]).re).fold(f64::INFINITY, f64::min);
    Ok(SpectralResolution {
        eigenvalues,
        projections,
        multiplicities,
        gap: if gap.is_finite() { gap } else { 0.0 },
        oblique: false,
    })
}

/// [`resolve`] with [`default_cluster_tol`].
pub fn resolve_default(a: &ComplexMatrix) -> Result<SpectralResolution> {
    resolve(a, default_cluster_tol(a))
}

fn check_spacing(spacing: f64, tol: f64) -> Result<()> {
    if spacing > tol && spacing < 10.0 * tol {
        return Err(Error::AmbiguousClustering { spacing, tol });
    }
    Ok(())
}

/// Oblique spectral resolution of a diagonalizable matrix via Riesz
/// projections `P_k = S E_k S⁻¹`.
///
/// Eigenvalues are clustered by transitive closure of `|λ_i − λ_j| ≤ cluster_tol`
/// over all pairs.
pub fn riesz_resolve(a: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralResolution> {
    let eig = gen_eig(a, RIESZ_EIG_TOL)?;
    let n = a.dim();
    let lambda = &eig.eigenvalues;

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let dist = (lambda[i] - lambda[j]).norm();
            check_spacing(dist, cluster_tol)?;
            if dist <= cluster_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_to_group[r] == usize::MAX {
            root_to_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_to_group[r]].push(i);
    }

    let mut clusters: Vec<(C64, Vec<usize>)> = groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|&i| lambda[i]).sum::<C64>() / g.len() as f64;
            (mean, g)
        })
        .collect();
    clusters.sort_by(|a, b| compare_eigenvalues(a.0, b.0, cluster_tol));

    let s = &eig.eigenvectors;
    let s_inv = eig.inverse_eigenvectors();
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    for (mean, g) in &clusters {
        let p = ComplexMatrix::from_fn(n, |i, j| g.iter().map(|&c| s[(i, c)] * s_inv[(c, j)]).sum());
        eigenvalues.push(*mean);
        projections.push(p);
        multiplicities.push(g.len());
    }
    let mut gap = f64::INFINITY;
    for i in 0..eigenvalues.len() {
        for j in i + 1..eigenvalues.len() {
            gap = gap.min((eigenvalues[i] - eigenvalues[j]).norm());
        }
    }
    Ok(SpectralResolution {
        eigenvalues,
        projections,
        multiplicities,
        gap: if gap.is_finite() { gap } else { 0.0 },
        oblique: true,
    })
}

/// Ascending by real part, then imaginary part; real parts within `tol`
/// count as equal so that conjugate pairs order stably.
fn compare_eigenvalues(a: C64, b: C64, tol: f64) -> Ordering {
    if (a.re - b.re).abs() > tol {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

/// Reduced resolvent `S_ℓ = Σ_{k≠ℓ} P_k / (e_k − e_ℓ)`.
pub fn reduced_resolvent(res: &SpectralResolution, l: usize) -> Result<ComplexMatrix> {
    if l >= res.d() {
        return Err(Error::IndexOutOfRange { index: l, len: res.d() });
    }
    let el = res.eigenvalues[l];
    let weights: Vec<C64> = res
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &ek)| if k == l { C64::new(0.0, 0.0) } else { (ek - el).inv() })
        .collect();
    Ok(res.weighted_sum(&weights))
}

/// Monomial coefficients of the interpolating polynomial in `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    /// `c_0, …, c_{d−1}`
    pub coefficients: Vec<C64>,
    /// Operator norm of `Σ c_n Aⁿ − M`.
    pub residual: f64,
}

impl PolyCoeffs {
    /// `p(x) = Σ c_n xⁿ` by Horner's rule.
    pub fn eval(&self, x: C64) -> C64 {
        self.coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }
}

/// Writes `M` as a polynomial in `A` of degree `d − 1`.
///
/// The coefficients interpolate the block averages `m_k = tr(P_k M)/d_k` at
/// the distinct eigenvalues. The residual is evaluated spectrally as
/// `‖Σ_k p(e_k) P_k − M‖`, which equals `‖p(A) − M‖` for `A = Σ e_k P_k`
/// without forming high matrix powers.
pub fn poly_coeffs(res: &SpectralResolution, m: &ComplexMatrix, tol: f64) -> Result<PolyCoeffs> {
    m.check_finite()?;
    if m.dim() != res.dim() {
        return Err(Error::DimensionMismatch { expected: res.dim(), found: m.dim() });
    }
    let targets: Vec<C64> = res
        .projections
        .iter()
        .zip(&res.multiplicities)
        .map(|(p, &dk)| p.matmul(m).trace() / dk as f64)
        .collect();
    let coefficients = vandermonde_solve(&res.eigenvalues, &targets);
    let mut pc = PolyCoeffs { coefficients, residual: 0.0 };
    let values: Vec<C64> = res.eigenvalues.iter().map(|&e| pc.eval(e)).collect();
    pc.residual = op_norm(&(&res.weighted_sum(&values) - m));
    if pc.residual > tol {
        return Err(Error::NotRobust { residual: pc.residual, tol });
    }
    Ok(pc)
}

/// [`poly_coeffs`] with threshold `1e−8 · ‖M‖`.
pub fn poly_coeffs_default(res: &SpectralResolution, m: &ComplexMatrix) -> Result<PolyCoeffs> {
    poly_coeffs(res, m, DEFAULT_POLY_REL_TOL * op_norm(m))
}

/// Solves `Σ_n c_n x_kⁿ = f_k` by Björck–Pereyra elimination: Newton
/// divided differences followed by conversion to the monomial basis.
pub fn vandermonde_solve(nodes: &[C64], values: &[C64]) -> Vec<C64> {
    let n = nodes.len();
    let mut c = values.to_vec();
    for k in 0..n.saturating_sub(1) {
        for i in (k + 1..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (nodes[i] - nodes[i - k - 1]);
        }
    }
    for k in (0..n.saturating_sub(1)).rev() {
        for i in k..n - 1 {
            let next = c[i + 1];
            c[i] -= nodes[k] * next;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg_chain, random_hermitian, random_hermitian_with_spectrum};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn degenerate_diagonal() {
        let a = ComplexMatrix::diag_real(&[1.0, 1.0, 2.0]);
        let r = resolve(&a, 1e-8).unwrap();
        assert_eq!(r.d(), 2);
        assert_eq!(r.multiplicities, vec![2, 1]);
        assert!((r.gap - 1.0).abs() < 1e-14);
        assert!((&r.projections[0] - &ComplexMatrix::diag_real(&[1.0, 1.0, 0.0])).max_abs() < 1e-14);
        assert!((&r.projections[1] - &ComplexMatrix::diag_real(&[0.0, 0.0, 1.0])).max_abs() < 1e-14);
    }

    #[test]
    fn pauli_z() {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let r = resolve(&z, 1e-8).unwrap();
        assert_eq!(r.d(), 2);
        assert!((r.gap - 2.0).abs() < 1e-14);
        assert_eq!(r.multiplicities, vec![1, 1]);
        assert!(r.invariant_residual(&z) < 1e-14);
    }

    #[test]
    fn heisenberg_four_sites() {
        let h = heisenberg_chain(4, 1.0).unwrap();
        let r = resolve_default(&h).unwrap();
        assert_eq!(r.multiplicities.iter().sum::<usize>(), 16);
        assert!(r.invariant_residual(&h) < 1e-10);
        // Brute-force oracle: each cluster's multiplicity equals the number
        // of Jacobi eigenvalues within 1e−6 of it.
        let eig = herm_eig(&h, 1e-12).unwrap();
        for (e, &m) in r.eigenvalues.iter().zip(&r.multiplicities) {
            let count = eig.eigenvalues.iter().filter(|&&x| (x - e.re).abs() < 1e-6).count();
            assert_eq!(count, m);
        }
    }

    #[test]
    fn ambiguous_spacing_rejected() {
        let a = ComplexMatrix::diag_real(&[0.0, 5e-8, 1.0]);
        assert!(matches!(resolve(&a, 1e-8), Err(Error::AmbiguousClustering { .. })));
        assert_eq!(resolve(&a, 1e-6).unwrap().d(), 2);
        assert_eq!(resolve(&a, 1e-9).unwrap().d(), 3);
    }

    #[test]
    fn resolvent_examples() {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let r = resolve(&z, 1e-8).unwrap();
        // ℓ = eigenvalue −1 (index 0): S = P_+/2.
        let s = reduced_resolvent(&r, 0).unwrap();
        assert!((&s - &ComplexMatrix::diag_real(&[0.5, 0.0])).max_abs() < 1e-15);

        let a = ComplexMatrix::diag_real(&[1.0, 1.0, 2.0]);
        let r = resolve(&a, 1e-8).unwrap();
        let s = reduced_resolvent(&r, 0).unwrap();
        assert!((&s - &ComplexMatrix::diag_real(&[0.0, 0.0, 1.0])).max_abs() < 1e-15);
        assert!(reduced_resolvent(&r, 2).is_err());
    }

    #[test]
    fn resolvent_identity_and_norm() {
        let h = random_hermitian_with_spectrum(&[-1.0, -1.0, 0.3, 0.3, 0.3, 1.2], 4);
        let r = resolve_default(&h).unwrap();
        for l in 0..r.d() {
            let s = reduced_resolvent(&r, l).unwrap();
            let shifted = h.add_scaled(-r.eigenvalues[l], &ComplexMatrix::identity(6));
            let lhs = shifted.matmul(&s);
            let rhs = &ComplexMatrix::identity(6) - &r.projections[l];
            assert!((&lhs - &rhs).max_abs() < 1e-12);
            assert!(s.matmul(&r.projections[l]).max_abs() < 1e-12);
            assert!(op_norm(&s) <= 1.0 / r.gap + 1e-12);
        }
    }

    #[test]
    fn poly_examples() {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let r = resolve(&z, 1e-8).unwrap();
        let pc = poly_coeffs(&r, &ComplexMatrix::identity(2), 1e-10).unwrap();
        assert!((pc.coefficients[0] - c(1.0)).norm() < 1e-15);
        assert!(pc.coefficients[1].norm() < 1e-15);
        assert!(pc.residual < 1e-15);

        let p_plus = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let pc = poly_coeffs(&r, &p_plus, 1e-10).unwrap();
        assert!((pc.coefficients[0] - c(0.5)).norm() < 1e-15);
        assert!((pc.coefficients[1] - c(0.5)).norm() < 1e-15);

        assert!(matches!(poly_coeffs(&r, &sigma_x(), 1e-10), Err(Error::NotRobust { .. })));
    }

    #[test]
    fn vandermonde_cubic() {
        // p(x) = 2 − x + 3x² at nodes −1, 0.5, 2
        let nodes = [c(-1.0), c(0.5), c(2.0)];
        let vals: Vec<C64> = nodes.iter().map(|&x| c(2.0) - x + x * x * 3.0).collect();
        let coef = vandermonde_solve(&nodes, &vals);
        for (got, want) in coef.iter().zip([2.0, -1.0, 3.0]) {
            assert!((got - c(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn riesz_matches_orthogonal_for_hermitian() {
        let h = random_hermitian_with_spectrum(&[-0.5, -0.5, 0.25, 1.0], 9);
        let a = resolve_default(&h).unwrap();
        let b = riesz_resolve(&h, default_cluster_tol(&h)).unwrap();
        assert!(b.oblique);
        assert_eq!(a.multiplicities, b.multiplicities);
        for (p, q) in a.projections.iter().zip(&b.projections) {
            assert!((p - q).max_abs() < 1e-9);
        }
    }

    #[test]
    fn riesz_semisimple_diagonal() {
        let a = ComplexMatrix::diag_real(&[2.0, 2.0, 5.0]);
        let r = riesz_resolve(&a, 1e-8).unwrap();
        assert_eq!(r.multiplicities, vec![2, 1]);
        assert!((r.projections[0].trace() - c(2.0)).norm() < 1e-12);
        assert!(r.invariant_residual(&a) < 1e-12);
    }

    #[test]
    fn riesz_non_normal() {
        // Upper triangular, distinct eigenvalues 1 and 3; projections are oblique.
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 4.0], &[0.0, 3.0]]).unwrap();
        let r = riesz_resolve(&a, 1e-8).unwrap();
        assert_eq!(r.d(), 2);
        assert!(r.invariant_residual(&a) < 1e-12);
        assert!(r.projections[0].hermiticity_residual() > 0.1);
    }

    #[test]
    fn random_resolution_is_complete() {
        let h = random_hermitian(8, 2).unwrap();
        let r = resolve_default(&h).unwrap();
        assert_eq!(r.d(), 8);
        assert!(r.invariant_residual(&h) < 1e-12);
    }
}
