//! Block-diagonalization of `H + εV` relative to the spectral resolution of
//! `H`: the homological equation, the second-order series, the exact
//! isospectral resummation and the closed-form stability bounds.
//!
//! The resummed perturbation `V_res(ε)` is defined through a transformation
//! `W` with `H + εV_res = W⁻¹(H + εV)W` and `V_res` block-diagonal. For
//! Hermitian generators `W` is the direct rotation `Q(Q†Q)^{−1/2}` with
//! `Q = Σ_k P̃_k P_k`, where `P̃_k` are the perturbed spectral projections
//! continuing `P_k`. For general diagonalizable generators `W = Q` itself.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{gen_eig, herm_eig, inv_sqrt_psd, inverse, op_norm, structural_tol, ComplexMatrix};
use crate::spectral::{reduced_resolvent, SpectralResolution};
use crate::symmetry::{offdiag, zeno_project};

/// Perturbed eigenvectors whose best cluster overlap falls below this are
/// considered unmatched.
pub const MATCH_OVERLAP_THRESHOLD: f64 = 0.5;

/// `(13 + 12√2)/(17 + 12√2)`: largest `4ε/η` for which the eternal bound is
/// guaranteed.
pub fn x0() -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    (13.0 + 12.0 * r2) / (17.0 + 12.0 * r2)
}

const I: C64 = C64::new(0.0, 1.0);

/// Solves `i[H, K] = −{Y}` with `⟨K⟩ = 0`: `K = i Σ_ℓ S_ℓ Y P_ℓ`.
///
/// Works for non-Hermitian `Y` and oblique resolutions alike. Returns zero
/// when `d = 1`, where every operator is block-diagonal.
pub fn solve_homological_general(res: &SpectralResolution, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    if y.dim() != res.dim() {
        return Err(Error::DimensionMismatch { expected: res.dim(), found: y.dim() });
    }
    let mut k = ComplexMatrix::zeros(y.dim());
    if res.d() == 1 {
        return Ok(k);
    }
    for (l, p) in res.projections.iter().enumerate() {
        let s = reduced_resolvent(res, l)?;
        k += &s.matmul(y).matmul(p);
    }
    Ok(k.scale(I))
}

/// First-order generator `K_1` with `i[H, K_1] = −{V}` and `⟨K_1⟩ = 0`.
pub fn solve_homological(res: &SpectralResolution, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(v)?;
    Ok(solve_homological_general(res, v)?.hermitian_part())
}

fn check_hermitian(v: &ComplexMatrix) -> Result<()> {
    v.check_finite()?;
    let tol = structural_tol(v);
    let residual = v.hermiticity_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    Ok(())
}

/// Series terms through second order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerms {
    /// `⟨V⟩`
    pub v0: ComplexMatrix,
    /// `−Σ_ℓ P_ℓ V S_ℓ V P_ℓ`
    pub v1: ComplexMatrix,
    pub k1: ComplexMatrix,
    /// Solves `i[H, K_2] = −{i[V − ½{V}, K_1]}` with `⟨K_2⟩ = 0`.
    pub k2: ComplexMatrix,
}

pub fn series_order2(res: &SpectralResolution, v: &ComplexMatrix) -> Result<SeriesTerms> {
    check_hermitian(v)?;
    let v0 = zeno_project(res, v)?;
    let k1 = solve_homological(res, v)?;
    let mut v1 = ComplexMatrix::zeros(v.dim());
    if res.d() > 1 {
        for (l, p) in res.projections.iter().enumerate() {
            let s = reduced_resolvent(res, l)?;
            v1 -= &p.matmul(v).matmul(&s).matmul(v).matmul(p);
        }
    }
    let half_off = offdiag(res, v)?.scale_real(0.5);
    let rhs = (v - &half_off).commutator(&k1).scale(I);
    let k2 = solve_homological_general(res, &rhs)?.hermitian_part();
    Ok(SeriesTerms { v0, v1: v1.hermitian_part(), k1, k2 })
}

/// Closed-form bounds for a gap `η`, `d` distinct levels and perturbation
/// strength `ε·‖V‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d: usize,
    pub eta: f64,
    pub epsilon: f64,
    pub norm_v: f64,
    /// Zeno bound `a + b·t` coefficients.
    pub zeno_a: f64,
    pub zeno_b: f64,
    /// `2√d((1 − 4ε/η)^{−1/4} − 1)`
    pub delta_hat_inf: f64,
    /// `7√d·ε/η`
    pub linear_bound: f64,
    /// `4ε/η ≤ x₀`
    pub validity: bool,
    pub x0: f64,
}

impl BoundReport {
    /// `a(1 + ε‖V‖t)`
    pub fn zeno_bound_at(&self, t: f64) -> f64 {
        self.zeno_a + self.zeno_b * t
    }
}

/// Bounds with effective strength `ε·normV`.
pub fn bounds(d: usize, eta: f64, norm_v: f64, eps: f64) -> Result<BoundReport> {
    if d == 0 || !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!("bounds need d ≥ 1 and η > 0, got d = {d}, η = {eta}")));
    }
    if !(eps >= 0.0 && norm_v >= 0.0) || !eps.is_finite() || !norm_v.is_finite() {
        return Err(Error::InvalidArgument(format!("bounds need finite ε ≥ 0 and ‖V‖ ≥ 0, got {eps}, {norm_v}")));
    }
    let e = eps * norm_v;
    let ratio = 4.0 * e / eta;
    if ratio >= 1.0 {
        return Err(Error::InvalidBound { ratio });
    }
    let sd = (d as f64).sqrt();
    let zeno_a = 2.0 * sd * e / eta;
    Ok(BoundReport {
        d,
        eta,
        epsilon: eps,
        norm_v,
        zeno_a,
        zeno_b: zeno_a * e,
        delta_hat_inf: 2.0 * sd * ((1.0 - ratio).powf(-0.25) - 1.0),
        linear_bound: 7.0 * sd * e / eta,
        validity: ratio <= x0(),
        x0: x0(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KamResult {
    pub v_z: ComplexMatrix,
    pub k1: ComplexMatrix,
    pub v1: ComplexMatrix,
    pub k2: ComplexMatrix,
    /// Unitary (Hermitian case) or invertible (oblique case).
    pub w: ComplexMatrix,
    pub w_inv: ComplexMatrix,
    /// Block-diagonal `V_res(ε)`.
    pub v_resummed: ComplexMatrix,
    pub epsilon: f64,
    /// `‖{V_res}‖`
    pub residual_blockdiag: f64,
    /// Largest distance between matched eigenvalues of `H + εV_res` and `H + εV`.
    pub residual_isospectral: f64,
    /// `‖W − I‖`
    pub w_distance: f64,
    /// `None` when `d = 1` or the bound formula is outside its domain.
    pub bounds: Option<BoundReport>,
}

/// Greedy assignment of perturbed eigenvectors to clusters by descending
/// overlap, respecting multiplicities. `overlaps[j][k]` is the weight of
/// vector `j` in cluster `k`.
fn assign_clusters(overlaps: &[Vec<f64>], multiplicities: &[usize]) -> Result<Vec<usize>> {
    let n = overlaps.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * multiplicities.len());
    for (j, row) in overlaps.iter().enumerate() {
        for (k, &o) in row.iter().enumerate() {
            pairs.push((o, j, k));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut capacity = multiplicities.to_vec();
    let mut assigned = vec![usize::MAX; n];
    let mut worst = f64::INFINITY;
    for (o, j, k) in pairs {
        if assigned[j] == usize::MAX && capacity[k] > 0 {
            assigned[j] = k;
            capacity[k] -= 1;
            worst = worst.min(o);
        }
    }
    if assigned.contains(&usize::MAX) || capacity.iter().any(|&c| c != 0) {
        return Err(Error::LevelCrossing { overlap: 0.0 });
    }
    if worst < MATCH_OVERLAP_THRESHOLD {
        return Err(Error::LevelCrossing { overlap: worst });
    }
    Ok(assigned)
}

fn series_or_zero(res: &SpectralResolution, v: &ComplexMatrix) -> Result<SeriesTerms> {
    if res.oblique || v.hermiticity_residual() > structural_tol(v) {
        let n = v.dim();
        let z = ComplexMatrix::zeros(n);
        return Ok(SeriesTerms { v0: zeno_project(res, v)?, v1: z.clone(), k1: z.clone(), k2: z });
    }
    series_order2(res, v)
}

fn bound_report(res: &SpectralResolution, v: &ComplexMatrix, eps: f64) -> Option<BoundReport> {
    if res.d() < 2 {
        return None;
    }
    bounds(res.d(), res.gap, op_norm(v), eps).ok()
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("ε must be finite and ≥ 0, got {eps}")));
    }
    Ok(())
}

fn trivial_result(res: &SpectralResolution, v: &ComplexMatrix, eps: f64, series: SeriesTerms) -> Result<KamResult> {
    let n = v.dim();
    let v_resummed = series.v0.clone();
    Ok(KamResult {
        residual_blockdiag: op_norm(&offdiag(res, &v_resummed)?),
        v_z: series.v0,
        k1: series.k1,
        v1: series.v1,
        k2: series.k2,
        w: ComplexMatrix::identity(n),
        w_inv: ComplexMatrix::identity(n),
        v_resummed,
        epsilon: eps,
        residual_isospectral: 0.0,
        w_distance: 0.0,
        bounds: bound_report(res, v, eps),
    })
}

/// Exact block-diagonalization of `H + εV` by the direct rotation.
///
/// `ε = 0` returns the limit `W = I`, `V_res = ⟨V⟩`.
pub fn isospectral_blockdiag(res: &SpectralResolution, v: &ComplexMatrix, eps: f64) -> Result<KamResult> {
    if res.oblique {
        return Err(Error::InvalidArgument("isospectral_blockdiag needs an orthogonal resolution".into()));
    }
    check_epsilon(eps)?;
    check_hermitian(v)?;
    if v.dim() != res.dim() {
        return Err(Error::DimensionMismatch { expected: res.dim(), found: v.dim() });
    }
    let series = series_order2(res, v)?;
    if eps == 0.0 {
        return trivial_result(res, v, eps, series);
    }
    let n = v.dim();
    let h = res.reconstruct();
    let ht = h.add_scaled(C64::new(eps, 0.0), v).hermitian_part();
    let eig = herm_eig(&ht, structural_tol(&ht))?;

    let vectors: Vec<Vec<C64>> = (0..n).map(|j| eig.eigenvectors.column(j)).collect();
    let overlaps: Vec<Vec<f64>> = vectors
        .iter()
        .map(|vj| res.projections.iter().map(|p| p.matvec(vj).iter().map(|z| z.norm_sqr()).sum()).collect())
        .collect();
    let assigned = assign_clusters(&overlaps, &res.multiplicities)?;

    let mut q = ComplexMatrix::zeros(n);
    for (k, p) in res.projections.iter().enumerate() {
        let mut pt = ComplexMatrix::zeros(n);
        for (j, vj) in vectors.iter().enumerate() {
            if assigned[j] == k {
                pt += &ComplexMatrix::outer(vj, vj);
            }
        }
        q += &pt.matmul(p);
    }
    let gram = q.adjoint().matmul(&q).hermitian_part();
    let w = match inv_sqrt_psd(&gram, 1e-12) {
        Ok(root) => q.matmul(&root),
        Err(Error::NotPositiveDefinite { .. }) => return Err(Error::SingularOverlap),
        Err(e) => return Err(e),
    };
    let w_inv = w.adjoint();
    let transformed = w_inv.matmul(&ht).matmul(&w).hermitian_part();
    let v_resummed = (&transformed - &h).scale_real(1.0 / eps);

    let check = h.add_scaled(C64::new(eps, 0.0), &v_resummed).hermitian_part();
    let check_eig = herm_eig(&check, f64::INFINITY)?;
    let residual_isospectral = check_eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    Ok(KamResult {
        residual_blockdiag: op_norm(&offdiag(res, &v_resummed)?),
        w_distance: op_norm(&(&w - &ComplexMatrix::identity(n))),
        v_z: series.v0,
        k1: series.k1,
        v1: series.v1,
        k2: series.k2,
        w,
        w_inv,
        v_resummed,
        epsilon: eps,
        residual_isospectral,
        bounds: bound_report(res, v, eps),
    })
}

/// Similarity analog of [`isospectral_blockdiag`] for a diagonalizable
/// generator `L = Σ e_k P_k` with oblique projections.
pub fn isospectral_blockdiag_general(res: &SpectralResolution, v: &ComplexMatrix, eps: f64) -> Result<KamResult> {
    check_epsilon(eps)?;
    v.check_finite()?;
    if v.dim() != res.dim() {
        return Err(Error::DimensionMismatch { expected: res.dim(), found: v.dim() });
    }
    let series = series_or_zero(res, v)?;
    if eps == 0.0 {
        return trivial_result(res, v, eps, series);
    }
    let n = v.dim();
    let l = res.reconstruct();
    let lt = l.add_scaled(C64::new(eps, 0.0), v);
    let eig = gen_eig(&lt, crate::spectral::RIESZ_EIG_TOL)?;
    let s = &eig.eigenvectors;
    let s_inv = eig.inverse_eigenvectors();

    let overlaps: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let sj = s.column(j);
            let raw: Vec<f64> =
                res.projections.iter().map(|p| p.matvec(&sj).iter().map(|z| z.norm_sqr()).sum()).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| x / total).collect()
        })
        .collect();
    let assigned = assign_clusters(&overlaps, &res.multiplicities)?;

    let mut q = ComplexMatrix::zeros(n);
    for (k, p) in res.projections.iter().enumerate() {
        let cols: Vec<usize> = (0..n).filter(|&j| assigned[j] == k).collect();
        let pt = ComplexMatrix::from_fn(n, |a, b| cols.iter().map(|&c| s[(a, c)] * s_inv[(c, b)]).sum());
        q += &pt.matmul(p);
    }
    let w_inv = match inverse(&q) {
        Ok(m) => m,
        Err(Error::Singular) => return Err(Error::SingularOverlap),
        Err(e) => return Err(e),
    };
    let transformed = w_inv.matmul(&lt).matmul(&q);
    let v_resummed = (&transformed - &l).scale_real(1.0 / eps);

    let check = l.add_scaled(C64::new(eps, 0.0), &v_resummed);
    let check_eig = gen_eig(&check, crate::spectral::RIESZ_EIG_TOL)?;
    let residual_isospectral = matched_spectral_distance(&check_eig.eigenvalues, &eig.eigenvalues);

    Ok(KamResult {
        residual_blockdiag: op_norm(&offdiag(res, &v_resummed)?),
        w_distance: op_norm(&(&q - &ComplexMatrix::identity(n))),
        v_z: series.v0,
        k1: series.k1,
        v1: series.v1,
        k2: series.k2,
        w: q,
        w_inv,
        v_resummed,
        epsilon: eps,
        residual_isospectral,
        bounds: bound_report(res, v, eps),
    })
}

/// Largest distance under greedy nearest-neighbour matching of two complex
/// spectra of equal length.
pub fn matched_spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (dist, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(dist);
        }
    }
    worst
}
