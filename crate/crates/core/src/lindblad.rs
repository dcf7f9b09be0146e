//! Superoperators on `D×D` matrices, Lindbladians, and the monotone
//! `f_M(ρ) = tr[M(ρ)† (L_ρ + λR_ρ)⁻¹ M(ρ)]`.
//!
//! Vectorization is column stacking: `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{TimeGrid, Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::kam::KamResult;
use crate::matcore::{expm, gen_eig, herm_eig, ComplexMatrix, GenEig};
use crate::models::Axis;
use crate::spectral::SpectralResolution;

/// Largest Hilbert-space dimension for superoperators (`D² ≤ 64`).
pub const MAX_HILBERT_DIM: usize = 8;

/// Smallest eigenvalue a state may have for the monotone to be evaluated.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Tolerance on `|tr ρ − 1|` and `‖ρ − ρ†‖`.
pub const STATE_TOL: f64 = 1e-10;

/// Column-stacked `vec(X)`.
pub fn vectorize(x: &ComplexMatrix) -> Vec<C64> {
    let n = x.dim();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(x[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[C64]) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() || n == 0 {
        return Err(Error::DimensionMismatch { expected: n * n, found: v.len() });
    }
    Ok(ComplexMatrix::from_fn(n, |i, j| v[j * n + i]))
}

/// Linear map on `D×D` matrices stored as its `D²×D²` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if dim == 0 || dim > MAX_HILBERT_DIM {
            return Err(Error::InvalidArgument(format!("Hilbert dimension must be in 1..={MAX_HILBERT_DIM}, got {dim}")));
        }
        if matrix.dim() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: matrix.dim() });
        }
        matrix.check_finite()?;
        Ok(Self { dim, matrix })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::from_matrix(dim, ComplexMatrix::zeros(dim * dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_matrix(dim, ComplexMatrix::identity(dim * dim))
    }

    /// `X ↦ A X B`
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        a.ensure_same_dim(b)?;
        Self::from_matrix(a.dim(), b.transpose().kron(a))
    }

    /// `X ↦ c(AX − XA)`
    pub fn commutator(a: &ComplexMatrix, c: C64) -> Result<Self> {
        let id = ComplexMatrix::identity(a.dim());
        let m = &id.kron(a) - &a.transpose().kron(&id);
        Self::from_matrix(a.dim(), m.scale(c))
    }

    /// Hilbert-space dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        devectorize(&self.matrix.matvec(&vectorize(x)))
    }

    pub fn add_scaled(&self, s: C64, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Self { dim: self.dim, matrix: self.matrix.add_scaled(s, &other.matrix) })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, matrix: self.matrix.scale(s) }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(Self { dim: self.dim, matrix: self.matrix.matmul(&other.matrix) })
    }

    /// `‖vec(I)† · matrix‖`; zero for trace-annihilating generators.
    pub fn trace_preservation_residual(&self) -> f64 {
        let id = vectorize(&ComplexMatrix::identity(self.dim));
        let n = self.matrix.dim();
        (0..n)
            .map(|c| (0..n).map(|r| id[r].conj() * self.matrix[(r, c)]).sum::<C64>().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// GKLS generator `ρ ↦ −i[H, ρ] + Σ_j (L_j ρ L_j† − ½{L_j† L_j, ρ})`.
pub fn lindbladian(h: &ComplexMatrix, jumps: &[ComplexMatrix]) -> Result<Superoperator> {
    let d = h.dim();
    let mut gen = Superoperator::commutator(h, C64::new(0.0, -1.0))?;
    let id = ComplexMatrix::identity(d);
    for l in jumps {
        h.ensure_same_dim(l)?;
        let ldl = l.adjoint().matmul(l);
        let term = Superoperator::sandwich(l, &l.adjoint())?
            .add_scaled(C64::new(-0.5, 0.0), &Superoperator::sandwich(&ldl, &id)?)?
            .add_scaled(C64::new(-0.5, 0.0), &Superoperator::sandwich(&id, &ldl)?)?;
        gen = gen.add_scaled(C64::new(1.0, 0.0), &term)?;
    }
    Ok(gen)
}

/// Qubit dephasing `ρ ↦ −(iω/2)[σ_z, ρ] − (κ/2)(ρ − σ_z ρ σ_z)`, under which
/// `ρ_01(t) = e^{−(κ + iω)t} ρ_01(0)` and populations are fixed.
pub fn dephasing(omega: f64, kappa: f64) -> Result<Superoperator> {
    let z = Axis::Z.matrix();
    let unitary = Superoperator::commutator(&z, C64::new(0.0, -0.5 * omega))?;
    let flip = Superoperator::identity(2)?.add_scaled(C64::new(-1.0, 0.0), &Superoperator::sandwich(&z, &z)?)?;
    unitary.add_scaled(C64::new(-0.5 * kappa, 0.0), &flip)
}

/// `ρ ↦ c(Aρ − ρA)`
pub fn commutator_super(a: &ComplexMatrix, c: C64) -> Result<Superoperator> {
    Superoperator::commutator(a, c)
}

/// `Σ_k m_k P_k` over the spectral projections of a generator.
pub fn spectral_superoperator(res: &SpectralResolution, weights: &[C64]) -> Result<Superoperator> {
    if weights.len() != res.d() {
        return Err(Error::DimensionMismatch { expected: res.d(), found: weights.len() });
    }
    let big = res.dim();
    let d = (big as f64).sqrt().round() as usize;
    Superoperator::from_matrix(d, res.weighted_sum(weights))
}

/// `M̃ = W M W⁻¹`: a symmetry of the perturbed generator when `M` is
/// block-diagonal and commutes with the unperturbed one.
pub fn transported_symmetry(kam: &KamResult, m: &Superoperator) -> Result<Superoperator> {
    if kam.w.dim() != m.matrix.dim() {
        return Err(Error::DimensionMismatch { expected: kam.w.dim(), found: m.matrix.dim() });
    }
    Superoperator::from_matrix(m.dim, kam.w.matmul(&m.matrix).matmul(&kam.w_inv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSpec {
    pub m: Superoperator,
    pub lambda: f64,
}

impl MonotoneSpec {
    pub fn new(m: Superoperator, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("monotone λ must be finite and ≥ 0, got {lambda}")));
        }
        Ok(Self { m, lambda })
    }
}

/// `Σ_{ij} |X_ij|² / (p_i + λ p_j)` with `X = M(ρ)` in the eigenbasis of `ρ`.
pub fn monotone(spec: &MonotoneSpec, rho: &ComplexMatrix) -> Result<f64> {
    let (p, u) = state_eigen(rho)?;
    let x = spec.m.apply(rho)?;
    let xe = u.adjoint().matmul(&x).matmul(&u);
    let n = rho.dim();
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            f += xe[(i, j)].norm_sqr() / (p[i] + spec.lambda * p[j]);
        }
    }
    Ok(f)
}

fn state_eigen(rho: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    rho.check_finite()?;
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::NotState { reason: format!("trace {tr} ≠ 1") });
    }
    let eig = herm_eig(rho, STATE_TOL).map_err(|e| match e {
        Error::NotHermitian { residual, .. } => Error::NotState { reason: format!("not Hermitian (‖ρ − ρ†‖ = {residual:e})") },
        other => other,
    })?;
    let min = eig.eigenvalues[0];
    if min <= POSITIVITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok((eig.eigenvalues, eig.eigenvectors))
}

/// `e^{tG}` for a superoperator generator, by eigendecomposition when it is
/// well conditioned and by the matrix exponential otherwise.
pub struct SemigroupPropagator {
    generator: ComplexMatrix,
    eig: Option<GenEig>,
}

impl SemigroupPropagator {
    pub fn new(g: &Superoperator) -> Self {
        let eig = gen_eig(&g.matrix, 1e-10).ok();
        Self { generator: g.matrix.clone(), eig }
    }

    pub fn at(&self, t: f64) -> Result<ComplexMatrix> {
        match &self.eig {
            Some(e) => {
                let d: Vec<C64> = e.eigenvalues.iter().map(|&l| (l * t).exp()).collect();
                Ok(e.from_diagonal(&d))
            }
            None => expm(&self.generator, t),
        }
    }
}

/// Density matrices `e^{tG}(ρ_0)` over the grid, Hermitized.
pub fn evolve_states(g: &Superoperator, rho0: &ComplexMatrix, grid: &TimeGrid) -> Result<Vec<ComplexMatrix>> {
    let prop = SemigroupPropagator::new(g);
    let v0 = vectorize(rho0);
    grid.times()
        .par_iter()
        .map(|&t| devectorize(&prop.at(t)?.matvec(&v0)).map(|m| m.hermitian_part()))
        .collect()
}

fn monotone_along(spec: &MonotoneSpec, states: &[ComplexMatrix], grid: &TimeGrid) -> Result<Vec<f64>> {
    states
        .par_iter()
        .zip(grid.times().par_iter())
        .map(|(rho, &t)| match monotone(spec, rho) {
            Err(Error::NotPositive { min_eigenvalue }) => Err(Error::PositivityLost { t, min_eigenvalue }),
            other => other,
        })
        .collect()
}

/// Monotone along the unperturbed (`L`) and perturbed (`L + εV`) evolutions.
pub fn monotone_traj(
    l: &Superoperator,
    v: &Superoperator,
    eps: f64,
    spec: &MonotoneSpec,
    rho0: &ComplexMatrix,
    grid: &TimeGrid,
) -> Result<(Trajectory, Trajectory)> {
    let lt = l.add_scaled(C64::new(eps, 0.0), v)?;
    let unperturbed = monotone_along(spec, &evolve_states(l, rho0, grid)?, grid)?;
    let perturbed = monotone_along(spec, &evolve_states(&lt, rho0, grid)?, grid)?;
    Ok((
        Trajectory::real(grid.clone(), unperturbed, TrajectoryMeta::new("monotone").variant("unperturbed")),
        Trajectory::real(grid.clone(), perturbed, TrajectoryMeta::new("monotone").epsilon(eps).variant("perturbed")),
    ))
}

/// Deviations of a perturbed monotone trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneViolation {
    /// `max_t (f(ρ_t^ε) − f(ρ_0))`
    pub above_initial: f64,
    /// `max_t (f(t) − min_{s≤t} f(s))`: largest increase along the trajectory.
    pub non_monotonicity: f64,
    /// `max_t |f(ρ_t^ε) − f(ρ_t)|`
    pub deviation: f64,
}

pub fn monotone_violation(unperturbed: &[f64], perturbed: &[f64]) -> MonotoneViolation {
    let f0 = perturbed[0];
    let mut running_min = f64::INFINITY;
    let mut v = MonotoneViolation { above_initial: f64::NEG_INFINITY, non_monotonicity: 0.0, deviation: 0.0 };
    for (&fu, &fp) in unperturbed.iter().zip(perturbed) {
        v.above_initial = v.above_initial.max(fp - f0);
        running_min = running_min.min(fp);
        v.non_monotonicity = v.non_monotonicity.max(fp - running_min);
        v.deviation = v.deviation.max((fp - fu).abs());
    }
    v
}

/// Qubit state `½(I + r·σ)`.
pub fn qubit_state(r: [f64; 3]) -> ComplexMatrix {
    let mut rho = ComplexMatrix::identity(2);
    for (c, axis) in r.iter().zip(Axis::ALL) {
        rho = rho.add_scaled(C64::new(*c, 0.0), &axis.matrix());
    }
    rho.scale_real(0.5)
}

/// The dephasing-qubit symmetries: the robust `−(i/√2)[σ_z, ·]` and the
/// fragile `X ↦ −(i/√2)[σ_z, X] + ⟨0|X|0⟩ |0⟩⟨0|`.
pub fn dephasing_symmetries() -> Result<(Superoperator, Superoperator)> {
    let robust = commutator_super(&Axis::Z.matrix(), C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2))?;
    let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
    let fragile = robust.add_scaled(C64::new(1.0, 0.0), &Superoperator::sandwich(&p0, &p0)?)?;
    Ok((robust, fragile))
}

/// Perturbation `ρ ↦ −(i g/2)[σ_x, ρ]`.
pub fn transverse_drive(g: f64) -> Result<Superoperator> {
    commutator_super(&Axis::X.matrix(), C64::new(0.0, -0.5 * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ginibre, random_hermitian};
    use crate::spectral::{default_cluster_tol, riesz_resolve};

    #[test]
    fn vec_is_column_stacking() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let v: Vec<f64> = vectorize(&x).iter().map(|z| z.re).collect();
        assert_eq!(v, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(devectorize(&vectorize(&x)).unwrap(), x);
        assert!(devectorize(&[C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn kron_identity() {
        let (a, x, b) = (ginibre(3, 1), ginibre(3, 2), ginibre(3, 3));
        let lhs = b.transpose().kron(&a).matvec(&vectorize(&x));
        let rhs = vectorize(&a.matmul(&x).matmul(&b));
        assert!(lhs.iter().zip(&rhs).all(|(p, q)| (p - q).norm() < 1e-13));
    }

    #[test]
    fn empty_lindbladian_is_zero() {
        let l = lindbladian(&ComplexMatrix::zeros(2), &[]).unwrap();
        assert_eq!(l.matrix().max_abs(), 0.0);
    }

    #[test]
    fn jump_form_trace_preserving() {
        let h = random_hermitian(3, 1).unwrap();
        let jumps = [ginibre(3, 5), ginibre(3, 6)];
        let l = lindbladian(&h, &jumps).unwrap();
        assert!(l.trace_preservation_residual() < 1e-12);
        // Action consistency against the defining formula.
        let x = ginibre(3, 7);
        let mut want = h.commutator(&x).scale(C64::new(0.0, -1.0));
        for j in &jumps {
            let jd = j.adjoint();
            want += &j.matmul(&x).matmul(&jd);
            want -= &jd.matmul(j).anticommutator(&x).scale_real(0.5);
        }
        assert!((&l.apply(&x).unwrap() - &want).max_abs() < 1e-12);
    }

    #[test]
    fn dephasing_action_and_spectrum() {
        let l = dephasing(1.0, 1.0).unwrap();
        assert!(l.trace_preservation_residual() < 1e-15);
        let e01 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let out = l.apply(&e01).unwrap();
        assert!((&out - &e01.scale(C64::new(-1.0, -1.0))).max_abs() < 1e-15);
        assert!(l.apply(&Axis::Z.matrix()).unwrap().max_abs() < 1e-15);
        let r = riesz_resolve(l.matrix(), 1e-8).unwrap();
        assert_eq!(r.d(), 3);
        assert_eq!(r.multiplicities, vec![1, 1, 2]);
        assert!((r.eigenvalues[0] - C64::new(-1.0, -1.0)).norm() < 1e-12);
        assert!((r.eigenvalues[1] - C64::new(-1.0, 1.0)).norm() < 1e-12);
        assert!(r.eigenvalues[2].norm() < 1e-12);
    }

    #[test]
    fn commutator_examples() {
        let c = commutator_super(&Axis::Z.matrix(), C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)).unwrap();
        let out = c.apply(&Axis::X.matrix()).unwrap();
        assert!((&out - &Axis::Y.matrix().scale_real(2f64.sqrt())).max_abs() < 1e-15);
        assert_eq!(c.apply(&ComplexMatrix::identity(2)).unwrap().max_abs(), 0.0);
        assert_eq!(c.apply(&Axis::Z.matrix()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn monotone_examples() {
        let (robust, _) = dephasing_symmetries().unwrap();
        let rho = qubit_state([0.2, 0.0, 0.8]);
        let f = monotone(&MonotoneSpec::new(robust.clone(), 1.0).unwrap(), &rho).unwrap();
        assert!((f - 0.04).abs() < 1e-14);
        let zero = MonotoneSpec::new(Superoperator::zero(2).unwrap(), 1.0).unwrap();
        assert_eq!(monotone(&zero, &rho).unwrap(), 0.0);

        // Maximally mixed: f = D/(1+λ) Σ |X_ij|².
        let mixed = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        let m = Superoperator::sandwich(&ginibre(3, 1), &ginibre(3, 2)).unwrap();
        let x = m.apply(&mixed).unwrap();
        let lam = 0.5;
        let f = monotone(&MonotoneSpec::new(m, lam).unwrap(), &mixed).unwrap();
        let want = 3.0 / (1.0 + lam) * x.frobenius_norm().powi(2);
        assert!((f - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn monotone_rejects_non_states() {
        let (robust, _) = dephasing_symmetries().unwrap();
        let spec = MonotoneSpec::new(robust, 1.0).unwrap();
        assert!(matches!(monotone(&spec, &qubit_state([0.0, 0.0, 1.0])), Err(Error::NotPositive { .. })));
        assert!(matches!(monotone(&spec, &ComplexMatrix::identity(2)), Err(Error::NotState { .. })));
        assert!(MonotoneSpec::new(Superoperator::zero(2).unwrap(), -1.0).is_err());
    }

    #[test]
    fn unperturbed_monotone_decays() {
        let l = dephasing(1.0, 1.0).unwrap();
        let (robust, _) = dephasing_symmetries().unwrap();
        let spec = MonotoneSpec::new(robust, 1.0).unwrap();
        let rho0 = qubit_state([0.2, 0.0, 0.8]);
        let grid = TimeGrid::linear(5.0, 101).unwrap();
        let (u, _) = monotone_traj(&l, &transverse_drive(1.0).unwrap(), 0.1, &spec, &rho0, &grid).unwrap();
        for (t, f) in grid.times().iter().zip(u.real_values().unwrap()) {
            assert!((f - 0.04 * (-2.0 * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn robust_superoperator_commutes_and_is_trivial_on_trace() {
        let l = dephasing(1.0, 1.0).unwrap();
        let r = riesz_resolve(l.matrix(), default_cluster_tol(l.matrix())).unwrap();
        let m = spectral_superoperator(&r, &[C64::new(0.3, 0.0), C64::new(-1.0, 0.5), C64::new(2.0, 0.0)]).unwrap();
        assert!(m.matrix().commutator(l.matrix()).max_abs() < 1e-12);
        // tr M(ρ) equals the weight on the stationary block.
        let rho = qubit_state([0.1, -0.3, 0.2]);
        let tr = m.apply(&rho).unwrap().trace();
        assert!((tr - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn violation_metrics() {
        let v = monotone_violation(&[1.0, 0.5, 0.2], &[1.0, 0.6, 0.7]);
        assert_eq!(v.above_initial, 0.0);
        assert!((v.non_monotonicity - 0.1).abs() < 1e-15);
        assert!((v.deviation - 0.5).abs() < 1e-15);
    }
}
