//! Time-domain checks: propagator divergence, observable drift, expectation
//! values and Gibbs-state drift on a time grid.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{herm_eig, matfun_herm, op_norm, structural_tol, vec_norm, ComplexMatrix, HermEig};

/// Points in the default grid.
pub const DEFAULT_GRID_POINTS: usize = 2000;
/// The default grid runs to `DEFAULT_HORIZON / ε`.
pub const DEFAULT_HORIZON: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Spacing {
    Linear { t_max: f64 },
    /// `0` followed by geometrically spaced points from `t_min` to `t_max`.
    Geometric { t_min: f64, t_max: f64 },
    Custom,
}

/// Strictly increasing finite times starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
    spacing: Spacing,
}

impl TimeGrid {
    pub fn linear(t_max: f64, points: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) || points < 2 {
            return Err(Error::InvalidArgument(format!(
                "linear grid needs t_max > 0 and ≥ 2 points, got t_max = {t_max}, points = {points}"
            )));
        }
        let step = t_max / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
        times[points - 1] = t_max;
        Ok(Self { times, spacing: Spacing::Linear { t_max } })
    }

    pub fn geometric(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) || points < 3 {
            return Err(Error::InvalidArgument(format!(
                "geometric grid needs 0 < t_min < t_max and ≥ 3 points, got {t_min}, {t_max}, {points}"
            )));
        }
        let m = points - 1;
        let ratio = (t_max / t_min).ln() / (m - 1) as f64;
        let mut times = vec![0.0];
        times.extend((0..m).map(|i| t_min * (ratio * i as f64).exp()));
        times[points - 1] = t_max;
        Ok(Self { times, spacing: Spacing::Geometric { t_min, t_max } })
    }

    /// Linear, 2000 points, up to `50/ε`.
    pub fn default_for(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("default grid needs ε > 0, got {epsilon}")));
        }
        Self::linear(DEFAULT_HORIZON / epsilon, DEFAULT_GRID_POINTS)
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        let grid = Self { times, spacing: Spacing::Custom };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() < 2 {
            return Err(Error::InvalidArgument("time grid needs at least 2 points".into()));
        }
        if self.times[0] != 0.0 {
            return Err(Error::InvalidArgument("time grid must start at 0".into()));
        }
        if self.times.iter().any(|t| !t.is_finite()) || self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("validated grid")
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub quantity: String,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub model: Option<String>,
    /// Free-form qualifier, e.g. which baseline a drift is measured against.
    pub variant: Option<String>,
}

impl TrajectoryMeta {
    pub fn new(quantity: impl Into<String>) -> Self {
        Self { quantity: quantity.into(), ..Self::default() }
    }

    pub fn epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn model(mut self, model: impl Into<String>) -> Self {
        self.model = Some(model.into());
        self
    }

    pub fn variant(mut self, variant: impl Into<String>) -> Self {
        self.variant = Some(variant.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrajValues {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub values: TrajValues,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn real(grid: TimeGrid, values: Vec<f64>, meta: TrajectoryMeta) -> Self {
        Self { grid, values: TrajValues::Real(values), meta }
    }

    pub fn complex(grid: TimeGrid, values: Vec<C64>, meta: TrajectoryMeta) -> Self {
        Self { grid, values: TrajValues::Complex(values), meta }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            TrajValues::Real(v) => v.len(),
            TrajValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn real_values(&self) -> Option<&[f64]> {
        match &self.values {
            TrajValues::Real(v) => Some(v),
            TrajValues::Complex(_) => None,
        }
    }

    /// Largest modulus over the grid.
    pub fn max_abs(&self) -> f64 {
        match &self.values {
            TrajValues::Real(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            TrajValues::Complex(v) => v.iter().fold(0.0, |m, z| m.max(z.norm())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.len() != self.grid.len() {
            return Err(Error::DimensionMismatch { expected: self.grid.len(), found: self.len() });
        }
        let finite = match &self.values {
            TrajValues::Real(v) => v.iter().all(|x| x.is_finite()),
            TrajValues::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        };
        if !finite {
            return Err(Error::InvalidArgument(format!("trajectory `{}` has non-finite values", self.meta.quantity)));
        }
        Ok(())
    }
}

/// `e^{itG}` for Hermitian `G`, from one eigendecomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermEig,
}

impl Propagator {
    pub fn new(g: &ComplexMatrix) -> Result<Self> {
        Ok(Self { eig: herm_eig(g, structural_tol(g))? })
    }

    /// `e^{itG}`
    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.eig.map(|x| C64::from_polar(1.0, x * t))
    }

    /// `e^{−itG} ψ`
    pub fn evolve_state(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        let v = &self.eig.eigenvectors;
        let coeffs: Vec<C64> = (0..psi.len())
            .map(|k| {
                let overlap: C64 = (0..psi.len()).map(|i| v[(i, k)].conj() * psi[i]).sum();
                overlap * C64::from_polar(1.0, -self.eig.eigenvalues[k] * t)
            })
            .collect();
        (0..psi.len()).map(|i| (0..psi.len()).map(|k| v[(i, k)] * coeffs[k]).sum()).collect()
    }
}

fn perturbed(h: &ComplexMatrix, v: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix> {
    h.ensure_same_dim(v)?;
    Ok(h.add_scaled(C64::new(eps, 0.0), v))
}

fn map_grid(grid: &TimeGrid, f: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
    grid.times().par_iter().map(|&t| f(t)).collect()
}

/// `‖e^{it(H+εV)} − e^{it(H+εV_approx)}‖` over the grid.
pub fn divergence_traj(
    h: &ComplexMatrix,
    v: &ComplexMatrix,
    eps: f64,
    v_approx: &ComplexMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let exact = Propagator::new(&perturbed(h, v, eps)?)?;
    let approx = Propagator::new(&perturbed(h, v_approx, eps)?)?;
    let values = map_grid(grid, |t| op_norm(&(&exact.at(t) - &approx.at(t))));
    Ok(Trajectory::real(grid.clone(), values, TrajectoryMeta::new("divergence").epsilon(eps)))
}

/// `‖e^{it(H+εV)} M e^{−it(H+εV)} − M_ref(t)‖` over the grid.
///
/// For conserved `M` the reference is `M` itself. Otherwise the reference is
/// the free evolution `e^{itH} M e^{−itH}` and the metadata variant says so.
pub fn observable_drift(
    h: &ComplexMatrix,
    v: &ComplexMatrix,
    eps: f64,
    m: &ComplexMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    h.ensure_same_dim(m)?;
    let full = Propagator::new(&perturbed(h, v, eps)?)?;
    let conserved = h.commutator(m).max_abs() <= structural_tol(h).max(structural_tol(m));
    let free = if conserved { None } else { Some(Propagator::new(h)?) };
    let values = map_grid(grid, |t| {
        let u = full.at(t);
        let evolved = u.matmul(m).matmul(&u.adjoint());
        let reference = match &free {
            None => m.clone(),
            Some(p) => {
                let u0 = p.at(t);
                u0.matmul(m).matmul(&u0.adjoint())
            }
        };
        op_norm(&(&evolved - &reference))
    });
    let meta = TrajectoryMeta::new("observable_drift").epsilon(eps).variant(if conserved {
        "against constant observable"
    } else {
        "against free evolution (observable not conserved)"
    });
    Ok(Trajectory::real(grid.clone(), values, meta))
}

/// `⟨ψ_0| e^{itG} M e^{−itG} |ψ_0⟩` over the grid.
pub fn expectation_traj(g: &ComplexMatrix, m: &ComplexMatrix, psi0: &[C64], grid: &TimeGrid) -> Result<Trajectory> {
    g.ensure_same_dim(m)?;
    if psi0.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: psi0.len() });
    }
    let norm = vec_norm(psi0);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::UnnormalizedState { norm });
    }
    let prop = Propagator::new(g)?;
    let values = map_grid(grid, |t| {
        let psi = prop.evolve_state(t, psi0);
        let mpsi = m.matvec(&psi);
        psi.iter().zip(&mpsi).map(|(a, b)| a.conj() * b).sum::<C64>().re
    });
    Ok(Trajectory::real(grid.clone(), values, TrajectoryMeta::new("expectation")))
}

/// `‖e^{−it(H+εV)} e^{−βH} e^{it(H+εV)} − e^{−βH}‖` over the grid.
pub fn gibbs_drift(h: &ComplexMatrix, v: &ComplexMatrix, eps: f64, beta: f64, grid: &TimeGrid) -> Result<Trajectory> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("β must be finite and ≥ 0, got {beta}")));
    }
    let gibbs = matfun_herm(h, |x| C64::new((-beta * x).exp(), 0.0))?;
    let prop = Propagator::new(&perturbed(h, v, eps)?)?;
    let values = map_grid(grid, |t| {
        let u = prop.at(t);
        op_norm(&(&u.adjoint().matmul(&gibbs).matmul(&u) - &gibbs))
    });
    Ok(Trajectory::real(grid.clone(), values, TrajectoryMeta::new("gibbs_drift").epsilon(eps)))
}
