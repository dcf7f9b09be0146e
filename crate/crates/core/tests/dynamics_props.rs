mod common;

use kamstab::dynamics::{divergence_traj, expectation_traj, observable_drift, Propagator, TimeGrid};
use kamstab::kam::{bounds, isospectral_blockdiag, x0};
use kamstab::matcore::op_norm;
use kamstab::models::{random_hermitian, random_state};
use kamstab::spectral::resolve_default;
use kamstab::symmetry::{robust_part, zeno_project};
use kamstab::C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn propagators_are_unitary(seed in any::<u64>(), dim in 2usize..12, t_max in 0.1f64..1e4) {
        let g = random_hermitian(dim, seed).unwrap().scale_real(3.0);
        let p = Propagator::new(&g).unwrap();
        for &t in TimeGrid::linear(t_max, 50).unwrap().times() {
            prop_assert!(p.at(t).unitarity_residual() <= 1e-10);
        }
        let psi = random_state(dim, seed ^ 1).unwrap();
        let out = p.evolve_state(t_max, &psi);
        let n: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((n - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn zeno_bound_chain(seed in any::<u64>(), dim in 2usize..7, degenerate in any::<bool>(), s in 0.01f64..1.0) {
        let h = common::hermitian(dim, seed, degenerate);
        let v = random_hermitian(dim, seed ^ 2).unwrap();
        let res = resolve_default(&h).unwrap();
        let eps = s * res.gap / 4.0;
        let m = robust_part(&res, &random_hermitian(dim, seed ^ 3).unwrap()).unwrap();
        let norm_m = op_norm(&m);
        let b = bounds(res.d(), res.gap, op_norm(&v), eps).unwrap();
        let grid = TimeGrid::linear(20.0 / eps, 300).unwrap();
        let drift = observable_drift(&h, &v, eps, &m, &grid).unwrap();
        let dz = divergence_traj(&h, &v, eps, &zeno_project(&res, &v).unwrap(), &grid).unwrap();
        let (drift, dz) = (drift.real_values().unwrap(), dz.real_values().unwrap());
        for (i, &t) in grid.times().iter().enumerate() {
            prop_assert!(drift[i] <= 2.0 * norm_m * dz[i] + 1e-10);
            prop_assert!(dz[i] <= b.zeno_bound_at(t) + 1e-12);
        }
    }

    #[test]
    fn resummed_drift_chain(seed in any::<u64>(), dim in 2usize..7, degenerate in any::<bool>(), s in 0.01f64..1.0) {
        let h = common::hermitian(dim, seed, degenerate);
        let v = random_hermitian(dim, seed ^ 4).unwrap();
        let res = resolve_default(&h).unwrap();
        let eps = s * x0() * res.gap / 4.0;
        let b = bounds(res.d(), res.gap, op_norm(&v), eps).unwrap();
        prop_assume!(b.validity);
        let m = robust_part(&res, &random_hermitian(dim, seed ^ 5).unwrap()).unwrap();
        let kam = isospectral_blockdiag(&res, &v, eps).unwrap();
        let grid = TimeGrid::linear(50.0 / eps, 300).unwrap();
        let drift = observable_drift(&h, &v, eps, &m, &grid).unwrap().max_abs();
        let div = divergence_traj(&h, &v, eps, &kam.v_resummed, &grid).unwrap().max_abs();
        prop_assert!(drift <= 2.0 * op_norm(&m) * div + 1e-10);
        prop_assert!(div <= b.linear_bound);
    }
}

/// Largest deviation of `⟨H⟩` and of `⟨H²⟩ − ⟨H⟩²` from their initial values.
fn energy_moment_drift(h: &kamstab::ComplexMatrix, v: &kamstab::ComplexMatrix, eps: f64, psi: &[C64]) -> (f64, f64) {
    let g = h.add_scaled(C64::new(eps, 0.0), v);
    // Same dense grid for every ε so the sup is not a sampling artefact.
    let grid = TimeGrid::linear(2500.0, 20_000).unwrap();
    let e1 = expectation_traj(&g, h, psi, &grid).unwrap();
    let e2 = expectation_traj(&g, &h.matmul(h), psi, &grid).unwrap();
    let (e1, e2) = (e1.real_values().unwrap(), e2.real_values().unwrap());
    let var0 = e2[0] - e1[0] * e1[0];
    let mean = e1.iter().map(|x| (x - e1[0]).abs()).fold(0.0, f64::max);
    let var = e1.iter().zip(e2).map(|(a, b)| (b - a * a - var0).abs()).fold(0.0, f64::max);
    (mean, var)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_moments_scale_linearly(seed in any::<u64>(), dim in 3usize..7) {
        let h = common::gapped(dim, seed, false, 0.3);
        let v = random_hermitian(dim, seed ^ 6).unwrap();
        let psi = random_state(dim, seed ^ 7).unwrap();
        let (m1, v1) = energy_moment_drift(&h, &v, 0.02, &psi);
        let (m2, v2) = energy_moment_drift(&h, &v, 0.01, &psi);
        prop_assert!((0.3..=0.7).contains(&(m2 / m1)), "mean ratio {}", m2 / m1);
        prop_assert!((0.3..=0.7).contains(&(v2 / v1)), "variance ratio {}", v2 / v1);
    }
}
