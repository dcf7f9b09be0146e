mod common;

use kamstab::dynamics::TimeGrid;
use kamstab::dynamics::divergence_traj;
use kamstab::kam::{bounds, isospectral_blockdiag, series_order2, solve_homological, x0};
use kamstab::matcore::{herm_eig, op_norm};
use kamstab::models::random_hermitian;
use kamstab::spectral::resolve_default;
use kamstab::symmetry::{offdiag, zeno_project};
use kamstab::{Error, C64};
use proptest::prelude::*;

fn sorted_eigs(a: &kamstab::ComplexMatrix) -> Vec<f64> {
    herm_eig(a, 1e-12).unwrap().eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn homological_residual(seed in any::<u64>(), k in 0usize..3, degenerate in any::<bool>()) {
        let dim = [4, 8, 16][k];
        let h = common::hermitian(dim, seed, degenerate);
        let v = random_hermitian(dim, seed ^ 5).unwrap();
        let res = resolve_default(&h).unwrap();
        let k1 = solve_homological(&res, &v).unwrap();
        prop_assert!(k1.hermiticity_residual() <= 1e-10 * k1.max_abs().max(1.0));
        let lhs = h.commutator(&k1).scale(C64::new(0.0, 1.0));
        prop_assert!(op_norm(&(&lhs + &offdiag(&res, &v).unwrap())) <= 1e-10 * op_norm(&v));
    }

    #[test]
    fn resummation_is_isospectral(seed in any::<u64>(), dim in 2usize..9, degenerate in any::<bool>(),
                                  eps in 0.0f64..0.5) {
        let h = common::hermitian(dim, seed, degenerate);
        let v = random_hermitian(dim, seed ^ 9).unwrap();
        let res = resolve_default(&h).unwrap();
        match isospectral_blockdiag(&res, &v, eps) {
            Ok(kam) => {
                let a = sorted_eigs(&h.add_scaled(C64::new(eps, 0.0), &v));
                let b = sorted_eigs(&h.add_scaled(C64::new(eps, 0.0), &kam.v_resummed));
                let tol = 1e-9 * op_norm(&h).max(1.0);
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= tol);
                }
                prop_assert!(kam.w.unitarity_residual() <= 1e-10);
                prop_assert!(op_norm(&offdiag(&res, &kam.v_resummed).unwrap()) <= 1e-9);
            }
            Err(Error::LevelCrossing { .. } | Error::SingularOverlap) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn gauge_fixed_generators(seed in any::<u64>(), dim in 2usize..9, degenerate in any::<bool>()) {
        let h = common::gapped(dim, seed, degenerate, 0.3);
        let v = random_hermitian(dim, seed ^ 3).unwrap();
        let res = resolve_default(&h).unwrap();
        let s = series_order2(&res, &v).unwrap();
        prop_assert!(op_norm(&zeno_project(&res, &s.k1).unwrap()) <= 1e-12);
        prop_assert!(op_norm(&zeno_project(&res, &s.k2).unwrap()) <= 1e-12);
    }

    #[test]
    fn first_order_agreement(seed in any::<u64>(), dim in 2usize..9, degenerate in any::<bool>()) {
        let h = common::gapped(dim, seed, degenerate, 0.3);
        let v = random_hermitian(dim, seed ^ 4).unwrap();
        let res = resolve_default(&h).unwrap();
        let v_z = zeno_project(&res, &v).unwrap();
        let c: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&e| op_norm(&(&isospectral_blockdiag(&res, &v, e).unwrap().v_resummed - &v_z)) / e)
            .collect();
        let hi = c.iter().copied().fold(0.0, f64::max);
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(hi <= 1.5 * lo, "{c:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eternal_bound(seed in any::<u64>(), dim in 2usize..7, degenerate in any::<bool>(), s in 0.01f64..1.0) {
        let h = common::hermitian(dim, seed, degenerate);
        let v = random_hermitian(dim, seed ^ 11).unwrap();
        let res = resolve_default(&h).unwrap();
        let eps = s * x0() * res.gap / 4.0;
        let b = bounds(res.d(), res.gap, op_norm(&v), eps).unwrap();
        prop_assume!(b.validity);
        let kam = isospectral_blockdiag(&res, &v, eps).unwrap();
        let grid = TimeGrid::linear(50.0 / eps, 400).unwrap();
        let div = divergence_traj(&h, &v, eps, &kam.v_resummed, &grid).unwrap().max_abs();
        prop_assert!(div <= b.linear_bound);
        prop_assert!(div <= b.delta_hat_inf);
    }
}
