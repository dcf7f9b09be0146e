use kamstab::matcore::op_norm;
use kamstab::models::{boost_charges, cyclic_shift, heisenberg_chain, magnetization, pauli_op, Axis};
use kamstab::ComplexMatrix;
use proptest::prelude::*;

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn heisenberg_symmetries(n in 2usize..7, j in -3.0f64..3.0) {
        let h = heisenberg_chain(n, j).unwrap();
        prop_assert!(h.hermiticity_residual() <= 1e-12);
        for a in Axis::ALL {
            prop_assert!(h.commutator(&magnetization(n, a).unwrap()).max_abs() <= 1e-12);
        }
        let t = cyclic_shift(n).unwrap();
        prop_assert!(t.unitarity_residual() <= 1e-12);
        prop_assert!(h.commutator(&t).max_abs() <= 1e-12);
    }

    #[test]
    fn pauli_strings_square_to_identity(n in 1usize..7, picks in prop::collection::vec((0usize..6, axis()), 1..4)) {
        let mut factors: Vec<(usize, Axis)> = Vec::new();
        for (s, a) in picks {
            let s = s % n;
            if factors.iter().all(|f| f.0 != s) {
                factors.push((s, a));
            }
        }
        let p = pauli_op(n, &factors).unwrap();
        prop_assert!(p.hermiticity_residual() == 0.0);
        prop_assert!((&p.matmul(&p) - &ComplexMatrix::identity(1 << n)).max_abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn boost_charges_conserved(n in 3usize..6, j in 0.2f64..2.0) {
        let h = heisenberg_chain(n, j).unwrap();
        let t = cyclic_shift(n).unwrap();
        for q in boost_charges(n, n, j).unwrap() {
            prop_assert!(q.matrix.hermiticity_residual() <= 1e-10);
            prop_assert!(op_norm(&h.commutator(&q.matrix)) <= 1e-10 * op_norm(&q.matrix).max(1.0));
            prop_assert!(op_norm(&t.matmul(&q.matrix).matmul(&t.adjoint()).add_scaled((-1.0).into(), &q.matrix)) <= 1e-10);
        }
    }
}
