//! Concrete systems: qubit chains and their charges, two-level examples and
//! seeded random ensembles.

mod charges;
mod examples;
mod random;
mod spin;
mod tags;

pub use self::charges::{boost_charges, boost_operator, finite_boost_charge, Charge, PauliSum};
pub use self::examples::{fragile_example, zeno_saturation_sequence, FragileExample};
pub use self::random::{
    ginibre, random_hermitian, random_hermitian_with_spectrum, random_state, random_unitary, SeededRng,
};
pub use self::spin::{all_up, cyclic_shift, heisenberg_chain, magnetization, pauli_op, Axis, SpinSystem, MAX_QUBITS};
pub use self::tags::{build_model, parse_pauli_ops, ModelTag, Role};
