//! Robust and fragile conserved quantities of finite-dimensional quantum
//! systems.
//!
//! A conserved observable of `H = Σ e_k P_k` is *robust* when it acts as a
//! scalar on every eigenspace (equivalently, is a polynomial in `H`) and
//! *fragile* when it distinguishes states inside a degenerate eigenspace.
//! Robust observables drift by `O(ε)` for all times under a perturbation
//! `εV`; fragile ones can drift by `O(1)` at times `O(1/ε)`.
//!
//! Modules, bottom-up:
//! - [`matcore`]: dense complex linear algebra.
//! - [`spectral`]: spectral resolutions, reduced resolvents, polynomial representation.
//! - [`symmetry`]: Zeno projection and the non-conserved/robust/fragile split.
//! - [`kam`]: homological equation, second-order series, isospectral resummation, bounds.
//! - [`dynamics`]: time-grid verification of drift and divergence.
//! - [`models`]: spin chains, charges, two-level examples, random ensembles.
//! - [`lindblad`]: superoperators and monotones for open systems.
//! - [`verify`]: the acceptance checks as reusable functions.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod kam;
pub mod lindblad;
pub mod matcore;
pub mod models;
pub mod spectral;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
pub use num_complex::Complex64 as C64;
