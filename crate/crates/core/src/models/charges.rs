//! Boost-generated conserved charges of the periodic Heisenberg chain.
//!
//! The boost recursion `Q_{n+1} = −i[B, Q_n]` is defined on the infinite
//! chain, where `B = Σ_j j·b_j` with the bond density `b_j = ½ σ_j·σ_{j+1}`.
//! On a finite ring the position weight `j` has a seam, and the literal
//! commutator with a finite boost is generally not conserved. Here the
//! recursion is carried out on translation-invariant densities on the
//! infinite chain and the resulting densities are then wrapped onto `N`
//! sites, which gives exactly conserved local charges whenever the density
//! fits on the ring.
//!
//! For `Q = Σ_k T_k q`, the infinite-chain commutator is
//! `[B, Q] = Σ_k k·T_k x + Σ_k T_k y` with `x = Σ_s [T_s b, q]` and
//! `y = Σ_s s·[T_s b, q]`. Conservation of `Q` makes `x` a lattice
//! difference `z − T_1 z`, after which `Σ_k k·T_k x = Σ_k T_k z` and the
//! new density is `−i(z + y)`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::spin::{pauli_string, spin_dot, Axis, SpinSystem};
use crate::error::{Error, Result};
use crate::matcore::{op_norm, ComplexMatrix};

/// Sparse Pauli string on the infinite chain: sorted `(site, axis)` pairs.
type Word = Vec<(i64, Axis)>;

/// Coefficients below this magnitude are dropped from densities.
const DENSITY_CUTOFF: f64 = 1e-13;

/// Finite linear combination of Pauli strings on the infinite chain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliSum {
    terms: BTreeMap<Word, C64>,
}

fn site_product(a: Axis, b: Axis) -> (C64, Option<Axis>) {
    use Axis::*;
    if a == b {
        return (C64::new(1.0, 0.0), None);
    }
    let (c, cyclic) = match (a, b) {
        (X, Y) => (Z, true),
        (Y, Z) => (X, true),
        (Z, X) => (Y, true),
        (Y, X) => (Z, false),
        (Z, Y) => (X, false),
        (X, Z) => (Y, false),
        _ => unreachable!(),
    };
    (C64::new(0.0, if cyclic { 1.0 } else { -1.0 }), Some(c))
}

fn word_product(u: &Word, v: &Word) -> (C64, Word) {
    let mut phase = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(u.len() + v.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < v.len() {
        match (u.get(i), v.get(j)) {
            (Some(&(su, au)), Some(&(sv, av))) if su == sv => {
                let (p, c) = site_product(au, av);
                phase *= p;
                if let Some(c) = c {
                    out.push((su, c));
                }
                i += 1;
                j += 1;
            }
            (Some(&(su, au)), Some(&(sv, _))) if su < sv => {
                out.push((su, au));
                i += 1;
            }
            (Some(_), Some(&(sv, av))) => {
                out.push((sv, av));
                j += 1;
            }
            (Some(&t), None) => {
                out.push(t);
                i += 1;
            }
            (None, Some(&t)) => {
                out.push(t);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (phase, out)
}

impl PauliSum {
    pub fn add_term(&mut self, word: Word, coeff: C64) {
        let entry = self.terms.entry(word).or_insert(C64::new(0.0, 0.0));
        *entry += coeff;
    }

    fn add_scaled(&mut self, other: &PauliSum, s: C64) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * s);
        }
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() > DENSITY_CUTOFF);
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn commutator(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::default();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let (p, w) = word_product(u, v);
                let (q, w2) = word_product(v, u);
                debug_assert_eq!(w, w2);
                let c = a * b * (p - q);
                if c.norm() > 0.0 {
                    out.add_term(w, c);
                }
            }
        }
        out.pruned()
    }

    pub fn translate(&self, by: i64) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.iter().map(|&(s, a)| (s + by, a)).collect(), *c))
                .collect(),
        }
    }

    fn site_range(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().filter_map(|w| w.first()).map(|t| t.0).min()?;
        let hi = self.terms.keys().filter_map(|w| w.last()).map(|t| t.0).max()?;
        Some((lo, hi))
    }

    /// Largest support width over all strings.
    pub fn width(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|w| Some((w.last()?.0 - w.first()?.0 + 1) as usize))
            .max()
            .unwrap_or(0)
    }

    /// `Σ_{j=0}^{N−1} T_j (density)` with sites taken modulo `N`.
    pub fn wrap(&self, sys: SpinSystem) -> Result<ComplexMatrix> {
        let n = sys.qubits();
        if self.width() > n {
            return Err(Error::InvalidArgument(format!(
                "density of width {} does not fit on {n} sites",
                self.width()
            )));
        }
        let mut m = ComplexMatrix::zeros(sys.dim());
        for (w, c) in &self.terms {
            for shift in 0..n as i64 {
                let factors: Vec<(usize, Axis)> =
                    w.iter().map(|&(s, a)| ((s + shift).rem_euclid(n as i64) as usize, a)).collect();
                m = m.add_scaled(*c, &pauli_string(sys, &factors));
            }
        }
        Ok(m)
    }
}

/// Bond density `σ_0 · σ_1` scaled by `coeff`.
fn bond_density(coeff: f64) -> PauliSum {
    let mut s = PauliSum::default();
    for a in Axis::ALL {
        s.add_term(vec![(0, a), (1, a)], C64::new(coeff, 0.0));
    }
    s
}

/// Density of `−i[B, Q]` for the translation-invariant `Q` with density `q`.
///
/// Returns the new density and the size of the obstruction `Σ_p c_{w,p}`,
/// which vanishes exactly when `Q` commutes with the uniform bond sum.
fn boost_step(q: &PauliSum) -> (PauliSum, f64) {
    let b = bond_density(0.5);
    let (lo, hi) = q.site_range().unwrap_or((0, 0));
    let mut x = PauliSum::default();
    let mut y = PauliSum::default();
    for s in lo - 1..=hi {
        let c = b.translate(s).commutator(q);
        x.add_scaled(&c, C64::new(1.0, 0.0));
        y.add_scaled(&c, C64::new(s as f64, 0.0));
    }
    let x = x.pruned();

    // Group x by shape: word anchored at site 0, keyed by its first site.
    let mut by_shape: BTreeMap<Word, BTreeMap<i64, C64>> = BTreeMap::new();
    for (w, c) in &x.terms {
        let p = w[0].0;
        let shape: Word = w.iter().map(|&(s, a)| (s - p, a)).collect();
        *by_shape.entry(shape).or_default().entry(p).or_insert(C64::new(0.0, 0.0)) += c;
    }
    let mut z = PauliSum::default();
    let mut obstruction: f64 = 0.0;
    for (shape, coeffs) in &by_shape {
        let first = *coeffs.keys().next().expect("nonempty");
        let last = *coeffs.keys().last().expect("nonempty");
        let mut running = C64::new(0.0, 0.0);
        for p in first..=last {
            running += coeffs.get(&p).copied().unwrap_or_default();
            if p < last {
                z.add_term(shape.iter().map(|&(s, a)| (s + p, a)).collect(), running);
            }
        }
        obstruction = obstruction.max(running.norm());
    }

    let mut out = z;
    out.add_scaled(&y, C64::new(1.0, 0.0));
    let minus_i = C64::new(0.0, -1.0);
    let out = PauliSum {
        terms: out.terms.into_iter().map(|(w, c)| (w, c * minus_i)).collect(),
    };
    (out.pruned(), obstruction)
}

/// A conserved-charge candidate with its measured commutator with `H`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Charge {
    /// `n` in `Q_n`; `Q_2` is the Hamiltonian.
    pub order: usize,
    pub matrix: ComplexMatrix,
    /// `‖[H, Q_n]‖`
    pub commutator_norm: f64,
}

/// Charges `Q_2 = H, Q_3, …, Q_{n_max}` of the periodic chain
/// `H = −J Σ σ_n·σ_{n+1}` on `N` sites.
pub fn boost_charges(n: usize, n_max: usize, j: f64) -> Result<Vec<Charge>> {
    if !(3..=n).contains(&n_max) {
        return Err(Error::InvalidArgument(format!("boost charges need 3 ≤ n_max ≤ N, got n_max = {n_max}, N = {n}")));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("boost charges need N ≥ 3, got {n}")));
    }
    let sys = SpinSystem::new(n)?;
    let h = super::heisenberg_chain(n, j)?;
    let mut density = bond_density(-j);
    let mut charges = vec![Charge { order: 2, matrix: h.clone(), commutator_norm: 0.0 }];
    for order in 3..=n_max {
        let (next, _obstruction) = boost_step(&density);
        density = next;
        let m = density.wrap(sys)?.hermitian_part();
        let commutator_norm = op_norm(&h.commutator(&m));
        charges.push(Charge { order, matrix: m, commutator_norm });
    }
    Ok(charges)
}

/// Literal finite boost `½ Σ_{n=1}^{N} n·σ_n·σ_{n+1}` on the periodic ring.
pub fn boost_operator(n: usize) -> Result<ComplexMatrix> {
    let sys = SpinSystem::new(n)?;
    let mut b = ComplexMatrix::zeros(sys.dim());
    for site in 0..n {
        b = b.add_scaled(C64::new(0.5 * (site + 1) as f64, 0.0), &spin_dot(sys, site, (site + 1) % n));
    }
    Ok(b)
}

/// `−i[B, H]` with the literal finite boost, for comparison with the
/// wrapped density construction.
pub fn finite_boost_charge(n: usize, j: f64) -> Result<Charge> {
    let h = super::heisenberg_chain(n, j)?;
    let b = boost_operator(n)?;
    let m = b.commutator(&h).scale(C64::new(0.0, -1.0)).hermitian_part();
    let commutator_norm = op_norm(&h.commutator(&m));
    Ok(Charge { order: 3, matrix: m, commutator_norm })
}
