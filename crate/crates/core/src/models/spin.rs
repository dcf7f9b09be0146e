//! Qubit-chain operators. Site 0 is the leftmost Kronecker factor.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let rows = match self {
            Axis::X => [[z, one], [one, z]],
            Axis::Y => [[z, -i], [i, z]],
            Axis::Z => [[one, z], [z, -one]],
        };
        ComplexMatrix::from_fn(2, |r, c| rows[r][c])
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::Parse(format!("unknown axis `{other}` (expected x, y or z)"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Qubit count with `dim = 2^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinSystem {
    n: usize,
}

impl SpinSystem {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("qubit count must be in 1..={MAX_QUBITS}, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }
}

/// Tensor product of single-site Paulis, identity elsewhere.
pub fn pauli_op(n: usize, factors: &[(usize, Axis)]) -> Result<ComplexMatrix> {
    let sys = SpinSystem::new(n)?;
    let mut seen = [false; MAX_QUBITS];
    for &(site, _) in factors {
        if site >= n {
            return Err(Error::SiteOutOfRange { site, n });
        }
        if seen[site] {
            return Err(Error::DuplicateSite { site });
        }
        seen[site] = true;
    }
    Ok(pauli_string(sys, factors))
}

/// Pauli string matrix built directly from its monomial structure; factors
/// are assumed valid.
pub(crate) fn pauli_string(sys: SpinSystem, factors: &[(usize, Axis)]) -> ComplexMatrix {
    let n = sys.qubits();
    let dim = sys.dim();
    let mut flip = 0usize;
    let mut out = ComplexMatrix::zeros(dim);
    for &(site, axis) in factors {
        if axis != Axis::Z {
            flip |= 1 << (n - 1 - site);
        }
    }
    // Column `col` maps to row `col ^ flip` with a phase from each factor.
    for col in 0..dim {
        let mut phase = C64::new(1.0, 0.0);
        for &(site, axis) in factors {
            let bit = (col >> (n - 1 - site)) & 1;
            phase *= match (axis, bit) {
                (Axis::X, _) => C64::new(1.0, 0.0),
                (Axis::Y, 0) => C64::new(0.0, 1.0),
                (Axis::Y, _) => C64::new(0.0, -1.0),
                (Axis::Z, 0) => C64::new(1.0, 0.0),
                (Axis::Z, _) => C64::new(-1.0, 0.0),
            };
        }
        out[(col ^ flip, col)] = phase;
    }
    out
}

/// `Σ_n σ_{n,axis}`
pub fn magnetization(n: usize, axis: Axis) -> Result<ComplexMatrix> {
    let sys = SpinSystem::new(n)?;
    let mut m = ComplexMatrix::zeros(sys.dim());
    for site in 0..n {
        m += &pauli_string(sys, &[(site, axis)]);
    }
    Ok(m)
}

/// `σ_i · σ_j = Σ_a σ_{i,a} σ_{j,a}` for distinct sites.
pub(crate) fn spin_dot(sys: SpinSystem, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(sys.dim());
    for axis in Axis::ALL {
        m += &pauli_string(sys, &[(i, axis), (j, axis)]);
    }
    m
}

/// Periodic Heisenberg chain `−J Σ_n σ_n · σ_{n+1}` with `σ_N = σ_0`.
///
/// For `N = 2` both bonds join the same pair, giving `−2J σ_0 · σ_1`.
pub fn heisenberg_chain(n: usize, j: f64) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Heisenberg chain needs N ≥ 2, got {n}")));
    }
    let sys = SpinSystem::new(n)?;
    let mut h = ComplexMatrix::zeros(sys.dim());
    for site in 0..n {
        h += &spin_dot(sys, site, (site + 1) % n);
    }
    Ok(h.scale_real(-j))
}

/// Permutation `T` moving site `k` to site `k + 1 (mod N)`.
pub fn cyclic_shift(n: usize) -> Result<ComplexMatrix> {
    let sys = SpinSystem::new(n)?;
    let dim = sys.dim();
    let mut t = ComplexMatrix::zeros(dim);
    for col in 0..dim {
        // Bit for site k sits at position n−1−k; site k → k+1 shifts bits right
        // with wrap-around of site n−1 (bit 0) to site 0 (bit n−1).
        let row = (col >> 1) | ((col & 1) << (n - 1));
        t[(row, col)] = C64::new(1.0, 0.0);
    }
    Ok(t)
}

/// Computational basis state with every qubit in `|0⟩ = |↑⟩`.
pub fn all_up(n: usize) -> Result<Vec<C64>> {
    let sys = SpinSystem::new(n)?;
    let mut v = vec![C64::new(0.0, 0.0); sys.dim()];
    v[0] = C64::new(1.0, 0.0);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site() {
        assert_eq!(pauli_op(1, &[(0, Axis::X)]).unwrap(), Axis::X.matrix());
        assert_eq!(pauli_op(1, &[(0, Axis::Y)]).unwrap(), Axis::Y.matrix());
    }

    #[test]
    fn two_site_products() {
        let zz = pauli_op(2, &[(0, Axis::Z), (1, Axis::Z)]).unwrap();
        assert_eq!(zz, ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
        let xx = pauli_op(2, &[(0, Axis::X), (1, Axis::X)]).unwrap();
        let anti = ComplexMatrix::from_fn(4, |i, j| C64::new(if i + j == 3 { 1.0 } else { 0.0 }, 0.0));
        assert_eq!(xx, anti);
        // Agrees with the explicit Kronecker product, site 0 leftmost.
        let xz = pauli_op(2, &[(0, Axis::X), (1, Axis::Z)]).unwrap();
        assert_eq!(xz, Axis::X.matrix().kron(&Axis::Z.matrix()));
        let y1 = pauli_op(3, &[(1, Axis::Y)]).unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(y1, id.kron(&Axis::Y.matrix()).kron(&id));
    }

    #[test]
    fn invalid_sites() {
        assert!(matches!(pauli_op(2, &[(2, Axis::X)]), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(pauli_op(2, &[(1, Axis::X), (1, Axis::Z)]), Err(Error::DuplicateSite { site: 1 })));
        assert!(pauli_op(7, &[]).is_err());
    }

    #[test]
    fn magnetization_diagonal() {
        assert_eq!(magnetization(1, Axis::Z).unwrap(), Axis::Z.matrix());
        let m = magnetization(4, Axis::Z).unwrap();
        for idx in 0..16usize {
            let down = idx.count_ones() as f64;
            assert_eq!(m[(idx, idx)].re, 4.0 - 2.0 * down);
        }
    }

    #[test]
    fn chain_symmetries() {
        for n in 2..=5 {
            let h = heisenberg_chain(n, 1.0).unwrap();
            assert_eq!(h.hermiticity_residual(), 0.0);
            for axis in Axis::ALL {
                let m = magnetization(n, axis).unwrap();
                assert!(h.commutator(&m).max_abs() < 1e-12);
            }
            let t = cyclic_shift(n).unwrap();
            assert!(h.commutator(&t).max_abs() < 1e-12);
        }
    }

    #[test]
    fn two_site_chain_spectrum() {
        // −2J σ·σ: triplet at −2, singlet at +6.
        let h = heisenberg_chain(2, 1.0).unwrap();
        let e = crate::matcore::herm_eig(&h, 1e-12).unwrap();
        let want = [-2.0, -2.0, -2.0, 6.0];
        for (a, b) in e.eigenvalues.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_moves_sites() {
        let t = cyclic_shift(3).unwrap();
        let z0 = pauli_op(3, &[(0, Axis::Z)]).unwrap();
        let z1 = pauli_op(3, &[(1, Axis::Z)]).unwrap();
        let moved = t.matmul(&z0).matmul(&t.adjoint());
        assert_eq!(moved, z1);
    }
}
