//! Textual model tags such as `heisenberg:N=4,J=1,normalize=true`.
//!
//! Grammar: `name[:key=value(,key=value)*]`. List values use `;` as the
//! separator, e.g. `diag:values=1;1;2`. Every tag accepts `normalize=true`,
//! which rescales the result to unit operator norm.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::charges::{boost_charges, boost_operator};
use super::examples::fragile_example;
use super::random::{random_hermitian, random_hermitian_with_spectrum};
use super::spin::{heisenberg_chain, magnetization, pauli_op, Axis};
use crate::error::{Error, Result};
use crate::matcore::{op_norm, ComplexMatrix};

/// Which slot of an experiment a tag fills; picks defaults for tags that
/// describe several matrices at once (`pauli`, `fragile`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    System,
    Perturbation,
    Observable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelTag {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        if name.is_empty() {
            return Err(Error::Parse("empty model tag".into()));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for item in rest.split(',').filter(|p| !p.trim().is_empty()) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("model tag parameter `{item}` is not key=value")))?;
                params.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self { name: name.to_ascii_lowercase(), params })
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl ModelTag {
    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.params.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Parse(format!("{}: cannot parse `{key}={raw}`", self.name))),
            None => default.ok_or_else(|| Error::Parse(format!("{}: missing parameter `{key}`", self.name))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self
            .params
            .get(key)
            .ok_or_else(|| Error::Parse(format!("{}: missing parameter `{key}`", self.name)))?;
        raw.split(';')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{}: bad number `{x}` in `{key}`", self.name))))
            .collect()
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if k != "normalize" && !allowed.contains(&k.as_str()) {
                return Err(Error::Parse(format!("{}: unknown parameter `{k}`", self.name)));
            }
        }
        Ok(())
    }

    /// Builds the matrix described by the tag. `default_seed` is used by
    /// random models that do not carry their own `seed`.
    pub fn build(&self, role: Role, default_seed: u64) -> Result<ComplexMatrix> {
        let m = match self.name.as_str() {
            "heisenberg" => {
                self.check_keys(&["N", "J"])?;
                heisenberg_chain(self.get("N", Some(4))?, self.get("J", Some(1.0))?)?
            }
            "magnetization" => {
                self.check_keys(&["N", "axis"])?;
                magnetization(self.get("N", Some(4))?, self.get("axis", Some(Axis::Z))?)?
            }
            "pauli" => {
                self.check_keys(&["N", "ops"])?;
                match self.params.get("ops") {
                    Some(ops) => pauli_op(self.get("N", Some(1))?, &parse_pauli_ops(ops)?)?,
                    // The canonical two-level pair: H = σ_z, V = M = σ_x.
                    None => match role {
                        Role::System => Axis::Z.matrix(),
                        Role::Perturbation | Role::Observable => Axis::X.matrix(),
                    },
                }
            }
            "gue" => {
                self.check_keys(&["dim", "seed"])?;
                random_hermitian(self.get("dim", Some(8))?, self.get("seed", Some(default_seed))?)?
            }
            "spectrum" => {
                self.check_keys(&["values", "seed"])?;
                random_hermitian_with_spectrum(&self.list("values")?, self.get("seed", Some(default_seed))?)
            }
            "fragile" => {
                self.check_keys(&["e", "m1", "m2", "part"])?;
                let ex = fragile_example(
                    self.get("e", Some(0.0))?,
                    self.get("m1", Some(1.0))?,
                    self.get("m2", Some(-1.0))?,
                )?;
                let default_part = match role {
                    Role::System => "h",
                    Role::Perturbation => "v",
                    Role::Observable => "m",
                };
                match self.get::<String>("part", Some(default_part.into()))?.as_str() {
                    "h" => ex.h,
                    "m" => ex.m,
                    "v" => ex.v,
                    other => return Err(Error::Parse(format!("fragile: unknown part `{other}` (h, m or v)"))),
                }
            }
            "identity" => {
                self.check_keys(&["dim"])?;
                ComplexMatrix::identity(self.get("dim", Some(2))?)
            }
            "zero" => {
                self.check_keys(&["dim"])?;
                ComplexMatrix::zeros(self.get("dim", Some(2))?)
            }
            "diag" => {
                self.check_keys(&["values"])?;
                ComplexMatrix::diag_real(&self.list("values")?)
            }
            "charge" => {
                self.check_keys(&["N", "order", "J"])?;
                let n: usize = self.get("N", Some(4))?;
                let order: usize = self.get("order", Some(3))?;
                if order == 2 {
                    heisenberg_chain(n, self.get("J", Some(1.0))?)?
                } else {
                    boost_charges(n, order, self.get("J", Some(1.0))?)?.pop().expect("nonempty").matrix
                }
            }
            "boost" => {
                self.check_keys(&["N"])?;
                boost_operator(self.get("N", Some(4))?)?
            }
            other => return Err(Error::Parse(format!("unknown model `{other}`"))),
        };
        if m.dim() == 0 {
            return Err(Error::InvalidArgument(format!("{self}: empty matrix")));
        }
        if self.get("normalize", Some(false))? {
            let norm = op_norm(&m);
            if norm == 0.0 {
                return Err(Error::InvalidArgument(format!("{self}: cannot normalize the zero matrix")));
            }
            return Ok(m.scale_real(1.0 / norm));
        }
        Ok(m)
    }
}

/// Parses a Pauli string like `x0z1` or `y2` into `(site, axis)` factors.
pub fn parse_pauli_ops(ops: &str) -> Result<Vec<(usize, Axis)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = ops.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    while i < chars.len() {
        let axis: Axis = chars[i].to_string().parse()?;
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::Parse(format!("pauli ops `{ops}`: axis without a site index")));
        }
        let site: usize = chars[start..i].iter().collect::<String>().parse().expect("digits");
        out.push((site, axis));
    }
    if out.is_empty() {
        return Err(Error::Parse("pauli ops must name at least one factor".into()));
    }
    Ok(out)
}

/// Parses and builds a tag in one step.
pub fn build_model(tag: &str, role: Role, default_seed: u64) -> Result<ComplexMatrix> {
    tag.parse::<ModelTag>()?.build(role, default_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let t: ModelTag = "heisenberg:N=4,J=1,normalize=true".parse().unwrap();
        assert_eq!(t.name, "heisenberg");
        assert_eq!(t.params["N"], "4");
        assert_eq!(t.to_string(), "heisenberg:J=1,N=4,normalize=true");
    }

    #[test]
    fn builds_each_model() {
        let h = build_model("heisenberg:N=4,J=1,normalize=true", Role::System, 0).unwrap();
        assert_eq!(h.dim(), 16);
        assert!((op_norm(&h) - 1.0).abs() < 1e-12);
        assert_eq!(build_model("pauli", Role::System, 0).unwrap(), Axis::Z.matrix());
        assert_eq!(build_model("pauli", Role::Perturbation, 0).unwrap(), Axis::X.matrix());
        assert_eq!(build_model("pauli:N=2,ops=x0x1", Role::System, 0).unwrap().dim(), 4);
        let g1 = build_model("gue:dim=16,seed=7", Role::Perturbation, 99).unwrap();
        assert_eq!(g1, random_hermitian(16, 7).unwrap());
        let g2 = build_model("gue:dim=4", Role::Perturbation, 3).unwrap();
        assert_eq!(g2, random_hermitian(4, 3).unwrap());
        let m = build_model("fragile:e=0,m1=1,m2=-1", Role::Observable, 0).unwrap();
        assert_eq!(m, ComplexMatrix::diag_real(&[1.0, -1.0]));
        assert_eq!(build_model("diag:values=1;1;2", Role::System, 0).unwrap(), ComplexMatrix::diag_real(&[1.0, 1.0, 2.0]));
        assert_eq!(build_model("magnetization:N=2,axis=x", Role::Observable, 0).unwrap().dim(), 4);
        assert_eq!(build_model("charge:N=4,order=3", Role::Observable, 0).unwrap().dim(), 16);
    }

    #[test]
    fn rejects_malformed() {
        assert!(build_model("nonsense", Role::System, 0).is_err());
        assert!(build_model("heisenberg:N", Role::System, 0).is_err());
        assert!(build_model("heisenberg:N=four", Role::System, 0).is_err());
        assert!(build_model("heisenberg:K=2", Role::System, 0).is_err());
        assert!(build_model("pauli:ops=q0", Role::System, 0).is_err());
        assert!(build_model("zero:normalize=true", Role::System, 0).is_err());
    }

    #[test]
    fn pauli_ops_parser() {
        assert_eq!(parse_pauli_ops("x0z12").unwrap(), vec![(0, Axis::X), (12, Axis::Z)]);
        assert!(parse_pauli_ops("x").is_err());
    }
}
