//! Circuits of Pauli rotations and Clifford gates.
//!
//! Gates are listed in application order: the first gate acts first on the
//! initial state. A rotation gate is `exp(-i · sign · θ/2 · σ)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::pauli::PauliString;

/// Angle of a rotation: a fixed value or an index into θ.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamRef {
    Bound(f64),
    Free(usize),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clifford {
    H(usize),
    S(usize),
    Sdg(usize),
    Cnot(usize, usize),
}

impl Clifford {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Clifford::H(q) | Clifford::S(q) | Clifford::Sdg(q) => vec![q],
            Clifford::Cnot(c, t) => vec![c, t],
        }
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Self {
        match *self {
            Clifford::S(q) => Clifford::Sdg(q),
            Clifford::Sdg(q) => Clifford::S(q),
            g => g,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::Parameter(format!("qubit {q} out of range for {n} qubits")));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Parameter("CNOT control and target coincide".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Rotation {
        axis: PauliString,
        angle: ParamRef,
        sign: i8,
    },
    Clifford(Clifford),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    AllZero,
    AllPlus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    param_count: usize,
    initial_state: InitialState,
}

impl Circuit {
    pub fn new(n: usize, initial_state: InitialState) -> Self {
        Self {
            n,
            gates: Vec::new(),
            param_count: 0,
            initial_state,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn initial_state(&self) -> InitialState {
        self.initial_state
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Append `exp(-i θ/2 σ)`.
    pub fn append_rotation(&mut self, axis: PauliString, angle: ParamRef) -> Result<&mut Self> {
        self.append_rotation_signed(axis, angle, 1)
    }

    /// Append `exp(-i · sign · θ/2 · σ)`. A free index may reuse an existing
    /// parameter or introduce the next one.
    pub fn append_rotation_signed(
        &mut self,
        axis: PauliString,
        angle: ParamRef,
        sign: i8,
    ) -> Result<&mut Self> {
        check_dim(self.n, axis.n())?;
        if axis.is_identity() {
            return Err(Error::Parameter("rotation axis is the identity".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Parameter(format!("rotation sign must be ±1, got {sign}")));
        }
        match angle {
            ParamRef::Free(i) if i > self.param_count => {
                return Err(Error::Parameter(format!(
                    "free index {i} skips past param_count {}",
                    self.param_count
                )));
            }
            ParamRef::Free(i) => self.param_count = self.param_count.max(i + 1),
            ParamRef::Bound(v) if !v.is_finite() => {
                return Err(Error::NonFinite(format!("bound angle {v}")));
            }
            ParamRef::Bound(_) => {}
        }
        self.gates.push(Gate::Rotation { axis, angle, sign });
        Ok(self)
    }

    pub fn append_clifford(&mut self, g: Clifford) -> Result<&mut Self> {
        g.validate(self.n)?;
        self.gates.push(Gate::Clifford(g));
        Ok(self)
    }

    pub fn extend_cliffords(&mut self, gates: impl IntoIterator<Item = Clifford>) -> Result<&mut Self> {
        for g in gates {
            self.append_clifford(g)?;
        }
        Ok(self)
    }

    /// `b` first, then `a`. Free indices of `a` are shifted past those of `b`;
    /// the result takes `b`'s initial state.
    pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
        check_dim(b.n, a.n)?;
        let shift = b.param_count;
        let mut gates = b.gates.clone();
        gates.extend(a.gates.iter().map(|g| match g {
            Gate::Rotation {
                axis,
                angle: ParamRef::Free(i),
                sign,
            } => Gate::Rotation {
                axis: axis.clone(),
                angle: ParamRef::Free(i + shift),
                sign: *sign,
            },
            g => g.clone(),
        }));
        Ok(Circuit {
            n: b.n,
            gates,
            param_count: a.param_count + b.param_count,
            initial_state: b.initial_state,
        })
    }

    /// Substitute θ for every free parameter.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        self.check_theta(theta)?;
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Rotation { axis, angle, sign } => Gate::Rotation {
                    axis: axis.clone(),
                    angle: ParamRef::Bound(resolve(*angle, theta)),
                    sign: *sign,
                },
                g => g.clone(),
            })
            .collect();
        Ok(Circuit {
            n: self.n,
            gates,
            param_count: 0,
            initial_state: self.initial_state,
        })
    }

    pub(crate) fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count {
            return Err(Error::Parameter(format!(
                "expected {} parameters, got {}",
                self.param_count,
                theta.len()
            )));
        }
        if let Some(v) = theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("parameter value {v}")));
        }
        Ok(())
    }

    /// Re-embed on `n` qubits with an explicit AllZero start, turning an
    /// AllPlus initial state into a leading Hadamard column.
    pub fn widen(&self, n: usize) -> Result<Circuit> {
        if n < self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: n,
            });
        }
        let mut out = Circuit::new(n, InitialState::AllZero);
        if self.initial_state == InitialState::AllPlus {
            out.extend_cliffords((0..self.n).map(Clifford::H))?;
        }
        for g in &self.gates {
            out.gates.push(match g {
                Gate::Rotation { axis, angle, sign } => Gate::Rotation {
                    axis: axis.extend(n)?,
                    angle: *angle,
                    sign: *sign,
                },
                g => g.clone(),
            });
        }
        out.param_count = self.param_count;
        Ok(out)
    }

    pub fn rotation_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Rotation { .. }))
            .count()
    }

    /// Rotations acting on exactly two qubits.
    pub fn two_qubit_rotation_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Rotation { axis, .. } if axis.weight() == 2))
            .count()
    }

    pub fn clifford_count(&self) -> usize {
        self.gates.len() - self.rotation_count()
    }

    /// Two-qubit rotations plus CNOTs.
    pub fn two_qubit_gate_count(&self) -> usize {
        self.two_qubit_rotation_count()
            + self
                .gates
                .iter()
                .filter(|g| matches!(g, Gate::Clifford(Clifford::Cnot(..))))
                .count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parse and validate the JSON form written by [`Circuit::to_json`].
    pub fn from_json(text: &str) -> Result<Circuit> {
        let raw: Circuit = serde_json::from_str(text)?;
        let mut c = Circuit::new(raw.n, raw.initial_state);
        for g in raw.gates {
            match g {
                Gate::Rotation { axis, angle, sign } => {
                    c.append_rotation_signed(axis, angle, sign)?;
                }
                Gate::Clifford(g) => {
                    c.append_clifford(g)?;
                }
            }
        }
        if raw.param_count < c.param_count {
            return Err(Error::Parse("param_count smaller than highest free index".into()));
        }
        c.param_count = raw.param_count;
        Ok(c)
    }
}

#[inline]
pub(crate) fn resolve(angle: ParamRef, theta: &[f64]) -> f64 {
    match angle {
        ParamRef::Bound(v) => v,
        ParamRef::Free(i) => theta[i],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn zz(n: usize, a: usize, b: usize) -> PauliString {
        PauliString::from_sites(n, &[(a, Pauli::Z), (b, Pauli::Z)]).unwrap()
    }

    #[test]
    fn append_tracks_param_count() {
        let mut c = Circuit::new(2, InitialState::AllZero);
        c.append_rotation(zz(2, 0, 1), ParamRef::Free(0)).unwrap();
        assert_eq!((c.len(), c.param_count()), (1, 1));
        c.append_rotation("XI".parse().unwrap(), ParamRef::Bound(0.0)).unwrap();
        assert_eq!(c.param_count(), 1);
        assert!(c.append_rotation(zz(2, 0, 1), ParamRef::Free(3)).is_err());
        assert!(c
            .append_rotation(PauliString::identity(2), ParamRef::Free(0))
            .is_err());
        assert!(c.append_rotation("X".parse().unwrap(), ParamRef::Free(0)).is_err());
        assert!(c.append_clifford(Clifford::Cnot(1, 1)).is_err());
        assert!(c.append_clifford(Clifford::H(2)).is_err());
    }

    #[test]
    fn zz_layer_shares_one_parameter() {
        let n = 4;
        let mut c = Circuit::new(n, InitialState::AllPlus);
        for j in 0..n {
            c.append_rotation(zz(n, j, (j + 1) % n), ParamRef::Free(0)).unwrap();
        }
        assert_eq!((c.rotation_count(), c.param_count()), (4, 1));
    }

    #[test]
    fn compose_orders_and_shifts() {
        let mut a = Circuit::new(2, InitialState::AllPlus);
        a.append_rotation("XI".parse().unwrap(), ParamRef::Free(0)).unwrap();
        let mut b = Circuit::new(2, InitialState::AllZero);
        b.append_clifford(Clifford::H(0)).unwrap();
        b.append_rotation("ZZ".parse().unwrap(), ParamRef::Free(0)).unwrap();
        let c = Circuit::compose(&a, &b).unwrap();
        assert_eq!(c.param_count(), 2);
        assert_eq!(c.initial_state(), InitialState::AllZero);
        assert_eq!(c.gates()[0], Gate::Clifford(Clifford::H(0)));
        assert!(matches!(c.gates()[2], Gate::Rotation { angle: ParamRef::Free(1), .. }));

        let empty = Circuit::new(2, InitialState::AllZero);
        assert_eq!(Circuit::compose(&empty, &b).unwrap(), b);
        assert!(Circuit::compose(&a, &Circuit::new(3, InitialState::AllZero)).is_err());
    }

    #[test]
    fn compose_is_associative() {
        let mk = |s: &str, k: usize| {
            let mut c = Circuit::new(3, InitialState::AllZero);
            for i in 0..k {
                c.append_rotation(s.parse().unwrap(), ParamRef::Free(i)).unwrap();
            }
            c
        };
        let (a, b, c) = (mk("XYI", 1), mk("ZIZ", 2), mk("IYY", 3));
        let left = Circuit::compose(&Circuit::compose(&a, &b).unwrap(), &c).unwrap();
        let right = Circuit::compose(&a, &Circuit::compose(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn bind_replaces_free_refs() {
        let mut c = Circuit::new(2, InitialState::AllZero);
        c.append_rotation("ZZ".parse().unwrap(), ParamRef::Free(0)).unwrap();
        c.append_rotation("XI".parse().unwrap(), ParamRef::Free(1)).unwrap();
        let b = c.bind(&[0.3, -0.2]).unwrap();
        assert_eq!(b.param_count(), 0);
        assert!(matches!(b.gates()[1], Gate::Rotation { angle: ParamRef::Bound(v), .. } if v == -0.2));
        assert_eq!(b.bind(&[]).unwrap(), b);
        assert!(c.bind(&[0.1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(3, InitialState::AllPlus);
        c.append_rotation("XYZ".parse().unwrap(), ParamRef::Free(0)).unwrap();
        c.append_rotation_signed("IZZ".parse().unwrap(), ParamRef::Bound(0.5), -1).unwrap();
        c.append_clifford(Clifford::Cnot(2, 0)).unwrap();
        let back = Circuit::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
