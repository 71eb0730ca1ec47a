//! OpenQASM 2.0 export, and import of the gate subset the exporter writes.
//!
//! `exp(-i·s·θ/2·P)` is written as a basis change on each support qubit
//! (`h` for X, `sdg; h` for Y), a CNOT ladder down the sorted support, `rz(s·θ)`
//! on the last qubit, and the mirror image. `rz` differs from the rotation
//! only by a global phase.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Clifford, Gate, InitialState, ParamRef};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

fn header(out: &mut String, n: usize) {
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{n}];");
}

fn clifford_line(out: &mut String, g: &Clifford) {
    let _ = match *g {
        Clifford::H(q) => writeln!(out, "h q[{q}];"),
        Clifford::S(q) => writeln!(out, "s q[{q}];"),
        Clifford::Sdg(q) => writeln!(out, "sdg q[{q}];"),
        Clifford::Cnot(c, t) => writeln!(out, "cx q[{c}],q[{t}];"),
    };
}

fn rotation_lines(out: &mut String, axis: &PauliString, angle: f64) {
    let support = axis.support();
    for &q in &support {
        match axis.letter(q) {
            Pauli::X => clifford_line(out, &Clifford::H(q)),
            Pauli::Y => {
                clifford_line(out, &Clifford::Sdg(q));
                clifford_line(out, &Clifford::H(q));
            }
            _ => {}
        }
    }
    for w in support.windows(2) {
        clifford_line(out, &Clifford::Cnot(w[0], w[1]));
    }
    let last = *support.last().expect("rotation axis is non-identity");
    let _ = writeln!(out, "rz({angle:?}) q[{last}];");
    for w in support.windows(2).rev() {
        clifford_line(out, &Clifford::Cnot(w[0], w[1]));
    }
    for &q in &support {
        match axis.letter(q) {
            Pauli::X => clifford_line(out, &Clifford::H(q)),
            Pauli::Y => {
                clifford_line(out, &Clifford::H(q));
                clifford_line(out, &Clifford::S(q));
            }
            _ => {}
        }
    }
}

fn body(out: &mut String, c: &Circuit, theta: &[f64]) -> Result<()> {
    let bound = c.bind(theta)?;
    if bound.initial_state() == InitialState::AllPlus {
        for q in 0..c.n() {
            clifford_line(out, &Clifford::H(q));
        }
    }
    for g in bound.gates() {
        match g {
            Gate::Clifford(g) => clifford_line(out, g),
            Gate::Rotation { axis, angle, sign } => {
                let ParamRef::Bound(v) = angle else {
                    unreachable!("bind leaves no free parameters")
                };
                rotation_lines(out, axis, f64::from(*sign) * v);
            }
        }
    }
    Ok(())
}

/// OpenQASM 2.0 text for `c` at parameters `theta`.
pub fn to_qasm(c: &Circuit, theta: &[f64]) -> Result<String> {
    let mut out = String::new();
    header(&mut out, c.n());
    body(&mut out, c, theta)?;
    Ok(out)
}

/// As [`to_qasm`], followed by Z-basis measurement of `measured` into a
/// classical register `c`.
pub fn to_qasm_measured(c: &Circuit, theta: &[f64], measured: &[usize]) -> Result<String> {
    if let Some(&q) = measured.iter().find(|&&q| q >= c.n()) {
        return Err(Error::Parameter(format!("measured qubit {q} out of range")));
    }
    let mut out = String::new();
    header(&mut out, c.n());
    let _ = writeln!(out, "creg c[{}];", measured.len());
    body(&mut out, c, theta)?;
    for (k, q) in measured.iter().enumerate() {
        let _ = writeln!(out, "measure q[{q}] -> c[{k}];");
    }
    Ok(out)
}

fn parse_qubit(tok: &str, n: usize, line: usize) -> Result<usize> {
    let bad = || Error::Parse(format!("line {line}: bad qubit reference `{tok}`"));
    let inner = tok
        .trim()
        .strip_prefix("q[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(bad)?;
    let q: usize = inner.parse().map_err(|_| bad())?;
    if n > 0 && q >= n {
        return Err(Error::Parse(format!("line {line}: qubit {q} outside register of {n}")));
    }
    Ok(q)
}

/// Parse the subset written by [`to_qasm`]: `h`, `s`, `sdg`, `cx`, `rz`.
/// Headers, registers, `barrier`, `measure` and `//` comments are skipped.
/// An `rz(φ)` becomes a Z rotation with bound angle φ.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut n = None;
    let mut c: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split("//").next().unwrap_or("").trim();
        for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (op, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
            let op_name = op.split('(').next().unwrap_or(op);
            match op_name {
                "OPENQASM" | "include" | "creg" | "measure" | "barrier" => continue,
                "qreg" => {
                    let k = rest
                        .trim()
                        .strip_prefix("q[")
                        .and_then(|s| s.strip_suffix(']'))
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("line {lineno}: bad qreg `{rest}`")))?;
                    if n.is_some() {
                        return Err(Error::Parse(format!("line {lineno}: second qreg")));
                    }
                    n = Some(k);
                    c = Some(Circuit::new(k, InitialState::AllZero));
                    continue;
                }
                _ => {}
            }
            let circ = c
                .as_mut()
                .ok_or_else(|| Error::Parse(format!("line {lineno}: gate before qreg")))?;
            let nq = circ.n();
            let args: Vec<&str> = rest.split(',').collect();
            let one = |args: &[&str]| -> Result<usize> {
                if args.len() != 1 {
                    return Err(Error::Parse(format!("line {lineno}: `{op}` takes one qubit")));
                }
                parse_qubit(args[0], nq, lineno)
            };
            match op_name {
                "h" => {
                    circ.append_clifford(Clifford::H(one(&args)?))?;
                }
                "s" => {
                    circ.append_clifford(Clifford::S(one(&args)?))?;
                }
                "sdg" => {
                    circ.append_clifford(Clifford::Sdg(one(&args)?))?;
                }
                "cx" => {
                    if args.len() != 2 {
                        return Err(Error::Parse(format!("line {lineno}: cx takes two qubits")));
                    }
                    let a = parse_qubit(args[0], nq, lineno)?;
                    let b = parse_qubit(args[1], nq, lineno)?;
                    circ.append_clifford(Clifford::Cnot(a, b))?;
                }
                "rz" => {
                    let angle = op
                        .strip_prefix("rz(")
                        .and_then(|s| s.strip_suffix(')'))
                        .and_then(|s| s.trim().parse::<f64>().ok())
                        .ok_or_else(|| Error::Parse(format!("line {lineno}: bad rz angle in `{op}`")))?;
                    let q = one(&args)?;
                    circ.append_rotation(PauliString::single(nq, q, Pauli::Z)?, ParamRef::Bound(angle))?;
                }
                _ => {
                    return Err(Error::Parse(format!("line {lineno}: unsupported statement `{stmt}`")));
                }
            }
        }
    }
    c.ok_or_else(|| Error::Parse("no qreg declaration".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::SparseOperator;
    use crate::oracle::statevector_evolve;
    use crate::pauli::tests::arb_pauli;
    use proptest::prelude::*;

    fn gate_lines(q: &str) -> Vec<&str> {
        q.lines()
            .filter(|l| !l.starts_with("OPENQASM") && !l.starts_with("include") && !l.starts_with("qreg"))
            .collect()
    }

    #[test]
    fn single_rz() {
        let mut c = Circuit::new(1, InitialState::AllZero);
        c.append_rotation("Z".parse().unwrap(), ParamRef::Bound(0.25)).unwrap();
        assert_eq!(gate_lines(&to_qasm(&c, &[]).unwrap()), ["rz(0.25) q[0];"]);
    }

    #[test]
    fn zz_decomposition() {
        let mut c = Circuit::new(2, InitialState::AllZero);
        c.append_rotation("ZZ".parse().unwrap(), ParamRef::Free(0)).unwrap();
        let q = to_qasm(&c, &[0.5]).unwrap();
        assert_eq!(gate_lines(&q), ["cx q[0],q[1];", "rz(0.5) q[1];", "cx q[0],q[1];"]);
        assert!(to_qasm(&c, &[]).is_err());
    }

    #[test]
    fn plus_state_and_measurement() {
        let mut c = Circuit::new(3, InitialState::AllPlus);
        c.append_rotation_signed("XIY".parse().unwrap(), ParamRef::Bound(1.0), -1).unwrap();
        let q = to_qasm_measured(&c, &[], &[2]).unwrap();
        let lines = gate_lines(&q);
        assert_eq!(&lines[1..4], ["h q[0];", "h q[1];", "h q[2];"]);
        assert!(q.contains("rz(-1.0) q[2];"));
        assert!(q.ends_with("measure q[2] -> c[0];\n"));
        assert!(parse_qasm(&q).is_ok());
    }

    #[test]
    fn parser_rejects_unknown_and_malformed() {
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1];").is_err());
        assert!(parse_qasm("h q[0];").is_err());
        assert!(parse_qasm("qreg q[2];\nh q[5];").is_err());
        assert!(parse_qasm("qreg q[2];\nrz(abc) q[0];").is_err());
        let c = parse_qasm("qreg q[2]; // two\nh q[0]; cx q[0],q[1];\nbarrier q[0],q[1];").unwrap();
        assert_eq!(c.len(), 2);
    }

    fn random_circuit(n: usize, axes: Vec<(PauliString, f64)>, plus: bool) -> Circuit {
        let init = if plus { InitialState::AllPlus } else { InitialState::AllZero };
        let mut c = Circuit::new(n, init);
        for (k, (p, a)) in axes.into_iter().enumerate() {
            if p.is_identity() {
                continue;
            }
            c.append_rotation_signed(p, ParamRef::Bound(a), if k % 3 == 0 { -1 } else { 1 })
                .unwrap();
            c.append_clifford(match k % 4 {
                0 => Clifford::H(k % n),
                1 => Clifford::S(k % n),
                2 => Clifford::Sdg((k + 1) % n),
                _ => Clifford::Cnot(k % n, (k + 1) % n),
            })
            .unwrap();
        }
        c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn prop_round_trip_matches_oracle(
            axes in proptest::collection::vec((arb_pauli(5), -3.0f64..3.0), 1..10),
            obs in proptest::collection::vec((arb_pauli(5), -1.0f64..1.0), 1..6),
            plus in any::<bool>(),
        ) {
            let c = random_circuit(5, axes, plus);
            let back = parse_qasm(&to_qasm(&c, &[]).unwrap()).unwrap();
            let o = SparseOperator::from_terms(5, obs).unwrap();
            let a = statevector_evolve(&c, &[]).unwrap().expectation(&o).unwrap();
            let b = statevector_evolve(&back, &[]).unwrap().expectation(&o).unwrap();
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }
}
