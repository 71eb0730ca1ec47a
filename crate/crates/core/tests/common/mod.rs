#![allow(dead_code)]

use paulipath::{Circuit, Clifford, InitialState, ParamRef, Pauli, PauliString, SparseOperator};
use rand::Rng;

pub fn random_string<R: Rng>(rng: &mut R, n: usize, density: f64) -> PauliString {
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut p = PauliString::identity(n);
    while p.is_identity() {
        for q in 0..n {
            if rng.random_bool(density) {
                p.set(q, letters[rng.random_range(0..3)]);
            }
        }
    }
    p
}

/// Mixed rotation/Clifford circuit with free angles, plus the angles.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, gates: usize, init: InitialState) -> (Circuit, Vec<f64>) {
    let mut c = Circuit::new(n, init);
    let mut theta = Vec::new();
    for _ in 0..gates {
        if rng.random_bool(0.7) {
            let p = random_string(rng, n, 0.35);
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            if theta.is_empty() || rng.random_bool(0.8) {
                theta.push(rng.random_range(-3.2..3.2));
                c.append_rotation_signed(p, ParamRef::Free(theta.len() - 1), sign).unwrap();
            } else {
                let reuse = rng.random_range(0..theta.len());
                c.append_rotation_signed(p, ParamRef::Free(reuse), sign).unwrap();
            }
        } else {
            let q = rng.random_range(0..n);
            let t = (q + rng.random_range(1..n)) % n;
            let g = [Clifford::H(q), Clifford::S(q), Clifford::Sdg(q), Clifford::Cnot(q, t)][rng.random_range(0..4)];
            c.append_clifford(g).unwrap();
        }
    }
    (c, theta)
}

pub fn random_observable<R: Rng>(rng: &mut R, n: usize, terms: usize) -> SparseOperator {
    let mut o = SparseOperator::new(n);
    for _ in 0..terms {
        let p = random_string(rng, n, 0.4);
        o.add_term(p, rng.random_range(-1.0..1.0)).unwrap();
    }
    o
}
