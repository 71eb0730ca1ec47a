//! Flux-free state preparation and anyon braiding on the honeycomb torus.
//!
//! Every z bond whose two sites satisfy `Z_i Z_j = +1` is treated as one
//! effective qubit, `|0̄⟩ = |00⟩` and `|1̄⟩ = |11⟩`. The z bond starting at
//! `(r, c)` with `c ≡ r (mod 2)` becomes effective qubit `r·(nx/2) + c/2`,
//! so the effective qubits sit on a rotated square lattice. Plaquettes are
//! centered at `(r, c')` with `c' ≢ r (mod 2)`; their corners are the
//! effective qubits left, right, above and below the center.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Clifford, InitialState, ParamRef};
use crate::engine::Engine;
use crate::error::{check_dim, Error, Result};
use crate::operator::SparseOperator;
use crate::oracle::statevector_evolve;
use crate::pauli::{Pauli, PauliString};

/// Map between z bonds and effective qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveLayout {
    nx: usize,
    ny: usize,
    /// `(upper site, lower site)` per effective qubit.
    pairs: Vec<(usize, usize)>,
}

/// Corner positions of one effective plaquette.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Corners {
    pub left: usize,
    pub right: usize,
    pub up: usize,
    pub down: usize,
}

/// Gates on effective qubits, lowered to physical gates by [`effective_gate`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EffectiveGate {
    H(usize),
    S(usize),
    Sdg(usize),
    Cnot(usize, usize),
}

impl EffectiveLayout {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::Parameter(format!(
                "effective layout needs even dimensions of at least 4, got {nx}×{ny}"
            )));
        }
        let mut pairs = Vec::with_capacity(nx * ny / 2);
        for r in 0..ny {
            for c in (r % 2..nx).step_by(2) {
                pairs.push((r * nx + c, ((r + 1) % ny) * nx + c));
            }
        }
        Ok(Self { nx, ny, pairs })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_physical(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_effective(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, e: usize) -> (usize, usize) {
        self.pairs[e]
    }

    /// Effective qubit of the z bond starting at `(r, c)`, coordinates taken
    /// modulo the torus.
    pub fn at(&self, r: isize, c: isize) -> usize {
        let r = r.rem_euclid(self.ny as isize) as usize;
        let c = c.rem_euclid(self.nx as isize) as usize;
        debug_assert_eq!(c % 2, r % 2, "({r}, {c}) is not a z-bond origin");
        r * (self.nx / 2) + c / 2
    }

    pub fn row(&self, e: usize) -> usize {
        e / (self.nx / 2)
    }

    /// Plaquette `p = r·(nx/2) + k`, centered at `(r, 2k + 1 + r mod 2)`.
    pub fn corners(&self, p: usize) -> Corners {
        let (r, k) = ((p / (self.nx / 2)) as isize, (p % (self.nx / 2)) as isize);
        let c = 2 * k + 1 + r % 2;
        Corners {
            left: self.at(r, c - 1),
            right: self.at(r, c + 1),
            up: self.at(r - 1, c),
            down: self.at(r + 1, c),
        }
    }

    pub fn n_plaquettes(&self) -> usize {
        self.pairs.len()
    }

    /// Plaquettes centered on even rows carry the X-type toric stabilizer.
    pub fn is_x_type(&self, p: usize) -> bool {
        (p / (self.nx / 2)) % 2 == 0
    }

    /// `Ȳ Ȳ Z̄ Z̄` on the left, right, up and down corners: the flux operator
    /// expressed on effective qubits.
    pub fn flux_word(&self, p: usize) -> PauliString {
        let k = self.corners(p);
        let mut w = PauliString::identity(self.n_effective());
        w.set(k.left, Pauli::Y);
        w.set(k.right, Pauli::Y);
        w.set(k.up, Pauli::Z);
        w.set(k.down, Pauli::Z);
        w
    }

    /// Toric stabilizer `X̄X̄X̄X̄` or `Z̄Z̄Z̄Z̄` on the corners of `p`.
    pub fn toric_word(&self, p: usize) -> PauliString {
        let k = self.corners(p);
        let letter = if self.is_x_type(p) { Pauli::X } else { Pauli::Z };
        let mut w = PauliString::identity(self.n_effective());
        for q in [k.left, k.right, k.up, k.down] {
            w.set(q, letter);
        }
        w
    }
}

/// Toric-code preparation on effective qubits, starting from `|0̄…0̄⟩`.
///
/// The X-type rows before the last are handled plaquette by plaquette with
/// the bottom corner as control: Hadamard, then CNOTs to the left, upper and
/// right corners. On the last X-type row every plaquette except the final
/// one uses its right corner as control, targeting the upper, left and lower
/// corners.
pub fn toric_prep_effective(layout: &EffectiveLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.n_effective(), InitialState::AllZero);
    let per_row = layout.nx / 2;
    let last_row = layout.ny - 2;
    for r in (0..last_row).step_by(2) {
        for k in 0..per_row {
            let q = layout.corners(r * per_row + k);
            c.append_clifford(Clifford::H(q.down))?;
            for t in [q.left, q.up, q.right] {
                c.append_clifford(Clifford::Cnot(q.down, t))?;
            }
        }
    }
    for k in 0..per_row - 1 {
        let q = layout.corners(last_row * per_row + k);
        c.append_clifford(Clifford::H(q.right))?;
        for t in [q.up, q.left, q.down] {
            c.append_clifford(Clifford::Cnot(q.right, t))?;
        }
    }
    Ok(c)
}

/// Effective-qubit basis change `U_b`: `S†` on every qubit, then `H` on the
/// odd-row qubits. Conjugation `U_b W̄ U_b†` turns each flux word into the
/// toric stabilizer of the same plaquette.
pub fn basis_change_effective(layout: &EffectiveLayout) -> Result<Circuit> {
    let n = layout.n_effective();
    let mut c = Circuit::new(n, InitialState::AllZero);
    c.extend_cliffords((0..n).map(Clifford::Sdg))?;
    c.extend_cliffords((0..n).filter(|&e| layout.row(e) % 2 == 1).map(Clifford::H))?;
    Ok(c)
}

/// Physical gates implementing one effective gate inside the code space.
///
/// `H̄ = CNOT₁₂ H₁ CNOT₁₂`, `S̄ = S₁`, and for a control pair (1,2) and a target
/// pair (3,4), `CNOT̄ = CNOT₃₄ CNOT₂₃ CNOT₃₄`.
pub fn effective_gate(layout: &EffectiveLayout, g: EffectiveGate) -> Result<Vec<Clifford>> {
    let n = layout.n_effective();
    let check = |e: usize| {
        if e < n {
            Ok(layout.pair(e))
        } else {
            Err(Error::Parameter(format!("effective qubit {e} out of range")))
        }
    };
    Ok(match g {
        EffectiveGate::H(e) => {
            let (a, b) = check(e)?;
            vec![Clifford::Cnot(a, b), Clifford::H(a), Clifford::Cnot(a, b)]
        }
        EffectiveGate::S(e) => vec![Clifford::S(check(e)?.0)],
        EffectiveGate::Sdg(e) => vec![Clifford::Sdg(check(e)?.0)],
        EffectiveGate::Cnot(c, t) => {
            if c == t {
                return Err(Error::Parameter("effective CNOT pairs overlap".into()));
            }
            let (_, q2) = check(c)?;
            let (q3, q4) = check(t)?;
            vec![Clifford::Cnot(q3, q4), Clifford::Cnot(q2, q3), Clifford::Cnot(q3, q4)]
        }
    })
}

/// Lower an effective Clifford circuit to the physical register.
pub fn lift(layout: &EffectiveLayout, eff: &Circuit) -> Result<Circuit> {
    check_dim(layout.n_effective(), eff.n())?;
    let mut out = Circuit::new(layout.n_physical(), InitialState::AllZero);
    for g in eff.gates() {
        let e = match g {
            crate::circuit::Gate::Clifford(Clifford::H(q)) => EffectiveGate::H(*q),
            crate::circuit::Gate::Clifford(Clifford::S(q)) => EffectiveGate::S(*q),
            crate::circuit::Gate::Clifford(Clifford::Sdg(q)) => EffectiveGate::Sdg(*q),
            crate::circuit::Gate::Clifford(Clifford::Cnot(c, t)) => EffectiveGate::Cnot(*c, *t),
            crate::circuit::Gate::Rotation { .. } => {
                return Err(Error::Parameter("only Clifford gates can be lifted".into()));
            }
        };
        out.extend_cliffords(effective_gate(layout, e)?)?;
    }
    Ok(out)
}

/// Clifford circuit preparing the flux-free state from `|0…0⟩`:
/// toric preparation followed by the inverse basis change.
pub fn flux_free_circuit(nx: usize, ny: usize) -> Result<Circuit> {
    let layout = EffectiveLayout::new(nx, ny)?;
    let mut eff = toric_prep_effective(&layout)?;
    let ub = basis_change_effective(&layout)?;
    for g in ub.gates().iter().rev() {
        if let crate::circuit::Gate::Clifford(c) = g {
            eff.append_clifford(c.inverse())?;
        }
    }
    lift(&layout, &eff)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BraidKind {
    Em,
    Epsi,
    Mpsi,
}

impl BraidKind {
    pub const ALL: [BraidKind; 3] = [BraidKind::Em, BraidKind::Epsi, BraidKind::Mpsi];

    pub fn name(self) -> &'static str {
        match self {
            BraidKind::Em => "em",
            BraidKind::Epsi => "epsi",
            BraidKind::Mpsi => "mpsi",
        }
    }
}

impl std::str::FromStr for BraidKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "em" => Ok(BraidKind::Em),
            "epsi" => Ok(BraidKind::Epsi),
            "mpsi" => Ok(BraidKind::Mpsi),
            _ => Err(Error::Parse(format!("unknown braid kind `{s}`"))),
        }
    }
}

/// Anyon creation operators and the braid loop, all Pauli words.
#[derive(Clone, Debug, PartialEq)]
pub struct BraidSpec {
    pub kind: BraidKind,
    pub nx: usize,
    pub ny: usize,
    pub creation: Vec<PauliString>,
    /// Loop factors; the braid unitary is their product in list order.
    pub path: Vec<PauliString>,
}

#[derive(Serialize, Deserialize)]
struct BraidSpecJson {
    kind: BraidKind,
    nx: usize,
    ny: usize,
    creation: Vec<String>,
    path: Vec<String>,
}

impl BraidSpec {
    /// Braid unitary as `i^k · Q`.
    pub fn braid_word(&self) -> (u8, PauliString) {
        let n = self.nx * self.ny;
        self.path
            .iter()
            .fold((0, PauliString::identity(n)), |(k, acc), f| {
                let (j, r) = acc.mul_unchecked(f);
                ((k + j) % 4, r)
            })
    }

    /// `±1` with `C† U_b C = sign · U_b`.
    pub fn creation_sign(&self) -> f64 {
        let (_, q) = self.braid_word();
        let flips = self
            .creation
            .iter()
            .filter(|c| c.anticommutes_unchecked(&q))
            .count();
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let j = BraidSpecJson {
            kind: self.kind,
            nx: self.nx,
            ny: self.ny,
            creation: self.creation.iter().map(|p| p.to_sparse_string()).collect(),
            path: self.path.iter().map(|p| p.to_sparse_string()).collect(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: BraidSpecJson = serde_json::from_str(text)?;
        let n = j.nx * j.ny;
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| PauliString::parse_sparse(n, s))
                .collect::<Result<Vec<_>>>()
        };
        Ok(Self {
            kind: j.kind,
            nx: j.nx,
            ny: j.ny,
            creation: parse(&j.creation)?,
            path: parse(&j.path)?,
        })
    }
}

/// Creation operators and braid loops.
///
/// Defined for the 8×6 torus, and for 4×4 where the same coordinates wrap
/// onto the smaller torus as a reduced-size analogue.
pub fn braid_spec(kind: BraidKind, nx: usize, ny: usize) -> Result<BraidSpec> {
    if !matches!((nx, ny), (8, 6) | (4, 4)) {
        return Err(Error::Parameter(format!(
            "braiding geometry is defined for 8×6 and 4×4 lattices, not {nx}×{ny}"
        )));
    }
    let n = nx * ny;
    let word = |letters: &[(usize, usize, Pauli)]| -> Result<PauliString> {
        let sites: Vec<(usize, Pauli)> = letters
            .iter()
            .map(|&(r, c, p)| ((r % ny) * nx + c % nx, p))
            .collect();
        PauliString::from_sites(n, &sites)
    };
    use Pauli::{X, Y, Z};
    let (creation, path) = match kind {
        BraidKind::Em => (
            vec![
                word(&[(1, 2, Z), (1, 4, Z), (1, 5, Y), (2, 5, X)])?,
                word(&[(2, 2, Y), (3, 2, X), (4, 1, Z), (4, 3, Z)])?,
            ],
            vec![word(&[(1, 1, Y), (1, 2, Z), (1, 3, Y), (2, 1, X), (2, 2, Z), (2, 3, X)])?],
        ),
        BraidKind::Epsi => (
            vec![word(&[(2, 4, Z)])?, word(&[(2, 1, Y), (2, 2, Y)])?],
            vec![
                word(&[(2, 2, X), (2, 3, X)])?,
                word(&[(2, 3, Y), (2, 4, Y)])?,
                word(&[(2, 4, Z), (3, 4, Z)])?,
                word(&[(3, 3, X), (3, 4, X)])?,
                word(&[(3, 2, Y), (3, 3, Y)])?,
                word(&[(2, 2, Z), (3, 2, Z)])?,
            ],
        ),
        BraidKind::Mpsi => (
            vec![word(&[(2, 2, Y), (3, 2, X)])?, word(&[(2, 0, X), (2, 1, X)])?],
            vec![
                word(&[(1, 1, X), (1, 2, X)])?,
                word(&[(1, 2, Y), (1, 3, Y)])?,
                word(&[(1, 3, Z), (2, 3, Z)])?,
                word(&[(2, 2, X), (2, 3, X)])?,
                word(&[(2, 1, Y), (2, 2, Y)])?,
                word(&[(1, 1, Z), (2, 1, Z)])?,
            ],
        ),
    };
    Ok(BraidSpec {
        kind,
        nx,
        ny,
        creation,
        path,
    })
}

const I_POW: [C; 4] = [
    C::new(1.0, 0.0),
    C::new(0.0, 1.0),
    C::new(-1.0, 0.0),
    C::new(0.0, -1.0),
];

/// `⟨Φ|U_b|Φ⟩` with `|Φ⟩ = C U(θ)|init⟩`, from the single-string reduction
/// `C† U_b C = sign · i^k · Q`.
pub fn braiding_phase(
    engine: &Engine,
    c: &Circuit,
    theta: &[f64],
    spec: &BraidSpec,
    delta_c: f64,
) -> Result<C> {
    check_dim(c.n(), spec.nx * spec.ny)?;
    let (k, q) = spec.braid_word();
    let obs = SparseOperator::from_terms(c.n(), [(q, 1.0)])?;
    let e = engine.expectation(c, &obs, theta, delta_c)?;
    Ok(I_POW[k as usize] * spec.creation_sign() * e)
}

/// Interferometry circuit on `n + 1` qubits with the ancilla last: state
/// preparation, anyon creation, ancilla Hadamard and the braid loop
/// controlled on the ancilla. Afterwards `⟨X_a⟩` and `⟨Y_a⟩` are the real and
/// imaginary parts of the braiding phase.
pub fn controlled_braid_circuit(c: &Circuit, theta: &[f64], spec: &BraidSpec) -> Result<Circuit> {
    let n = c.n();
    check_dim(n, spec.nx * spec.ny)?;
    let a = n;
    let mut out = c.bind(theta)?.widen(n + 1)?;
    for w in &spec.creation {
        out.append_rotation(w.extend(n + 1)?, ParamRef::Bound(std::f64::consts::PI))?;
    }
    out.append_clifford(Clifford::H(a))?;
    let (k, q) = spec.braid_word();
    for site in q.support() {
        match q.letter(site) {
            Pauli::X => {
                out.append_clifford(Clifford::Cnot(a, site))?;
            }
            Pauli::Z => {
                out.extend_cliffords([Clifford::H(site), Clifford::Cnot(a, site), Clifford::H(site)])?;
            }
            Pauli::Y => {
                out.extend_cliffords([
                    Clifford::Sdg(site),
                    Clifford::Cnot(a, site),
                    Clifford::S(site),
                ])?;
            }
            Pauli::I => unreachable!(),
        }
    }
    match k {
        1 => {
            out.append_clifford(Clifford::S(a))?;
        }
        2 => {
            out.extend_cliffords([Clifford::S(a), Clifford::S(a)])?;
        }
        3 => {
            out.append_clifford(Clifford::Sdg(a))?;
        }
        _ => {}
    }
    Ok(out)
}

/// Braiding phase read off the ancilla of [`controlled_braid_circuit`] by
/// dense simulation.
pub fn ancilla_phase(c: &Circuit, theta: &[f64], spec: &BraidSpec) -> Result<C> {
    let circ = controlled_braid_circuit(c, theta, spec)?;
    let psi = statevector_evolve(&circ, &[])?;
    let n = circ.n();
    let xa = SparseOperator::from_terms(n, [(PauliString::single(n, n - 1, Pauli::X)?, 1.0)])?;
    let ya = SparseOperator::from_terms(n, [(PauliString::single(n, n - 1, Pauli::Y)?, 1.0)])?;
    Ok(C::new(psi.expectation(&xa)?, psi.expectation(&ya)?))
}
