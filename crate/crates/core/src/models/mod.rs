//! Lattices, model Hamiltonians, proxy Hamiltonians and variational ansätze.

mod lattice;

pub use lattice::{Bond, BondKind, Lattice, LatticeKind};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, InitialState, ParamRef};
use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::pauli::{Pauli, PauliString};
use crate::topo::flux_free_circuit;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ising1d,
    Ising2d,
    Kitaev,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub gx: f64,
    pub gz: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub operator: SparseOperator,
    pub kind: ModelKind,
    pub couplings: Couplings,
}

/// A model family together with its size and couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum Model {
    Tfim1d { n: usize, gx: f64, gz: f64 },
    IsingSquare { nx: usize, ny: usize, gx: f64 },
    IsingHeavyHex { gx: f64 },
    Kitaev { nx: usize, ny: usize, jx: f64, jy: f64, jz: f64 },
}

fn pair(n: usize, a: usize, b: usize, p: Pauli) -> Result<PauliString> {
    PauliString::from_sites(n, &[(a, p), (b, p)])
}

fn add_if(op: &mut SparseOperator, p: PauliString, a: f64) -> Result<()> {
    if a != 0.0 {
        op.add_term(p, a)?;
    }
    Ok(())
}

fn check_finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("couplings {vals:?}")))
    }
}

/// `-Σ Z_j Z_{j+1} - g_x Σ X_j - g_z Σ Z_j` on a periodic chain.
pub fn ising1d_hamiltonian(n: usize, gx: f64, gz: f64) -> Result<Hamiltonian> {
    check_finite(&[gx, gz])?;
    let lat = Lattice::chain(n)?;
    let mut op = SparseOperator::new(n);
    for b in lat.bonds() {
        op.add_term(pair(n, b.a, b.b, Pauli::Z)?, -1.0)?;
    }
    for j in 0..n {
        add_if(&mut op, PauliString::single(n, j, Pauli::X)?, -gx)?;
        add_if(&mut op, PauliString::single(n, j, Pauli::Z)?, -gz)?;
    }
    Ok(Hamiltonian {
        operator: op,
        kind: ModelKind::Ising1d,
        couplings: Couplings {
            gx,
            gz,
            ..Default::default()
        },
    })
}

/// `-Σ_⟨ij⟩ Z_i Z_j - g_x Σ X_j` on a square or heavy-hex lattice.
pub fn ising2d_hamiltonian(lat: &Lattice, gx: f64) -> Result<Hamiltonian> {
    check_finite(&[gx])?;
    if !matches!(lat.kind(), LatticeKind::Square | LatticeKind::HeavyHex) {
        return Err(Error::Parameter(format!(
            "2D Ising model needs a square or heavy-hex lattice, got {:?}",
            lat.kind()
        )));
    }
    let n = lat.n();
    let mut op = SparseOperator::new(n);
    for b in lat.bonds() {
        op.add_term(pair(n, b.a, b.b, Pauli::Z)?, -1.0)?;
    }
    for j in 0..n {
        add_if(&mut op, PauliString::single(n, j, Pauli::X)?, -gx)?;
    }
    Ok(Hamiltonian {
        operator: op,
        kind: ModelKind::Ising2d,
        couplings: Couplings {
            gx,
            ..Default::default()
        },
    })
}

/// `-J_x Σ_{E_X} XX - J_y Σ_{E_Y} YY - J_z Σ_{E_Z} ZZ`.
pub fn kitaev_hamiltonian(nx: usize, ny: usize, jx: f64, jy: f64, jz: f64) -> Result<Hamiltonian> {
    check_finite(&[jx, jy, jz])?;
    let lat = Lattice::honeycomb(nx, ny)?;
    let n = lat.n();
    let mut op = SparseOperator::new(n);
    for b in lat.bonds() {
        let j = match b.kind {
            BondKind::X => jx,
            BondKind::Y => jy,
            _ => jz,
        };
        add_if(&mut op, pair(n, b.a, b.b, b.kind.pauli())?, -j)?;
    }
    Ok(Hamiltonian {
        operator: op,
        kind: ModelKind::Kitaev,
        couplings: Couplings {
            jx,
            jy,
            jz,
            ..Default::default()
        },
    })
}

/// Local Pauli words on the six sites of plaquette `p`.
///
/// Plaquette `p = r·(nx/2) + k` spans rows `r, r+1` and columns
/// `c0, c0+1, c0+2` with `c0 = 2k + (r mod 2)`; each site carries the letter
/// of its one bond that leaves the plaquette.
pub fn plaquette_operator(nx: usize, ny: usize, p: usize) -> Result<PauliString> {
    let lat = Lattice::honeycomb(nx, ny)?;
    if nx < 4 || ny < 4 {
        return Err(Error::Parameter(format!("plaquettes need at least 4×4, got {nx}×{ny}")));
    }
    if p >= nx * ny / 2 {
        return Err(Error::Parameter(format!("plaquette index {p} out of range")));
    }
    let (r, k) = (p / (nx / 2), p % (nx / 2));
    let c0 = 2 * k + r % 2;
    let site = |rr: usize, cc: usize| (rr % ny) * nx + (cc % nx);
    let sites: Vec<usize> = [0, 1, 2]
        .iter()
        .flat_map(|&dc| [site(r, c0 + dc), site(r + 1, c0 + dc)])
        .collect();
    let mut word = PauliString::identity(lat.n());
    for &s in &sites {
        let external: Vec<&Bond> = lat
            .bonds()
            .iter()
            .filter(|b| (b.a == s && !sites.contains(&b.b)) || (b.b == s && !sites.contains(&b.a)))
            .collect();
        if external.len() != 1 {
            return Err(Error::Parameter(format!("site {s} has {} external bonds", external.len())));
        }
        word.set(s, external[0].kind.pauli());
    }
    Ok(word)
}

/// All plaquette operators in index order.
pub fn plaquettes(nx: usize, ny: usize) -> Result<Vec<PauliString>> {
    (0..nx * ny / 2).map(|p| plaquette_operator(nx, ny, p)).collect()
}

/// Hamiltonian variational ansatz for Ising lattices.
///
/// Start state `|+…+⟩`. Repetition `k` applies a ZZ rotation on every bond
/// (`γ_k` = θ[3k]), then X on every site (`β_k` = θ[3k+1]), then Z on every
/// site (`α_k` = θ[3k+2]).
pub fn ising_ansatz(lat: &Lattice, reps: usize) -> Result<Circuit> {
    if reps < 1 {
        return Err(Error::Parameter("ansatz needs at least one repetition".into()));
    }
    if lat.kind() == LatticeKind::Honeycomb {
        return Err(Error::Parameter("use the Kitaev ansatz on honeycomb lattices".into()));
    }
    let n = lat.n();
    let mut c = Circuit::new(n, InitialState::AllPlus);
    for k in 0..reps {
        for b in lat.bonds() {
            c.append_rotation(pair(n, b.a, b.b, Pauli::Z)?, ParamRef::Free(3 * k))?;
        }
        for j in 0..n {
            c.append_rotation(PauliString::single(n, j, Pauli::X)?, ParamRef::Free(3 * k + 1))?;
        }
        for j in 0..n {
            c.append_rotation(PauliString::single(n, j, Pauli::Z)?, ParamRef::Free(3 * k + 2))?;
        }
    }
    Ok(c)
}

/// Kitaev ansatz on the flux-free state.
///
/// Repetition `k` applies XX rotations on x bonds (`γ_k` = θ[3k]), YY on
/// y bonds (`β_k` = θ[3k+1]), then ZZ on z bonds (`α_k` = θ[3k+2]).
pub fn kitaev_ansatz(nx: usize, ny: usize, reps: usize) -> Result<Circuit> {
    if reps < 1 {
        return Err(Error::Parameter("ansatz needs at least one repetition".into()));
    }
    let lat = Lattice::honeycomb(nx, ny)?;
    let n = lat.n();
    let mut layers = Circuit::new(n, InitialState::AllZero);
    for k in 0..reps {
        for (i, kind) in [BondKind::X, BondKind::Y, BondKind::Z].into_iter().enumerate() {
            for b in lat.bonds_of(kind) {
                layers.append_rotation(pair(n, b.a, b.b, kind.pauli())?, ParamRef::Free(3 * k + i))?;
            }
        }
    }
    Circuit::compose(&layers, &flux_free_circuit(nx, ny)?)
}

impl Model {
    pub fn n(&self) -> usize {
        match *self {
            Model::Tfim1d { n, .. } => n,
            Model::IsingSquare { nx, ny, .. } | Model::Kitaev { nx, ny, .. } => nx * ny,
            Model::IsingHeavyHex { .. } => 127,
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match *self {
            Model::Tfim1d { n, .. } => Lattice::chain(n),
            Model::IsingSquare { nx, ny, .. } => Lattice::square(nx, ny),
            Model::IsingHeavyHex { .. } => Ok(Lattice::heavy_hex()),
            Model::Kitaev { nx, ny, .. } => Lattice::honeycomb(nx, ny),
        }
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        match *self {
            Model::Tfim1d { n, gx, gz } => ising1d_hamiltonian(n, gx, gz),
            Model::IsingSquare { gx, .. } | Model::IsingHeavyHex { gx } => {
                ising2d_hamiltonian(&self.lattice()?, gx)
            }
            Model::Kitaev { nx, ny, jx, jy, jz } => kitaev_hamiltonian(nx, ny, jx, jy, jz),
        }
    }

    pub fn ansatz(&self, reps: usize) -> Result<Circuit> {
        match *self {
            Model::Kitaev { nx, ny, .. } => kitaev_ansatz(nx, ny, reps),
            _ => ising_ansatz(&self.lattice()?, reps),
        }
    }

    /// Value of the coupling named `key`.
    pub fn coupling(&self, key: &str) -> Option<f64> {
        match (self, key) {
            (Model::Tfim1d { gx, .. }, "gx")
            | (Model::IsingSquare { gx, .. }, "gx")
            | (Model::IsingHeavyHex { gx }, "gx") => Some(*gx),
            (Model::Tfim1d { gz, .. }, "gz") => Some(*gz),
            (Model::Kitaev { jx, .. }, "jx") => Some(*jx),
            (Model::Kitaev { jy, .. }, "jy") => Some(*jy),
            (Model::Kitaev { jz, .. }, "jz") => Some(*jz),
            _ => None,
        }
    }

    /// Copy with the coupling `key` replaced. For Kitaev models `"j"` sets
    /// `jx` and `jy` together.
    pub fn with_coupling(&self, key: &str, v: f64) -> Result<Model> {
        let mut m = self.clone();
        let slot: Vec<&mut f64> = match (&mut m, key) {
            (Model::Tfim1d { gx, .. }, "gx")
            | (Model::IsingSquare { gx, .. }, "gx")
            | (Model::IsingHeavyHex { gx }, "gx") => vec![gx],
            (Model::Tfim1d { gz, .. }, "gz") => vec![gz],
            (Model::Kitaev { jx, jy, .. }, "j") => vec![jx, jy],
            (Model::Kitaev { jx, .. }, "jx") => vec![jx],
            (Model::Kitaev { jy, .. }, "jy") => vec![jy],
            (Model::Kitaev { jz, .. }, "jz") => vec![jz],
            _ => {
                return Err(Error::Config(format!("model has no coupling `{key}`")));
            }
        };
        for s in slot {
            *s = v;
        }
        Ok(m)
    }
}

/// Few-term surrogate whose expectation equals the full energy on
/// translation-invariant states.
///
/// Square Ising: `-N(Z_0 Z_1 + Z_0 Z_nx + g_x X_1)`. Kitaev:
/// `(nx·ny/2)(-J_x X_0 X_1 - J_y Y_nx Y_{nx+1} - J_z Z_2 Z_{nx+2})`.
/// Periodic chain: `-N(Z_0 Z_1 + g_x X_0 + g_z Z_0)`.
pub fn proxy_hamiltonian(model: &Model) -> Result<Hamiltonian> {
    let full = model.hamiltonian()?;
    let n = model.n();
    let mut op = SparseOperator::new(n);
    let nf = n as f64;
    match *model {
        Model::Tfim1d { gx, gz, .. } => {
            op.add_term(pair(n, 0, 1, Pauli::Z)?, -nf)?;
            add_if(&mut op, PauliString::single(n, 0, Pauli::X)?, -nf * gx)?;
            add_if(&mut op, PauliString::single(n, 0, Pauli::Z)?, -nf * gz)?;
        }
        Model::IsingSquare { nx, gx, .. } => {
            op.add_term(pair(n, 0, 1, Pauli::Z)?, -nf)?;
            op.add_term(pair(n, 0, nx, Pauli::Z)?, -nf)?;
            add_if(&mut op, PauliString::single(n, 1, Pauli::X)?, -nf * gx)?;
        }
        Model::IsingHeavyHex { .. } => {
            return Err(Error::Parameter(
                "heavy-hex lattice is not translation invariant; no proxy Hamiltonian".into(),
            ));
        }
        Model::Kitaev { nx, ny, jx, jy, jz } => {
            let h = (nx * ny / 2) as f64;
            add_if(&mut op, pair(n, 0, 1, Pauli::X)?, -h * jx)?;
            add_if(&mut op, pair(n, nx, nx + 1, Pauli::Y)?, -h * jy)?;
            add_if(&mut op, pair(n, 2, nx + 2, Pauli::Z)?, -h * jz)?;
        }
    }
    Ok(Hamiltonian {
        operator: op,
        kind: full.kind,
        couplings: full.couplings,
    })
}
