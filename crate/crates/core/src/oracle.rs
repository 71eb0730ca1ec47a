//! Reference results: dense state vectors, Lanczos ground energies and the
//! free-fermion solutions of the 1D transverse-field Ising and Kitaev
//! honeycomb models.
//!
//! Basis index bit `q` holds the state of qubit `q`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{resolve, Circuit, Clifford, Gate, InitialState};
use crate::error::{check_dim, Error, Result};
use crate::models::{BondKind, Lattice};
use crate::operator::SparseOperator;
use crate::pauli::PauliString;

/// Largest register the dense simulator accepts.
pub const MAX_STATEVECTOR_QUBITS: usize = 24;
/// Largest register the Lanczos solver accepts.
pub const MAX_LANCZOS_QUBITS: usize = 20;

const I_POW: [C; 4] = [
    C::new(1.0, 0.0),
    C::new(0.0, 1.0),
    C::new(-1.0, 0.0),
    C::new(0.0, -1.0),
];

/// Masks and Y count of a string on at most 64 qubits.
#[derive(Copy, Clone)]
struct Flat {
    x: usize,
    z: usize,
    phase: C,
}

impl Flat {
    fn new(p: &PauliString) -> Self {
        Self {
            x: p.x_words()[0] as usize,
            z: p.z_words()[0] as usize,
            phase: I_POW[(p.y_count() % 4) as usize],
        }
    }

    /// `P|b⟩ = phase(b) |b ⊕ x⟩`.
    #[inline]
    fn amp(&self, b: usize) -> C {
        if (self.z & b).count_ones() & 1 == 1 {
            -self.phase
        } else {
            self.phase
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

impl StateVector {
    fn check_size(n: usize, cap: usize) -> Result<()> {
        if n > cap {
            Err(Error::Capacity(format!("{n} qubits exceeds the dense limit of {cap}")))
        } else {
            Ok(())
        }
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::check_size(n, MAX_STATEVECTOR_QUBITS)?;
        let mut amps = vec![C::new(0.0, 0.0); 1 << n];
        amps[0] = C::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn plus(n: usize) -> Result<Self> {
        Self::check_size(n, MAX_STATEVECTOR_QUBITS)?;
        let a = (0.5f64).powf(n as f64 / 2.0);
        Ok(Self {
            n,
            amps: vec![C::new(a, 0.0); 1 << n],
        })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C>) -> Result<Self> {
        Self::check_size(n, MAX_STATEVECTOR_QUBITS)?;
        if amps.len() != 1 << n {
            return Err(Error::Parameter(format!(
                "expected {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `P|ψ⟩`.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        check_dim(self.n, p.n())?;
        let f = Flat::new(p);
        let mut out = vec![C::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            out[b ^ f.x] = f.amp(b) * a;
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// `exp(-i θ/2 P)|ψ⟩`.
    pub fn apply_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        let pp = self.apply_pauli(p)?;
        let (s, c) = (theta / 2.0).sin_cos();
        let mi_s = C::new(0.0, -s);
        for (a, b) in self.amps.iter_mut().zip(pp.amps) {
            *a = *a * c + mi_s * b;
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, g: &Clifford) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n) {
            return Err(Error::Parameter(format!("qubit {q} out of range")));
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match *g {
            Clifford::H(q) => {
                let m = 1usize << q;
                for b in 0..self.amps.len() {
                    if b & m == 0 {
                        let (u, v) = (self.amps[b], self.amps[b | m]);
                        self.amps[b] = (u + v) * r;
                        self.amps[b | m] = (u - v) * r;
                    }
                }
            }
            Clifford::S(q) | Clifford::Sdg(q) => {
                let ph = if matches!(g, Clifford::S(_)) {
                    C::new(0.0, 1.0)
                } else {
                    C::new(0.0, -1.0)
                };
                let m = 1usize << q;
                for (b, a) in self.amps.iter_mut().enumerate() {
                    if b & m != 0 {
                        *a *= ph;
                    }
                }
            }
            Clifford::Cnot(c, t) => {
                let (mc, mt) = (1usize << c, 1usize << t);
                for b in 0..self.amps.len() {
                    if b & mc != 0 && b & mt == 0 {
                        self.amps.swap(b, b | mt);
                    }
                }
            }
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩` as a complex number.
    pub fn expectation_complex(&self, op: &SparseOperator) -> Result<C> {
        check_dim(self.n, op.n())?;
        let mut total = C::new(0.0, 0.0);
        for (p, a) in op.sorted_terms() {
            let f = Flat::new(&p);
            let v: C = self
                .amps
                .iter()
                .enumerate()
                .map(|(b, &amp)| self.amps[b ^ f.x].conj() * f.amp(b) * amp)
                .sum();
            total += v * a;
        }
        Ok(total)
    }

    /// `⟨ψ|O|ψ⟩`, rejecting an imaginary part above round-off.
    pub fn expectation(&self, op: &SparseOperator) -> Result<f64> {
        let v = self.expectation_complex(op)?;
        if v.im.abs() > 1e-10 * (1.0 + op.l1_norm()) {
            return Err(Error::Hermiticity(format!("imaginary expectation part {}", v.im)));
        }
        Ok(v.re)
    }

    /// Reduced density matrix on `region`; local bit `j` is `region[j]`.
    pub fn reduced_density_matrix(&self, region: &[usize]) -> Result<DMatrix<C>> {
        validate_region(self.n, region)?;
        let k = region.len();
        let rmask: usize = region.iter().map(|&q| 1usize << q).sum();
        let spread = |l: usize| -> usize {
            region
                .iter()
                .enumerate()
                .filter(|(j, _)| (l >> j) & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        };
        let offsets: Vec<usize> = (0..1usize << k).map(spread).collect();
        let mut rho = DMatrix::<C>::zeros(1 << k, 1 << k);
        let mut local = vec![C::new(0.0, 0.0); 1 << k];
        for env in 0..self.amps.len() {
            if env & rmask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[env | off];
            }
            for i in 0..local.len() {
                if local[i] == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..local.len() {
                    rho[(i, j)] += local[i] * local[j].conj();
                }
            }
        }
        Ok(rho)
    }
}

pub(crate) fn validate_region(n: usize, region: &[usize]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for &q in region {
        if q >= n {
            return Err(Error::Parameter(format!("region site {q} out of range")));
        }
        if !seen.insert(q) {
            return Err(Error::Parameter(format!("region site {q} repeated")));
        }
    }
    Ok(())
}

/// Run the circuit on its initial state.
pub fn statevector_evolve(c: &Circuit, theta: &[f64]) -> Result<StateVector> {
    c.check_theta(theta)?;
    let mut psi = match c.initial_state() {
        InitialState::AllZero => StateVector::zero(c.n())?,
        InitialState::AllPlus => StateVector::plus(c.n())?,
    };
    for g in c.gates() {
        match g {
            Gate::Rotation { axis, angle, sign } => {
                psi.apply_rotation(axis, *sign as f64 * resolve(*angle, theta))?
            }
            Gate::Clifford(g) => psi.apply_clifford(g)?,
        }
    }
    Ok(psi)
}

pub fn statevector_expectation(c: &Circuit, theta: &[f64], observable: &SparseOperator) -> Result<f64> {
    statevector_evolve(c, theta)?.expectation(observable)
}

/// Ground energy of the periodic chain `-Σ Z_j Z_{j+1} - g Σ X_j`.
///
/// The Jordan–Wigner fermions obey antiperiodic boundary conditions in the
/// even-parity sector and periodic ones in the odd sector; the two
/// sector minima are compared.
pub fn exact_tfim_energy(n: usize, gx: f64) -> Result<f64> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::Parameter(format!("chain length must be even and at least 4, got {n}")));
    }
    if !gx.is_finite() {
        return Err(Error::NonFinite(format!("field {gx}")));
    }
    let eps = |k: f64| (1.0 + gx * gx - 2.0 * gx * k.cos()).sqrt();
    let nf = n as f64;
    let even: f64 = -(0..n).map(|m| eps((2 * m + 1) as f64 * PI / nf)).sum::<f64>();
    let odd: f64 = -(1..n)
        .filter(|&m| 2 * m != n)
        .map(|m| eps(2.0 * PI * m as f64 / nf))
        .sum::<f64>()
        - 2.0;
    Ok(even.min(odd))
}

/// Majorana hopping matrix between the two sublattices of the flux-free
/// honeycomb torus. `signs` multiply the couplings of bonds that wrap
/// horizontally and vertically respectively.
fn kitaev_hopping(lat: &Lattice, j: [f64; 3], signs: (f64, f64)) -> DMatrix<f64> {
    let (nx, ny) = (lat.nx(), lat.ny());
    let half = nx * ny / 2;
    let sub = |q: usize| (q / nx + q % nx) % 2;
    let idx = |q: usize| q / 2;
    let mut m = DMatrix::<f64>::zeros(half, half);
    for b in lat.bonds() {
        let (a, bb) = if sub(b.a) == 0 { (b.a, b.b) } else { (b.b, b.a) };
        let (r, c) = (b.a / nx, b.a % nx);
        let (coupling, wrap) = match b.kind {
            BondKind::X => (j[0], c == nx - 1),
            BondKind::Y => (j[1], c == nx - 1),
            BondKind::Z => (j[2], r == ny - 1),
            BondKind::Ising => unreachable!("honeycomb lattices carry typed bonds"),
        };
        let s = if !wrap {
            1.0
        } else if matches!(b.kind, BondKind::Z) {
            signs.1
        } else {
            signs.0
        };
        m[(idx(a), idx(bb))] += coupling * s;
    }
    m
}

fn check_honeycomb(nx: usize, ny: usize, j: [f64; 3]) -> Result<Lattice> {
    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("couplings {j:?}")));
    }
    Lattice::honeycomb(nx, ny)
}

/// Vacuum energies `-Σ σ_i(M)` of the four boundary sectors, ordered
/// `(+,+), (+,-), (-,+), (-,-)` in (horizontal, vertical) wrap signs.
pub fn kitaev_sector_energies(nx: usize, ny: usize, jx: f64, jy: f64, jz: f64) -> Result<[f64; 4]> {
    let lat = check_honeycomb(nx, ny, [jx, jy, jz])?;
    let mut out = [0.0; 4];
    for (i, signs) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        let m = kitaev_hopping(&lat, [jx, jy, jz], signs);
        out[i] = -m.singular_values().iter().sum::<f64>();
    }
    Ok(out)
}

/// Flux-free ground energy of the Kitaev honeycomb torus in the sector
/// with uniform bond gauge, the sector the tabulated reference energies
/// refer to.
pub fn exact_kitaev_energy(nx: usize, ny: usize, jx: f64, jy: f64, jz: f64) -> Result<f64> {
    Ok(kitaev_sector_energies(nx, ny, jx, jy, jz)?[0])
}

/// Lowest flux-free energy over the four boundary sectors.
pub fn kitaev_flux_free_minimum(nx: usize, ny: usize, jx: f64, jy: f64, jz: f64) -> Result<f64> {
    let e = kitaev_sector_energies(nx, ny, jx, jy, jz)?;
    Ok(e.into_iter().fold(f64::INFINITY, f64::min))
}

/// `H|v⟩` for a Pauli sum on at most 64 qubits.
struct PauliAction {
    terms: Vec<(Flat, f64)>,
}

impl PauliAction {
    fn new(h: &SparseOperator) -> Self {
        Self {
            terms: h
                .sorted_terms()
                .iter()
                .map(|(p, a)| (Flat::new(p), *a))
                .collect(),
        }
    }

    fn apply(&self, v: &[C], out: &mut [C]) {
        out.iter_mut().for_each(|o| *o = C::new(0.0, 0.0));
        for (f, a) in &self.terms {
            for (b, &amp) in v.iter().enumerate() {
                out[b ^ f.x] += f.amp(b) * amp * *a;
            }
        }
    }
}

/// Lowest eigenvalue of a Pauli-sum Hamiltonian.
///
/// Small registers are diagonalized densely, larger ones with Lanczos from a
/// seeded random start vector.
pub fn exact_ground_energy_small(h: &SparseOperator) -> Result<f64> {
    ground(h, false).map(|g| g.0)
}

/// Lowest eigenvalue and a normalized eigenvector.
pub fn exact_ground_state_small(h: &SparseOperator) -> Result<(f64, StateVector)> {
    let (e, v) = ground(h, true)?;
    Ok((e, StateVector::from_amplitudes(h.n(), v.expect("vector requested"))?))
}

fn ground(h: &SparseOperator, want: bool) -> Result<(f64, Option<Vec<C>>)> {
    let n = h.n();
    StateVector::check_size(n, MAX_LANCZOS_QUBITS)?;
    let dim = 1usize << n;
    let act = PauliAction::new(h);
    if dim <= 256 {
        let mut m = DMatrix::<C>::zeros(dim, dim);
        let mut e = vec![C::new(0.0, 0.0); dim];
        let mut col = vec![C::new(0.0, 0.0); dim];
        for j in 0..dim {
            e.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
            e[j] = C::new(1.0, 0.0);
            act.apply(&e, &mut col);
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
        }
        let eig = SymmetricEigen::new(m);
        let (i, e0) = eig
            .eigenvalues
            .iter()
            .cloned()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let vec = want.then(|| eig.eigenvectors.column(i).iter().cloned().collect());
        return Ok((e0, vec));
    }
    let (alpha, beta) = lanczos(&act, dim)?;
    let (e0, y) = tridiagonal_lowest(&alpha, &beta);
    if !want {
        return Ok((e0, None));
    }
    let v = lanczos_replay(&act, dim, &y);
    let nv = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok((e0, Some(v.into_iter().map(|a| a / nv).collect())))
}

fn start_vector(dim: usize) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<C> = (0..dim)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let nv = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= nv);
    v
}

const LANCZOS_MAX_ITER: usize = 2000;

/// Lanczos recurrence without reorthogonalization; the extreme Ritz value
/// converges regardless of the loss of orthogonality.
fn lanczos(act: &PauliAction, dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = start_vector(dim);
    let mut prev = vec![C::new(0.0, 0.0); dim];
    let mut w = vec![C::new(0.0, 0.0); dim];
    let (mut alpha, mut beta) = (Vec::new(), Vec::<f64>::new());
    let mut last = f64::INFINITY;
    let mut stable = 0;
    for it in 0..LANCZOS_MAX_ITER {
        act.apply(&v, &mut w);
        let a: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        let b_prev = beta.last().copied().unwrap_or(0.0);
        for i in 0..dim {
            w[i] -= v[i] * a + prev[i] * b_prev;
        }
        alpha.push(a);
        let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if b < 1e-12 {
            return Ok((alpha, beta));
        }
        if it % 5 == 4 {
            let (e, _) = tridiagonal_lowest(&alpha, &beta);
            if (e - last).abs() < 1e-13 * (1.0 + e.abs()) {
                stable += 1;
            } else {
                stable = 0;
            }
            last = e;
            if stable >= 3 {
                return Ok((alpha, beta));
            }
        }
        beta.push(b);
        std::mem::swap(&mut prev, &mut v);
        for i in 0..dim {
            v[i] = w[i] / b;
        }
    }
    Err(Error::Capacity(format!("Lanczos did not converge in {LANCZOS_MAX_ITER} iterations")))
}

/// Regenerate the Lanczos basis and accumulate `Σ y_j v_j`.
fn lanczos_replay(act: &PauliAction, dim: usize, y: &[f64]) -> Vec<C> {
    let mut v = start_vector(dim);
    let mut prev = vec![C::new(0.0, 0.0); dim];
    let mut w = vec![C::new(0.0, 0.0); dim];
    let mut acc = vec![C::new(0.0, 0.0); dim];
    let mut beta = Vec::<f64>::new();
    for (it, &yj) in y.iter().enumerate() {
        for i in 0..dim {
            acc[i] += v[i] * yj;
        }
        if it + 1 == y.len() {
            break;
        }
        act.apply(&v, &mut w);
        let a: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        let b_prev = beta.last().copied().unwrap_or(0.0);
        for i in 0..dim {
            w[i] -= v[i] * a + prev[i] * b_prev;
        }
        let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        beta.push(b);
        std::mem::swap(&mut prev, &mut v);
        for i in 0..dim {
            v[i] = w[i] / b;
        }
    }
    acc
}

fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (i, e) = eig
        .eigenvalues
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    (e, eig.eigenvectors.column(i).iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ParamRef;
    use crate::models::{ising1d_hamiltonian, kitaev_hamiltonian};

    fn op(terms: &[(f64, &str)]) -> SparseOperator {
        SparseOperator::from_strs(terms).unwrap()
    }

    #[test]
    fn basic_states() {
        let c = Circuit::new(3, InitialState::AllZero);
        let psi = statevector_evolve(&c, &[]).unwrap();
        assert_eq!(psi.amplitudes()[0], C::new(1.0, 0.0));
        let mut h = Circuit::new(3, InitialState::AllZero);
        h.extend_cliffords((0..3).map(Clifford::H)).unwrap();
        let psi = statevector_evolve(&h, &[]).unwrap();
        let plus = StateVector::plus(3).unwrap();
        assert!((psi.inner(&plus).re - 1.0).abs() < 1e-14);
        assert!(StateVector::zero(25).is_err());
    }

    #[test]
    fn rotation_is_exp_minus_i_half_theta() {
        let mut c = Circuit::new(1, InitialState::AllZero);
        c.append_rotation("X".parse().unwrap(), ParamRef::Free(0)).unwrap();
        let t = 0.8;
        let psi = statevector_evolve(&c, &[t]).unwrap();
        assert!((psi.amplitudes()[0] - C::new((t / 2.0).cos(), 0.0)).norm() < 1e-15);
        assert!((psi.amplitudes()[1] - C::new(0.0, -(t / 2.0).sin())).norm() < 1e-15);
        let z = statevector_expectation(&c, &[t], &op(&[(1.0, "Z")])).unwrap();
        assert!((z - t.cos()).abs() < 1e-14);
    }

    #[test]
    fn single_qubit_minus_x() {
        assert!((exact_ground_energy_small(&op(&[(-1.0, "X")])).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tfim_formula_matches_diagonalization() {
        for (n, g) in [(4, 0.7), (6, 1.3), (8, 1.0), (8, 0.3), (10, 2.5), (12, 0.5)] {
            let h = ising1d_hamiltonian(n, g, 0.0).unwrap();
            let dense = exact_ground_energy_small(&h.operator).unwrap();
            let formula = exact_tfim_energy(n, g).unwrap();
            assert!((dense - formula).abs() < 1e-10, "n={n} g={g}: {dense} vs {formula}");
        }
        assert_eq!(exact_tfim_energy(6, 0.0).unwrap(), -6.0);
        assert!(exact_tfim_energy(5, 1.0).is_err());
    }

    #[test]
    fn kitaev_reference_values() {
        let e = exact_kitaev_energy(8, 6, 0.3, 0.3, 1.0).unwrap();
        assert!((e + 25.0873).abs() < 1e-3, "{e}");
        let e = exact_kitaev_energy(8, 6, 0.6, 0.6, 1.0).unwrap();
        assert!((e + 28.5876).abs() < 1e-3, "{e}");
        let e = exact_kitaev_energy(8, 6, 0.0, 0.0, 1.0).unwrap();
        assert!((e + 24.0).abs() < 1e-12);
        assert!(exact_kitaev_energy(7, 6, 0.3, 0.3, 1.0).is_err());
    }

    #[test]
    fn kitaev_sectors_match_diagonalization_at_4x4() {
        let h = kitaev_hamiltonian(4, 4, 0.3, 0.3, 1.0).unwrap();
        let dense = exact_ground_energy_small(&h.operator).unwrap();
        let min = kitaev_flux_free_minimum(4, 4, 0.3, 0.3, 1.0).unwrap();
        assert!((dense - min).abs() < 1e-9, "{dense} vs {min}");
    }

    #[test]
    fn ground_state_vector_is_an_eigenvector() {
        for h in [
            ising1d_hamiltonian(6, 0.8, 0.1).unwrap().operator,
            ising1d_hamiltonian(10, 1.2, 0.0).unwrap().operator,
        ] {
            let (e, psi) = exact_ground_state_small(&h).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-10);
            assert!((psi.expectation(&h).unwrap() - e).abs() < 1e-9);
        }
    }

    #[test]
    fn reduced_density_matrix_of_bell_pair() {
        let mut c = Circuit::new(2, InitialState::AllZero);
        c.extend_cliffords([Clifford::H(0), Clifford::Cnot(0, 1)]).unwrap();
        let psi = statevector_evolve(&c, &[]).unwrap();
        let rho = psi.reduced_density_matrix(&[1]).unwrap();
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!(rho[(0, 1)].norm() < 1e-14);
        let full = psi.reduced_density_matrix(&[0, 1]).unwrap();
        assert!((full[(0, 3)].re - 0.5).abs() < 1e-14);
    }
}
