//! Observables, Pauli-expansion tomography and entanglement entropies.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::circuit::Circuit;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::models::Bond;
use crate::operator::SparseOperator;
use crate::oracle::validate_region;
use crate::pauli::{Pauli, PauliString};

/// Largest tomography region.
pub const MAX_REGION: usize = 8;

/// Clamps larger than this are reported as warnings.
const CLAMP_WARN: f64 = 0.01;

const LOCAL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// `⟨P⟩` for each string, evaluated independently and in parallel.
pub fn string_expectations(
    engine: &Engine,
    c: &Circuit,
    theta: &[f64],
    strings: &[PauliString],
    delta_c: f64,
) -> Result<Vec<f64>> {
    strings
        .par_iter()
        .map(|p| {
            if p.is_identity() {
                return Ok(1.0);
            }
            let o = SparseOperator::from_terms(c.n(), [(p.clone(), 1.0)])?;
            engine.expectation(c, &o, theta, delta_c)
        })
        .collect()
}

fn single_axis(axis: Pauli) -> Result<Pauli> {
    match axis {
        Pauli::X | Pauli::Y | Pauli::Z => Ok(axis),
        Pauli::I => Err(Error::Parameter("magnetization axis must be X, Y or Z".into())),
    }
}

/// `⟨P_j⟩` on every site.
pub fn site_expectations(engine: &Engine, c: &Circuit, theta: &[f64], axis: Pauli, delta_c: f64) -> Result<Vec<f64>> {
    let axis = single_axis(axis)?;
    let n = c.n();
    let strings = (0..n)
        .map(|q| PauliString::single(n, q, axis))
        .collect::<Result<Vec<_>>>()?;
    string_expectations(engine, c, theta, &strings, delta_c)
}

/// `(1/N) Σ_j ⟨P_j⟩` from one propagation of the summed observable.
pub fn magnetization(engine: &Engine, c: &Circuit, theta: &[f64], axis: Pauli, delta_c: f64) -> Result<f64> {
    let axis = single_axis(axis)?;
    let n = c.n();
    let mut o = SparseOperator::new(n);
    for q in 0..n {
        o.add_term(PauliString::single(n, q, axis)?, 1.0 / n as f64)?;
    }
    engine.expectation(c, &o, theta, delta_c)
}

/// Two-site correlator `⟨P_a P_b⟩` per bond, `P` the bond's letter.
pub fn bond_expectations(engine: &Engine, c: &Circuit, theta: &[f64], bonds: &[Bond], delta_c: f64) -> Result<Vec<f64>> {
    let n = c.n();
    let strings = bonds
        .iter()
        .map(|b| {
            let p = b.kind.pauli();
            PauliString::from_sites(n, &[(b.a, p), (b.b, p)])
        })
        .collect::<Result<Vec<_>>>()?;
    string_expectations(engine, c, theta, &strings, delta_c)
}

pub fn energy(engine: &Engine, c: &Circuit, theta: &[f64], h: &SparseOperator, delta_c: f64) -> Result<f64> {
    engine.expectation(c, h, theta, delta_c)
}

/// Reduced density matrix stored through its Pauli coefficients.
///
/// Coefficient index `Σ_j d_j 4^j` has digit `d_j ∈ {I, X, Y, Z}` on
/// `region[j]`; matrix bit `j` is `region[j]` as well.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    region: Vec<usize>,
    coeffs: Vec<f64>,
    matrix: DMatrix<C>,
}

fn local_word(k: usize, idx: usize) -> PauliString {
    let mut p = PauliString::identity(k);
    for j in 0..k {
        p.set(j, LOCAL[(idx >> (2 * j)) & 3]);
    }
    p
}

impl DensityMatrix {
    /// `ρ = 2^{-k} Σ c_P P` from all `4^k` coefficients.
    pub fn from_coefficients(region: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        let k = region.len();
        if k > MAX_REGION {
            return Err(Error::Capacity(format!("region of {k} sites exceeds {MAX_REGION}")));
        }
        if coeffs.len() != 1 << (2 * k) {
            return Err(Error::Dimension {
                expected: 1 << (2 * k),
                found: coeffs.len(),
            });
        }
        let dim = 1usize << k;
        let norm = 1.0 / dim as f64;
        let mut m = DMatrix::<C>::zeros(dim, dim);
        for (idx, &cp) in coeffs.iter().enumerate() {
            if cp == 0.0 {
                continue;
            }
            let p = local_word(k, idx);
            let (x, z) = (p.x_words()[0] as usize, p.z_words()[0] as usize);
            let phase = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)]
                [(p.y_count() % 4) as usize];
            for b in 0..dim {
                let s = if (z & b).count_ones() % 2 == 1 { -norm } else { norm };
                m[(b ^ x, b)] += phase * s * cp;
            }
        }
        Ok(Self {
            region,
            coeffs,
            matrix: m,
        })
    }

    pub fn region(&self) -> &[usize] {
        &self.region
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn trace(&self) -> C {
        self.matrix.trace()
    }

    /// Trace out every site not in `keep`, which becomes the new region order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let pos = keep
            .iter()
            .map(|s| {
                self.region
                    .iter()
                    .position(|r| r == s)
                    .ok_or_else(|| Error::Parameter(format!("site {s} is not in the region")))
            })
            .collect::<Result<Vec<_>>>()?;
        validate_region(usize::MAX, keep)?;
        let k = keep.len();
        let coeffs = (0..1usize << (2 * k))
            .map(|sub| {
                let full: usize = pos
                    .iter()
                    .enumerate()
                    .map(|(j, &pj)| ((sub >> (2 * j)) & 3) << (2 * pj))
                    .sum();
                self.coeffs[full]
            })
            .collect();
        Self::from_coefficients(keep.to_vec(), coeffs)
    }

    /// `(local word over the region sites, c_P)` lines for nonzero coefficients.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# region {}\n",
            self.region.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
        ));
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                out.push_str(&format!("{} {c:e}\n", local_word(self.region.len(), idx)));
            }
        }
        out
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(&self.matrix)
    }
}

/// Assemble `ρ_R` from the `4^|R|` expectations `⟨P⟩`, evaluated in parallel.
pub fn tomography(engine: &Engine, c: &Circuit, theta: &[f64], region: &[usize], delta_c: f64) -> Result<DensityMatrix> {
    validate_region(c.n(), region)?;
    let k = region.len();
    if k > MAX_REGION {
        return Err(Error::Capacity(format!("region of {k} sites exceeds {MAX_REGION}")));
    }
    let n = c.n();
    let strings: Vec<PauliString> = (0..1usize << (2 * k))
        .map(|idx| {
            let mut p = PauliString::identity(n);
            for (j, &q) in region.iter().enumerate() {
                p.set(q, LOCAL[(idx >> (2 * j)) & 3]);
            }
            p
        })
        .collect();
    let coeffs = string_expectations(engine, c, theta, &strings, delta_c)?;
    DensityMatrix::from_coefficients(region.to_vec(), coeffs)
}

/// `−Tr ρ log₂ ρ`, eigenvalues clamped to `[0, 1]`.
pub fn von_neumann_entropy(rho: &DMatrix<C>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::Parameter("density matrix is not square".into()));
    }
    let asym = (rho - rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if asym > 1e-8 {
        return Err(Error::Hermiticity(format!("density matrix deviates from Hermitian by {asym:e}")));
    }
    let eig = SymmetricEigen::new(rho.clone());
    let mut worst: f64 = 0.0;
    let mut s = 0.0;
    for &l in eig.eigenvalues.iter() {
        let c = l.clamp(0.0, 1.0);
        worst = worst.max((c - l).abs());
        if c > 0.0 {
            s -= c * c.log2();
        }
    }
    if worst > CLAMP_WARN {
        log::warn!("entropy eigenvalue clamp of {worst:.3e}");
    } else if worst > 0.0 {
        log::debug!("entropy eigenvalue clamp of {worst:.3e}");
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopoEntropy {
    pub s_topo: f64,
    /// `S_A, S_B, S_C, S_AB, S_AC, S_BC, S_ABC`.
    pub entropies: [f64; 7],
}

/// `S_A + S_B + S_C − S_AB − S_AC − S_BC + S_ABC` from one tomography of
/// `A ∪ B ∪ C`.
pub fn topological_entropy(
    engine: &Engine,
    c: &Circuit,
    theta: &[f64],
    a: &[usize],
    b: &[usize],
    cc: &[usize],
    delta_c: f64,
) -> Result<TopoEntropy> {
    let abc: Vec<usize> = a.iter().chain(b).chain(cc).copied().collect();
    validate_region(c.n(), &abc).map_err(|_| Error::Parameter("regions A, B, C must be disjoint and in range".into()))?;
    let rho = tomography(engine, c, theta, &abc, delta_c)?;
    topological_entropy_from(&rho, a, b, cc)
}

pub fn topological_entropy_from(rho: &DensityMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<TopoEntropy> {
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let s = |r: &[usize]| rho.partial_trace(r)?.entropy();
    let abc = join(&join(a, b), c);
    let e = [
        s(a)?,
        s(b)?,
        s(c)?,
        s(&join(a, b))?,
        s(&join(a, c))?,
        s(&join(b, c))?,
        s(&abc)?,
    ];
    Ok(TopoEntropy {
        s_topo: e[0] + e[1] + e[2] - e[3] - e[4] - e[5] + e[6],
        entropies: e,
    })
}

/// Regions `A = {0, 1}`, `B = {nx, nx+1}`, `C = {2, nx+2}`.
pub fn default_tee_regions(nx: usize) -> [Vec<usize>; 3] {
    [vec![0, 1], vec![nx, nx + 1], vec![2, nx + 2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Clifford, InitialState, ParamRef};
    use crate::oracle::statevector_evolve;
    use crate::pauli::tests::arb_pauli;
    use proptest::prelude::*;

    fn eng() -> Engine {
        Engine::serial()
    }

    fn bell() -> Circuit {
        let mut c = Circuit::new(2, InitialState::AllZero);
        c.extend_cliffords([Clifford::H(0), Clifford::Cnot(0, 1)]).unwrap();
        c
    }

    fn close(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn trivial_magnetizations() {
        let z = Circuit::new(5, InitialState::AllZero);
        assert_eq!(magnetization(&eng(), &z, &[], Pauli::Z, 0.0).unwrap(), 1.0);
        let p = Circuit::new(5, InitialState::AllPlus);
        assert_eq!(magnetization(&eng(), &p, &[], Pauli::X, 0.0).unwrap(), 1.0);
        assert_eq!(magnetization(&eng(), &p, &[], Pauli::Z, 0.0).unwrap(), 0.0);
        assert!(magnetization(&eng(), &p, &[], Pauli::I, 0.0).is_err());
    }

    #[test]
    fn trivial_tomography() {
        let z = Circuit::new(3, InitialState::AllZero);
        let r = tomography(&eng(), &z, &[], &[0], 0.0).unwrap();
        let mut expect = DMatrix::<C>::zeros(2, 2);
        expect[(0, 0)] = C::new(1.0, 0.0);
        assert!(close(r.matrix(), &expect) < 1e-15);
        let b = tomography(&eng(), &bell(), &[], &[1], 0.0).unwrap();
        assert!(close(b.matrix(), &(DMatrix::<C>::identity(2, 2) * C::new(0.5, 0.0))) < 1e-15);
        assert!((b.entropy().unwrap() - 1.0).abs() < 1e-12);
        let full = tomography(&eng(), &bell(), &[], &[0, 1], 0.0).unwrap();
        assert!(full.entropy().unwrap().abs() < 1e-12);
        assert!(tomography(&eng(), &Circuit::new(10, InitialState::AllZero), &[], &[0; 1].repeat(2), 0.0).is_err());
        let big = Circuit::new(10, InitialState::AllZero);
        assert!(matches!(
            tomography(&eng(), &big, &[], &(0..9).collect::<Vec<_>>(), 0.0),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn maximally_mixed_entropies() {
        for k in 1..=4 {
            let d = 1usize << k;
            let rho = DMatrix::<C>::identity(d, d) * C::new(1.0 / d as f64, 0.0);
            assert!((von_neumann_entropy(&rho).unwrap() - k as f64).abs() < 1e-12);
        }
        let mut bad = DMatrix::<C>::zeros(2, 2);
        bad[(0, 1)] = C::new(0.3, 0.0);
        assert!(von_neumann_entropy(&bad).is_err());
    }

    fn random_circuit(n: usize, axes: &[(PauliString, f64)]) -> Circuit {
        let mut c = Circuit::new(n, InitialState::AllZero);
        for (p, a) in axes {
            if !p.is_identity() {
                c.append_rotation(p.clone(), ParamRef::Bound(*a)).unwrap();
            }
        }
        c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_tomography_matches_oracle(axes in proptest::collection::vec((arb_pauli(5), -2.0f64..2.0), 1..8)) {
            let c = random_circuit(5, &axes);
            let region = [3, 0, 4];
            let rho = tomography(&eng(), &c, &[], &region, 0.0).unwrap();
            let psi = statevector_evolve(&c, &[]).unwrap();
            let exact = psi.reduced_density_matrix(&region).unwrap();
            prop_assert!(close(rho.matrix(), &exact) < 1e-10);
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
            let sub = rho.partial_trace(&[4, 3]).unwrap();
            let direct = tomography(&eng(), &c, &[], &[4, 3], 0.0).unwrap();
            prop_assert!(close(sub.matrix(), direct.matrix()) < 1e-10);
        }

        #[test]
        fn prop_entropy_is_clifford_invariant(
            axes in proptest::collection::vec((arb_pauli(4), -2.0f64..2.0), 1..8),
            gates in proptest::collection::vec(0usize..4, 1..6),
        ) {
            let c = random_circuit(4, &axes);
            let rho = statevector_evolve(&c, &[]).unwrap().reduced_density_matrix(&[0, 1]).unwrap();
            let mut with = c.clone();
            for (k, g) in gates.iter().enumerate() {
                with.append_clifford(match g {
                    0 => Clifford::H(k % 2),
                    1 => Clifford::S(k % 2),
                    2 => Clifford::Sdg(k % 2),
                    _ => Clifford::Cnot(k % 2, 1 - k % 2),
                }).unwrap();
            }
            let rho2 = statevector_evolve(&with, &[]).unwrap().reduced_density_matrix(&[0, 1]).unwrap();
            let (s1, s2) = (von_neumann_entropy(&rho).unwrap(), von_neumann_entropy(&rho2).unwrap());
            prop_assert!((s1 - s2).abs() < 1e-10);
        }

        #[test]
        fn prop_product_state_has_zero_topo_entropy(angles in proptest::collection::vec(-3.0f64..3.0, 6)) {
            let n = 6;
            let mut c = Circuit::new(n, InitialState::AllZero);
            for (q, a) in angles.iter().enumerate() {
                let axis = if q % 2 == 0 { Pauli::X } else { Pauli::Y };
                c.append_rotation(PauliString::single(n, q, axis).unwrap(), ParamRef::Bound(*a)).unwrap();
            }
            let t = topological_entropy(&eng(), &c, &[], &[0, 1], &[2, 3], &[4, 5], 0.0).unwrap();
            prop_assert!(t.s_topo.abs() < 1e-9);
        }
    }

    #[test]
    fn overlapping_regions_rejected() {
        let c = Circuit::new(6, InitialState::AllZero);
        assert!(topological_entropy(&eng(), &c, &[], &[0, 1], &[1, 2], &[3], 0.0).is_err());
    }

    #[test]
    fn bond_correlators_at_stabilizer_point() {
        let c = crate::topo::flux_free_circuit(4, 4).unwrap();
        let lat = crate::models::Lattice::honeycomb(4, 4).unwrap();
        let v = bond_expectations(&eng(), &c, &[], lat.bonds(), 0.0).unwrap();
        for (b, e) in lat.bonds().iter().zip(&v) {
            let expect = if b.kind == crate::models::BondKind::Z { 1.0 } else { 0.0 };
            assert_eq!(*e, expect, "{b:?}");
        }
    }

    #[test]
    fn dump_lists_nonzero_coefficients() {
        let b = tomography(&eng(), &bell(), &[], &[0, 1], 0.0).unwrap();
        let d = b.dump();
        let lines: Vec<&str> = d.lines().skip(1).collect();
        assert_eq!(lines.len(), 4);
        assert!(lines.contains(&"II 1e0"));
        assert!(lines.contains(&"YY -1e0"));
    }
}
