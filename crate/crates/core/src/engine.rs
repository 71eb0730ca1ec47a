//! Heisenberg-picture propagation with coefficient truncation.
//!
//! `heisenberg_evolve` walks a circuit from its last gate to its first,
//! replacing the observable `O` by `g† O g` and dropping terms with
//! `|a| <= delta_c` after every gate.

use std::f64::consts::TAU;
use std::hash::BuildHasher;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxBuildHasher;

use crate::circuit::{resolve, Circuit, Clifford, Gate, InitialState};
use crate::error::{check_dim, Error, Result};
use crate::operator::{check_delta, SparseOperator, TermMap};
use crate::pauli::PauliString;

/// Default term count above which a sharded engine goes parallel.
const PAR_MIN_TERMS: usize = 1 << 12;

/// Per-run propagation statistics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EngineStats {
    pub initial_terms: usize,
    pub max_terms: usize,
    /// `(gate index, terms after the gate, seconds)` in processing order.
    pub per_gate: Vec<(usize, usize, f64)>,
}

impl EngineStats {
    pub fn terms_per_gate(&self) -> Vec<usize> {
        self.per_gate.iter().map(|g| g.1).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "gate_index,terms,wall_seconds")?;
        for (g, t, s) in &self.per_gate {
            writeln!(w, "{g},{t},{s:.9}")?;
        }
        Ok(())
    }
}

/// Propagation settings.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Engine {
    /// Number of hash shards; 1 runs the serial kernel.
    pub shards: usize,
    /// Record per-gate timings and term counts.
    pub record: bool,
    /// Below this many terms the serial kernel is used even when sharded.
    pub par_threshold: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self::serial()
    }
}

/// Cosine and sine of `theta` reduced mod 2π, with round-off at the
/// Clifford angles flushed to zero.
#[inline]
fn trig(theta: f64) -> (f64, f64) {
    let (s, c) = theta.rem_euclid(TAU).sin_cos();
    let flush = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    (flush(c), flush(s))
}

#[inline]
fn split_phase(axis: &PauliString, p: &PauliString) -> Result<(PauliString, f64)> {
    let (k, q) = axis.mul_unchecked(p);
    match k {
        1 => Ok((q, -1.0)),
        3 => Ok((q, 1.0)),
        _ => Err(Error::Hermiticity(format!(
            "product of anticommuting {axis} and {p} has real phase i^{k}"
        ))),
    }
}

/// `g† P g` for a single string, returning `(negated, image)`.
pub(crate) fn conjugate_string(p: &PauliString, g: &Clifford) -> (bool, PauliString) {
    match *g {
        Clifford::H(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            let mut out = p.clone();
            out.set_bits(q, z, x);
            (x && z, out)
        }
        Clifford::S(q) | Clifford::Sdg(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            if !x {
                return (false, p.clone());
            }
            let mut out = p.clone();
            out.set_bits(q, true, !z);
            let neg = matches!(g, Clifford::S(_)) != z;
            (neg, out)
        }
        Clifford::Cnot(c, t) => {
            let (xc, zc, xt, zt) = (p.x_bit(c), p.z_bit(c), p.x_bit(t), p.z_bit(t));
            let neg = xc && zt && (xt == zc);
            let out = p.map_masks(|x, z| {
                if xc {
                    x[t / 64] ^= 1 << (t % 64);
                }
                if zt {
                    z[c / 64] ^= 1 << (c % 64);
                }
            });
            (neg, out)
        }
    }
}

fn rotate_serial(
    map: &mut TermMap,
    axis: &PauliString,
    c: f64,
    s: f64,
    buf: &mut Vec<(PauliString, f64)>,
) -> Result<()> {
    buf.clear();
    for (p, a) in map.iter_mut() {
        if axis.anticommutes_unchecked(p) {
            if s != 0.0 {
                let (q, phi) = split_phase(axis, p)?;
                buf.push((q, *a * s * phi));
            }
            *a *= c;
        }
    }
    for (q, b) in buf.drain(..) {
        *map.entry(q).or_insert(0.0) += b;
    }
    Ok(())
}

fn clifford_serial(map: TermMap, g: &Clifford) -> TermMap {
    let mut out = TermMap::with_capacity_and_hasher(map.len(), FxBuildHasher);
    for (p, a) in map {
        let (neg, q) = conjugate_string(&p, g);
        *out.entry(q).or_insert(0.0) += if neg { -a } else { a };
    }
    out
}

#[inline]
fn shard_of(p: &PauliString, shards: usize) -> usize {
    ((FxBuildHasher.hash_one(p) >> 32) as usize) % shards
}

/// Term storage split by key hash for data-parallel updates.
struct Sharded {
    shards: Vec<TermMap>,
}

impl Sharded {
    fn new(map: TermMap, count: usize) -> Self {
        let mut shards: Vec<TermMap> = (0..count).map(|_| TermMap::default()).collect();
        for (p, a) in map {
            let d = shard_of(&p, count);
            shards[d].insert(p, a);
        }
        Self { shards }
    }

    fn len(&self) -> usize {
        self.shards.iter().map(|s| s.len()).sum()
    }

    fn into_map(self) -> TermMap {
        let mut out = TermMap::with_capacity_and_hasher(self.len(), FxBuildHasher);
        for s in self.shards {
            out.extend(s);
        }
        out
    }

    /// Merge outgoing buffers `[source][dest]` into the destination shards in
    /// source order, then truncate.
    fn merge(&mut self, outgoing: Vec<Vec<Vec<(PauliString, f64)>>>, delta_c: f64) {
        let count = self.shards.len();
        let mut incoming: Vec<Vec<Vec<(PauliString, f64)>>> =
            (0..count).map(|_| Vec::with_capacity(count)).collect();
        for row in outgoing {
            for (d, buf) in row.into_iter().enumerate() {
                incoming[d].push(buf);
            }
        }
        self.shards
            .par_iter_mut()
            .zip(incoming.into_par_iter())
            .for_each(|(shard, bufs)| {
                for buf in bufs {
                    for (q, b) in buf {
                        *shard.entry(q).or_insert(0.0) += b;
                    }
                }
                shard.retain(|_, a| a.abs() > delta_c);
            });
    }

    fn rotate(&mut self, axis: &PauliString, c: f64, s: f64, delta_c: f64) -> Result<()> {
        let count = self.shards.len();
        let outgoing = self
            .shards
            .par_iter_mut()
            .map(|shard| {
                let mut out: Vec<Vec<(PauliString, f64)>> = vec![Vec::new(); count];
                for (p, a) in shard.iter_mut() {
                    if axis.anticommutes_unchecked(p) {
                        if s != 0.0 {
                            let (q, phi) = split_phase(axis, p)?;
                            let d = shard_of(&q, count);
                            out[d].push((q, *a * s * phi));
                        }
                        *a *= c;
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        self.merge(outgoing, delta_c);
        Ok(())
    }

    fn clifford(&mut self, g: &Clifford, delta_c: f64) {
        let count = self.shards.len();
        let outgoing = self
            .shards
            .par_iter_mut()
            .map(|shard| {
                let mut out: Vec<Vec<(PauliString, f64)>> = vec![Vec::new(); count];
                for (p, a) in shard.drain() {
                    let (neg, q) = conjugate_string(&p, g);
                    let d = shard_of(&q, count);
                    out[d].push((q, if neg { -a } else { a }));
                }
                out
            })
            .collect();
        self.merge(outgoing, delta_c);
    }
}

impl Engine {
    pub fn serial() -> Self {
        Self {
            shards: 1,
            record: false,
            par_threshold: PAR_MIN_TERMS,
        }
    }

    /// Sharded engine; results are bit-identical to the serial engine.
    pub fn sharded(shards: usize) -> Self {
        Self {
            shards: shards.max(1),
            record: false,
            par_threshold: PAR_MIN_TERMS,
        }
    }

    pub fn recording(mut self) -> Self {
        self.record = true;
        self
    }

    /// Compute `U† O U` with truncation after every gate.
    pub fn evolve(
        &self,
        op: &SparseOperator,
        c: &Circuit,
        theta: &[f64],
        delta_c: f64,
    ) -> Result<(SparseOperator, EngineStats)> {
        check_dim(c.n(), op.n())?;
        c.check_theta(theta)?;
        check_delta(delta_c)?;

        let mut stats = EngineStats {
            initial_terms: op.len(),
            max_terms: op.len(),
            per_gate: Vec::new(),
        };
        let mut map = op.truncate(delta_c)?.into_map();
        let mut sharded: Option<Sharded> = None;
        let mut buf = Vec::new();

        for (idx, gate) in c.gates().iter().enumerate().rev() {
            let start = self.record.then(Instant::now);
            if self.shards > 1 {
                let terms = sharded.as_ref().map_or(map.len(), Sharded::len);
                if sharded.is_none() && terms >= self.par_threshold {
                    sharded = Some(Sharded::new(std::mem::take(&mut map), self.shards));
                } else if terms < self.par_threshold / 2 {
                    if let Some(s) = sharded.take() {
                        map = s.into_map();
                    }
                }
            }
            match (gate, sharded.as_mut()) {
                (Gate::Rotation { axis, angle, sign }, shards) => {
                    let (cos, sin) = trig(*sign as f64 * resolve(*angle, theta));
                    if cos == 1.0 && sin == 0.0 {
                        // identity
                    } else if let Some(sh) = shards {
                        sh.rotate(axis, cos, sin, delta_c)?;
                    } else {
                        rotate_serial(&mut map, axis, cos, sin, &mut buf)?;
                        map.retain(|_, a| a.abs() > delta_c);
                    }
                }
                (Gate::Clifford(g), Some(sh)) => sh.clifford(g, delta_c),
                (Gate::Clifford(g), None) => {
                    map = clifford_serial(std::mem::take(&mut map), g);
                }
            }
            let terms = sharded.as_ref().map_or(map.len(), |s| s.len());
            stats.max_terms = stats.max_terms.max(terms);
            if let Some(t0) = start {
                stats.per_gate.push((idx, terms, t0.elapsed().as_secs_f64()));
            }
        }
        if let Some(s) = sharded {
            map = s.into_map();
        }
        Ok((SparseOperator::from_map_unchecked(op.n(), map), stats))
    }

    pub fn expectation(
        &self,
        c: &Circuit,
        observable: &SparseOperator,
        theta: &[f64],
        delta_c: f64,
    ) -> Result<f64> {
        let (evolved, _) = self.evolve(observable, c, theta, delta_c)?;
        let e = match c.initial_state() {
            InitialState::AllZero => evolved.expectation_zero(),
            InitialState::AllPlus => evolved.expectation_plus(),
        };
        if e.is_finite() {
            Ok(e)
        } else {
            Err(Error::NonFinite(format!("expectation value {e}")))
        }
    }

    /// Evaluate each term of the observable separately; returns `⟨P⟩` per term
    /// in canonical order together with its coefficient.
    pub fn expectations_per_term(
        &self,
        c: &Circuit,
        observable: &SparseOperator,
        theta: &[f64],
        delta_c: f64,
    ) -> Result<Vec<(PauliString, f64, f64)>> {
        observable
            .sorted_terms()
            .into_par_iter()
            .map(|(p, a)| {
                let single = SparseOperator::from_terms(observable.n(), [(p.clone(), 1.0)])?;
                Ok((p, a, self.expectation(c, &single, theta, delta_c)?))
            })
            .collect()
    }
}

/// Rotate the observable by one gate `exp(-i θ/2 σ)`: returns `V† O V`, truncated.
pub fn conjugate_rotation(
    op: &SparseOperator,
    axis: &PauliString,
    theta: f64,
    delta_c: f64,
) -> Result<SparseOperator> {
    check_dim(op.n(), axis.n())?;
    check_delta(delta_c)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite(format!("rotation angle {theta}")));
    }
    let (c, s) = trig(theta);
    let mut map = op.clone().into_map();
    rotate_serial(&mut map, axis, c, s, &mut Vec::new())?;
    map.retain(|_, a| a.abs() > delta_c);
    Ok(SparseOperator::from_map_unchecked(op.n(), map))
}

/// `g† O g` for a Clifford gate.
pub fn conjugate_clifford(op: &SparseOperator, g: &Clifford) -> Result<SparseOperator> {
    let n = op.n();
    if let Some(&q) = g.qubits().iter().find(|&&q| q >= n) {
        return Err(Error::Parameter(format!("qubit {q} out of range for {n} qubits")));
    }
    Ok(SparseOperator::from_map_unchecked(
        n,
        clifford_serial(op.clone().into_map(), g),
    ))
}

/// `U† O U` with the serial engine.
pub fn heisenberg_evolve(
    op: &SparseOperator,
    c: &Circuit,
    theta: &[f64],
    delta_c: f64,
) -> Result<SparseOperator> {
    Engine::serial().evolve(op, c, theta, delta_c).map(|r| r.0)
}

/// `⟨init| U† O U |init⟩` with the serial engine.
pub fn expectation(c: &Circuit, observable: &SparseOperator, theta: &[f64], delta_c: f64) -> Result<f64> {
    Engine::serial().expectation(c, observable, theta, delta_c)
}
