//! Sparse real-coefficient Pauli sums.

use std::collections::hash_map::Entry;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;

use crate::error::{check_dim, Error, Result};
use crate::pauli::PauliString;

pub type TermMap = FxHashMap<PauliString, f64>;

/// Hermitian operator `Σ a_P P` with real, nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    terms: TermMap,
}

pub(crate) fn check_delta(delta_c: f64) -> Result<()> {
    if delta_c.is_finite() && delta_c >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "truncation threshold must be finite and non-negative, got {delta_c}"
        )))
    }
}

impl SparseOperator {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: TermMap::default(),
        }
    }

    /// Sum of terms; repeated strings are merged and zero totals dropped.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut op = Self::new(n);
        for (p, a) in terms {
            op.add_term(p, a)?;
        }
        Ok(op)
    }

    /// Parse terms given as `(coefficient, "IXYZ")` pairs.
    pub fn from_strs(terms: &[(f64, &str)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Parameter("no terms given".into()))?;
        let n = first.1.trim().chars().count();
        let parsed = terms
            .iter()
            .map(|&(a, s)| Ok((s.parse::<PauliString>()?, a)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
    }

    pub(crate) fn from_map_unchecked(n: usize, terms: TermMap) -> Self {
        Self { n, terms }
    }

    pub(crate) fn into_map(self) -> TermMap {
        self.terms
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    /// Iterates in hash order; use [`SparseOperator::sorted_terms`] for canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(p, &a)| (p, a))
    }

    pub fn sorted_terms(&self) -> Vec<(PauliString, f64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(p, &a)| (p.clone(), a)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Add `a · p`, merging with any existing term and dropping an exact zero.
    pub fn add_term(&mut self, p: PauliString, a: f64) -> Result<()> {
        check_dim(self.n, p.n())?;
        if !a.is_finite() {
            return Err(Error::NonFinite(format!("coefficient {a} for {p}")));
        }
        match self.terms.entry(p) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += a;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if a != 0.0 {
                    e.insert(a);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let mut out = self.clone();
        for (p, a) in other.iter() {
            out.add_term(p.clone(), a)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::new(self.n);
        if s != 0.0 {
            out.terms = self.terms.iter().map(|(p, &a)| (p.clone(), a * s)).collect();
        }
        out
    }

    /// Terms with `|a| > delta_c`.
    pub fn truncate(&self, delta_c: f64) -> Result<Self> {
        check_delta(delta_c)?;
        let mut out = self.clone();
        out.terms.retain(|_, a| a.abs() > delta_c);
        Ok(out)
    }

    /// `Σ a_P²`, the squared Hilbert–Schmidt norm divided by `2^n`.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a * a).sum()
    }

    /// `Σ |a_P|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|a| a.abs()).sum()
    }

    /// `⟨0…0|O|0…0⟩`: only strings of I and Z survive, each with value +1.
    pub fn expectation_zero(&self) -> f64 {
        sum_sorted(self.terms.iter().filter(|(p, _)| p.is_diagonal()))
    }

    /// `⟨+…+|O|+…+⟩`: only strings of I and X survive.
    pub fn expectation_plus(&self) -> f64 {
        sum_sorted(self.terms.iter().filter(|(p, _)| p.is_x_type()))
    }

    /// True when every pair of terms in the two operators is compatible with `[A, B] = 0`,
    /// checked exactly on the product expansion.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        check_dim(self.n, other.n)?;
        let mut comm: FxHashMap<PauliString, f64> = FxHashMap::default();
        for (p, a) in self.iter() {
            for (q, b) in other.iter() {
                if p.anticommutes_unchecked(q) {
                    let (k, r) = p.mul_unchecked(q);
                    let s = if k == 1 { 1.0 } else { -1.0 };
                    *comm.entry(r).or_insert(0.0) += 2.0 * s * a * b;
                }
            }
        }
        Ok(comm.values().all(|v| v.abs() < 1e-12))
    }

    /// One line per term, `<coeff> <string>`, canonically ordered.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (p, a) in self.sorted_terms() {
            let _ = writeln!(out, "{a:e} {p}");
        }
        out
    }

    /// Inverse of [`SparseOperator::dump`].
    pub fn parse_dump(n: usize, text: &str) -> Result<Self> {
        let mut op = Self::new(n);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(c), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected `<coeff> <string>`", lineno + 1)));
            };
            let a: f64 = c
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad coefficient `{c}`", lineno + 1)))?;
            op.add_term(s.parse()?, a)?;
        }
        Ok(op)
    }
}

/// Sum in canonical key order so results do not depend on hash layout.
fn sum_sorted<'a>(it: impl Iterator<Item = (&'a PauliString, &'a f64)>) -> f64 {
    let mut v: Vec<_> = it.collect();
    v.sort_by(|a, b| a.0.cmp(b.0));
    v.into_iter().map(|(_, a)| *a).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::tests::{arb_pauli, dense};
    use num_complex::Complex64 as C;
    use proptest::prelude::*;

    fn op(terms: &[(f64, &str)]) -> SparseOperator {
        SparseOperator::from_strs(terms).unwrap()
    }

    fn dense_expectation(o: &SparseOperator, psi: &[C]) -> f64 {
        let mut acc = C::new(0.0, 0.0);
        for (p, a) in o.iter() {
            let m = dense(p);
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    acc += psi[i].conj() * v * psi[j] * a;
                }
            }
        }
        assert!(acc.im.abs() < 1e-12);
        acc.re
    }

    fn arb_op(n: usize) -> impl Strategy<Value = SparseOperator> {
        proptest::collection::vec((arb_pauli(n), -2.0f64..2.0), 1..12)
            .prop_map(move |t| SparseOperator::from_terms(n, t).unwrap())
    }

    #[test]
    fn truncate_examples() {
        let o = op(&[(0.5, "XI"), (1e-4, "YZ")]);
        assert_eq!(o.truncate(1e-3).unwrap(), op(&[(0.5, "XI")]));
        assert_eq!(o.truncate(0.0).unwrap(), o);
        let tie = op(&[(1e-3, "Z")]);
        assert!(tie.truncate(1e-3).unwrap().is_empty());
        assert!(o.truncate(-1.0).is_err());
        assert!(o.truncate(f64::NAN).is_err());
    }

    #[test]
    fn merging_and_cancellation() {
        let mut o = op(&[(0.25, "XZ")]);
        o.add_term("XZ".parse().unwrap(), -0.25).unwrap();
        assert!(o.is_empty());
        assert!(o.add_term("X".parse().unwrap(), 1.0).is_err());
        assert!(o
            .add_term("XX".parse().unwrap(), f64::INFINITY)
            .is_err());
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(op(&[(0.7, "ZZ")]).expectation_zero(), 0.7);
        assert_eq!(op(&[(1.0, "XI")]).expectation_zero(), 0.0);
        assert_eq!(op(&[(1.0, "X")]).expectation_plus(), 1.0);
        assert_eq!(op(&[(1.0, "Z")]).expectation_plus(), 0.0);
    }

    #[test]
    fn dump_round_trip() {
        let o = op(&[(0.1, "XYZ"), (-3.0, "ZII"), (1e-17, "IIY")]);
        let text = o.dump();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(SparseOperator::parse_dump(3, &text).unwrap(), o);
        let order: Vec<&str> = text.lines().map(|l| l.split(' ').nth(1).unwrap()).collect();
        assert_eq!(order, ["ZII", "IIY", "XYZ"]);
    }

    proptest! {
        #[test]
        fn prop_expectations_match_dense(o in arb_op(4)) {
            let d = 16;
            let mut zero = vec![C::new(0.0, 0.0); d];
            zero[0] = C::new(1.0, 0.0);
            let plus = vec![C::new(0.25, 0.0); d];
            prop_assert!((o.expectation_zero() - dense_expectation(&o, &zero)).abs() < 1e-12);
            prop_assert!((o.expectation_plus() - dense_expectation(&o, &plus)).abs() < 1e-12);
        }

        #[test]
        fn prop_truncate_idempotent(o in arb_op(5), d in 0.0f64..1.5) {
            let once = o.truncate(d).unwrap();
            prop_assert_eq!(once.truncate(d).unwrap(), once.clone());
            prop_assert!(once.norm_sq() <= o.norm_sq());
        }

        #[test]
        fn prop_expectation_linear(a in arb_op(4), b in arb_op(4), s in -3.0f64..3.0) {
            let sum = a.add(&b.scale(s)).unwrap();
            let lhs = sum.expectation_zero();
            let rhs = a.expectation_zero() + s * b.expectation_zero();
            prop_assert!((lhs - rhs).abs() < 1e-12);
            let lhs = sum.expectation_plus();
            let rhs = a.expectation_plus() + s * b.expectation_plus();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
