//! Symplectic Pauli strings.
//!
//! A string on `n` qubits is stored as two bit masks. Bit `j` of `x` is set
//! for X or Y on qubit `j`, bit `j` of `z` for Z or Y. The textual form lists
//! qubit 0 first, so `"XZ"` is X on qubit 0 and Z on qubit 1.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{check_dim, Error, Result};

/// Mask storage, inline up to 128 qubits.
pub type Words = SmallVec<[u64; 2]>;

/// Single-qubit Pauli letter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(p, q)| (p & q).count_ones()).sum()
}

/// An `n`-qubit Pauli string without phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Words,
    z: Words,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: smallvec![0; w],
            z: smallvec![0; w],
        }
    }

    /// Build from explicit masks. Bits at positions `>= n` must be clear.
    pub fn from_masks(n: usize, x: &[u64], z: &[u64]) -> Result<Self> {
        let w = words_for(n);
        if x.len() != w || z.len() != w {
            return Err(Error::Parameter(format!(
                "expected {w} mask words for {n} qubits"
            )));
        }
        let s = Self {
            n,
            x: x.into(),
            z: z.into(),
        };
        if !s.high_bits_clear() {
            return Err(Error::Parameter("mask bits set beyond qubit count".into()));
        }
        Ok(s)
    }

    /// Pauli string with the given letters at the given sites.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in sites {
            if q >= n {
                return Err(Error::Parameter(format!("site {q} out of range for {n} qubits")));
            }
            if s.letter(q) != Pauli::I {
                return Err(Error::Parameter(format!("site {q} given twice")));
            }
            s.set(q, p);
        }
        Ok(s)
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        Self::from_sites(n, &[(q, p)])
    }

    /// Parse the site-indexed form, e.g. `"Z10 Z12 Y13 X21"`.
    /// An empty string or `"I"` gives the identity.
    pub fn parse_sparse(n: usize, text: &str) -> Result<Self> {
        let mut sites = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let letter = chars
                .next()
                .and_then(Pauli::from_char)
                .ok_or_else(|| Error::Parse(format!("bad Pauli token `{tok}`")))?;
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad site index in `{tok}`")))?;
            sites.push((q, letter));
        }
        Self::from_sites(n, &sites)
    }

    /// Site-indexed form, e.g. `"Z10 Z12 Y13 X21"`. The identity prints as `"I"`.
    pub fn to_sparse_string(&self) -> String {
        if self.is_identity() {
            return "I".into();
        }
        self.support()
            .into_iter()
            .map(|q| format!("{}{}", self.letter(q).as_char(), q))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn high_bits_clear(&self) -> bool {
        let rem = self.n % 64;
        if rem == 0 && self.n > 0 {
            return true;
        }
        let last = self.x.len() - 1;
        let mask = if self.n == 0 { u64::MAX } else { !0u64 << rem };
        self.x[last] & mask == 0 && self.z[last] & mask == 0
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    #[inline]
    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "site {q} out of range");
        let (x, z) = p.bits();
        self.set_bits(q, x, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// True when the string contains only I and Z.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// True when the string contains only I and X.
    pub fn is_x_type(&self) -> bool {
        self.z.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = a | b;
            while m != 0 {
                let t = m.trailing_zeros() as usize;
                out.push(w * 64 + t);
                m &= m - 1;
            }
        }
        out
    }

    /// Number of Y letters; the phase of `X^x Z^z` relative to the string is `i^ny`.
    #[inline]
    pub fn y_count(&self) -> u32 {
        popcount_and(&self.x, &self.z)
    }

    #[inline]
    pub(crate) fn anticommutes_unchecked(&self, other: &Self) -> bool {
        let s = popcount_and(&self.x, &other.z) + popcount_and(&self.z, &other.x);
        s & 1 == 1
    }

    /// Product `self · other = i^k · r`, without a size check.
    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> (u8, Self) {
        let x: Words = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z: Words = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let k = self.y_count() as i64 + other.y_count() as i64
            + 2 * popcount_and(&self.z, &other.x) as i64
            - popcount_and(&x, &z) as i64;
        (k.rem_euclid(4) as u8, Self { n: self.n, x, z })
    }

    /// Whether the two strings commute.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        check_dim(self.n, other.n)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    /// Product `self · other = i^k · r`, returning `(k mod 4, r)`.
    pub fn multiply(&self, other: &Self) -> Result<(u8, Self)> {
        check_dim(self.n, other.n)?;
        Ok(self.mul_unchecked(other))
    }

    /// Embed into a larger register, keeping site indices.
    pub fn extend(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: n,
            });
        }
        let mut s = Self::identity(n);
        for q in self.support() {
            s.set(q, self.letter(q));
        }
        Ok(s)
    }

    pub(crate) fn map_masks(&self, mut f: impl FnMut(&mut Words, &mut Words)) -> Self {
        let mut s = self.clone();
        f(&mut s.x, &mut s.z);
        s
    }
}

fn cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_words(&self.z, &other.z))
            .then_with(|| cmp_words(&self.x, &other.x))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.chars().count();
        let mut p = Self::identity(n);
        for (q, c) in s.chars().enumerate() {
            let letter =
                Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter `{c}`")))?;
            p.set(q, letter);
        }
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
