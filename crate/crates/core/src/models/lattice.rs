use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;

const HEAVY_HEX_127: &str = include_str!("../../data/heavy_hex_127.txt");

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Chain,
    Square,
    HeavyHex,
    Honeycomb,
}

/// Bond label: untyped `ZZ` coupling for Ising models, or the Kitaev bond type.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondKind {
    Ising,
    X,
    Y,
    Z,
}

impl BondKind {
    /// Pauli letter carried by both ends of the bond.
    pub fn pauli(self) -> Pauli {
        match self {
            BondKind::Ising | BondKind::Z => Pauli::Z,
            BondKind::X => Pauli::X,
            BondKind::Y => Pauli::Y,
        }
    }

    fn token(self) -> &'static str {
        match self {
            BondKind::Ising => "ising",
            BondKind::X => "x",
            BondKind::Y => "y",
            BondKind::Z => "z",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "ising" | "zz" => Some(BondKind::Ising),
            "x" => Some(BondKind::X),
            "y" => Some(BondKind::Y),
            "z" => Some(BondKind::Z),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub kind: BondKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    kind: LatticeKind,
    nx: usize,
    ny: usize,
    n: usize,
    bonds: Vec<Bond>,
}

impl Lattice {
    /// Periodic chain with bonds `(j, j+1 mod n)`.
    pub fn chain(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("chain needs at least 3 sites, got {n}")));
        }
        let bonds = (0..n)
            .map(|j| Bond {
                a: j,
                b: (j + 1) % n,
                kind: BondKind::Ising,
            })
            .collect();
        Ok(Self {
            kind: LatticeKind::Chain,
            nx: n,
            ny: 1,
            n,
            bonds,
        })
    }

    /// Periodic `nx × ny` square lattice, sites `r·nx + c`. Horizontal bonds
    /// come first, then vertical ones.
    pub fn square(nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::Parameter(format!(
                "square lattice needs both sides at least 3, got {nx}×{ny}"
            )));
        }
        let site = |r: usize, c: usize| (r % ny) * nx + (c % nx);
        let mut bonds = Vec::with_capacity(2 * nx * ny);
        for r in 0..ny {
            for c in 0..nx {
                bonds.push(Bond {
                    a: site(r, c),
                    b: site(r, c + 1),
                    kind: BondKind::Ising,
                });
            }
        }
        for r in 0..ny {
            for c in 0..nx {
                bonds.push(Bond {
                    a: site(r, c),
                    b: site(r + 1, c),
                    kind: BondKind::Ising,
                });
            }
        }
        Ok(Self {
            kind: LatticeKind::Square,
            nx,
            ny,
            n: nx * ny,
            bonds,
        })
    }

    /// The 127-qubit heavy-hex coupling map with open boundaries.
    pub fn heavy_hex() -> Self {
        let mut lat = Self::from_edge_list(LatticeKind::HeavyHex, HEAVY_HEX_127)
            .expect("bundled heavy-hex edge list is valid");
        lat.n = 127;
        lat.nx = 127;
        lat
    }

    /// Kitaev honeycomb drawn on a periodic `nx × ny` square grid.
    ///
    /// Each row is a chain of alternating x and y bonds; the bond from
    /// `(r, c)` to `(r, c+1)` is an x bond when `c` and `r` have equal
    /// parity. Vertical z bonds join `(r, c)` to `(r+1, c)` for `c ≡ r (mod 2)`.
    /// Bonds are stored with the left or upper site first.
    pub fn honeycomb(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::Parameter(format!(
                "honeycomb torus needs even dimensions, got {nx}×{ny}"
            )));
        }
        let site = |r: usize, c: usize| (r % ny) * nx + (c % nx);
        let mut bonds = Vec::with_capacity(3 * nx * ny / 2);
        for r in 0..ny {
            for c in 0..nx {
                let kind = if c % 2 == r % 2 { BondKind::X } else { BondKind::Y };
                bonds.push(Bond {
                    a: site(r, c),
                    b: site(r, c + 1),
                    kind,
                });
            }
        }
        for r in 0..ny {
            for c in (r % 2..nx).step_by(2) {
                bonds.push(Bond {
                    a: site(r, c),
                    b: site(r + 1, c),
                    kind: BondKind::Z,
                });
            }
        }
        Ok(Self {
            kind: LatticeKind::Honeycomb,
            nx,
            ny,
            n: nx * ny,
            bonds,
        })
    }

    /// Parse `u v type` lines; `#` starts a comment.
    pub fn from_edge_list(kind: LatticeKind, text: &str) -> Result<Self> {
        let mut bonds = Vec::new();
        let mut n = 0;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("edge list line {}: `{line}`", i + 1));
            if f.len() != 3 {
                return Err(bad());
            }
            let a: usize = f[0].parse().map_err(|_| bad())?;
            let b: usize = f[1].parse().map_err(|_| bad())?;
            let kind = BondKind::from_token(f[2]).ok_or_else(bad)?;
            if a == b {
                return Err(bad());
            }
            n = n.max(a + 1).max(b + 1);
            bonds.push(Bond { a, b, kind });
        }
        Ok(Self {
            kind,
            nx: n,
            ny: 1,
            n,
            bonds,
        })
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for b in &self.bonds {
            out.push_str(&format!("{} {} {}\n", b.a, b.b, b.kind.token()));
        }
        out
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bonds_of(&self, kind: BondKind) -> impl Iterator<Item = &Bond> {
        self.bonds.iter().filter(move |b| b.kind == kind)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for b in &self.bonds {
            d[b.a] += 1;
            d[b.b] += 1;
        }
        d
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} lattice, {} sites, {} bonds", self.kind, self.n, self.bonds.len())
    }
}
