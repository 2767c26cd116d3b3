//! Homology of 2-complexes: Betti numbers over `Q` and prime fields, and
//! torsion of `H_1` over the integers.
//!
//! `β₀` counts components of the graph of present edges. `β₂ = f₂ - rank ∂₂`
//! and `β₁` follows from rank–nullity on `∂₁`. Rational ranks are taken
//! modulo two fixed 31-bit primes; if they disagree the exact rank comes
//! from the integer Smith normal form.

pub mod boundary;
pub mod field;
pub mod rank;
pub mod snf;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub use boundary::{boundary2, SparseBoundaryMatrix};
pub use field::{is_prime, PrimeField};
pub use rank::EliminationStats;

use crate::collapse::collapse_fully;
use crate::complex::Complex2;
use crate::error::{Error, Result};

/// Primes used for rational ranks, `2^31 - 1` and `2^31 - 19`.
pub const DEFAULT_PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Rationals,
    Prime(u64),
}

impl Coefficients {
    pub const F2: Coefficients = Coefficients::Prime(2);

    pub fn label(&self) -> String {
        match self {
            Coefficients::Rationals => "Q".into(),
            Coefficients::Prime(2) => "F2".into(),
            Coefficients::Prime(p) => format!("F_{p}"),
        }
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for Coefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(Coefficients::Rationals),
            "F2" => Ok(Coefficients::F2),
            _ => s
                .strip_prefix("F_")
                .and_then(|p| p.parse().ok())
                .map(Coefficients::Prime)
                .ok_or_else(|| Error::InvalidSpec(format!("unknown coefficient field `{s}`"))),
        }
    }
}

impl Serialize for Coefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Coefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Betti numbers for one coefficient choice, plus `H_1` torsion when the
/// integer computation was requested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub betti: [usize; 3],
    pub field: Coefficients,
    /// Invariant factors greater than one, as decimal strings.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "torsion_serde")]
    pub torsion: Option<Vec<BigUint>>,
}

impl HomologySummary {
    pub fn betti0(&self) -> usize {
        self.betti[0]
    }
    pub fn betti1(&self) -> usize {
        self.betti[1]
    }
    pub fn betti2(&self) -> usize {
        self.betti[2]
    }
}

pub(crate) mod torsion_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigUint>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(list) => s.collect_seq(list.iter().map(|x| x.to_string())),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigUint>>, D::Error> {
        let list: Option<Vec<String>> = Option::deserialize(d)?;
        list.map(|l| {
            l.iter()
                .map(|x| x.parse::<BigUint>().map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}

/// Rank of `m` over `GF(p)`, `p` a prime below `2^31`.
pub fn rank_mod_p(m: &SparseBoundaryMatrix, p: u64) -> Result<usize> {
    rank_mod_p_with_stats(m, p).map(|(r, _)| r)
}

pub fn rank_mod_p_with_stats(m: &SparseBoundaryMatrix, p: u64) -> Result<(usize, EliminationStats)> {
    let field = PrimeField::new(p)?;
    let vecs = m
        .entries
        .iter()
        .map(|col| col.iter().map(|&(r, s)| (r, field.from_i64(s as i64))).collect())
        .collect();
    Ok(rank::rank_of_vectors(m.nrows(), vecs, field))
}

/// Outcome of the two-prime rational rank protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalRank {
    pub rank: usize,
    pub per_prime: [usize; 2],
    /// Set when the primes disagreed and the integer elimination decided.
    pub exact_fallback: bool,
}

/// Rank over `Q`: modular ranks for both primes, exact if they differ.
pub fn rational_rank(m: &SparseBoundaryMatrix, primes: [u64; 2]) -> Result<RationalRank> {
    if primes[0] == primes[1] {
        return Err(Error::InvalidSpec("the two primes must differ".into()));
    }
    let a = rank_mod_p(m, primes[0])?;
    let b = rank_mod_p(m, primes[1])?;
    if a == b {
        return Ok(RationalRank {
            rank: a,
            per_prime: [a, b],
            exact_fallback: false,
        });
    }
    Ok(RationalRank {
        rank: exact_rank(m),
        per_prime: [a, b],
        exact_fallback: true,
    })
}

/// Rank over `Q` from the integer Smith normal form.
pub fn exact_rank(m: &SparseBoundaryMatrix) -> usize {
    snf::smith_diagonal(m.nrows(), &m.integer_columns()).len()
}

/// Number of connected components of the present-edge graph on all `n` vertices.
pub fn connected_components(c: &Complex2) -> usize {
    let mut uf = UnionFind::new(c.n());
    for e in c.edges() {
        uf.union(e.lo() as usize, e.hi() as usize);
    }
    uf.count()
}

pub fn betti(c: &Complex2, coefficients: Coefficients) -> Result<HomologySummary> {
    let m = boundary2(c);
    let rank2 = match coefficients {
        Coefficients::Rationals => rational_rank(&m, DEFAULT_PRIMES)?.rank,
        Coefficients::Prime(p) => rank_mod_p(&m, p)?,
    };
    Ok(summary_from_rank(c, rank2, coefficients))
}

fn summary_from_rank(c: &Complex2, rank2: usize, field: Coefficients) -> HomologySummary {
    let b0 = connected_components(c);
    let rank1 = c.f0() - b0;
    HomologySummary {
        betti: [b0, c.f1() - rank1 - rank2, c.f2() - rank2],
        field,
        torsion: None,
    }
}

/// [`betti`] of `R_∞(c)`, which has the same homology and is usually much
/// smaller.
pub fn betti_collapsed(c: &Complex2, coefficients: Coefficients) -> Result<HomologySummary> {
    betti(&collapse_fully(c).0, coefficients)
}

/// [`integral_homology`] of `R_∞(c)`.
pub fn integral_homology_collapsed(c: &Complex2) -> HomologySummary {
    integral_homology(&collapse_fully(c).0)
}

/// Invariant factors greater than one of `H_1(c; Z)`.
///
/// `H_1 = ker ∂₁ / im ∂₂` and `ker ∂₁` is a direct summand of the edge
/// chains, so the torsion is read off the Smith form of `∂₂` alone.
pub fn h1_torsion(c: &Complex2) -> Vec<BigUint> {
    let m = boundary2(c);
    snf::invariant_factors(&snf::smith_diagonal(m.nrows(), &m.integer_columns()))
}

/// Rational Betti numbers and torsion from a single integer elimination.
pub fn integral_homology(c: &Complex2) -> HomologySummary {
    let m = boundary2(c);
    let diag = snf::smith_diagonal(m.nrows(), &m.integer_columns());
    let mut s = summary_from_rank(c, diag.len(), Coefficients::Rationals);
    s.torsion = Some(snf::invariant_factors(&diag));
    s
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
    }

    fn count(&self) -> usize {
        self.sets
    }
}
