//! Brute-force cross-checks on small complexes.
//!
//! Dense textbook linear algebra (Bareiss elimination, naive Smith form)
//! against the sparse pipeline, plus order independence of full collapses
//! and the Euler identity. Intended for `n <= 8` or so.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::collapse::{collapse_fully, collapse_fully_randomized, one_round_collapse};
use crate::complex::{Complex2, Face};
use crate::homology::{betti, boundary2, connected_components, h1_torsion, Coefficients};
use crate::sampler::{derive_trial_seed, sample, SampleSpec};

/// Rank over `Q` by fraction-free elimination.
pub fn dense_rank_rational(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..rows {
            for k in col + 1..cols {
                let v = a[rank][col]
                    .checked_mul(a[r][k])
                    .and_then(|x| x.checked_sub(a[r][col].checked_mul(a[rank][k])?))
                    .expect("oracle entries stay small");
                a[r][k] = v / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    rank
}

/// Rank over `GF(p)` by plain Gaussian elimination.
pub fn dense_rank_mod_p(m: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let inv = |x: i64| {
        let (mut r, mut e, mut b) = (1i64, p - 2, x);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let s = inv(a[rank][col]);
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col] * s % p;
                for k in col..cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Invariant factors greater than one, by the textbook Smith algorithm.
pub fn dense_torsion(m: &[Vec<i64>]) -> Vec<u64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the remaining block
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| a[r][c] != 0)
            .min_by_key(|&(r, c)| a[r][c].abs())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut clean = true;
            for r in t + 1..rows {
                let q = a[r][t].div_euclid(a[t][t]);
                if q != 0 {
                    for k in t..cols {
                        a[r][k] -= q * a[t][k];
                    }
                }
                if a[r][t] != 0 {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                let q = a[t][c].div_euclid(a[t][t]);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[c] -= q * row[t];
                    }
                }
                if a[t][c] != 0 {
                    clean = false;
                }
            }
            if clean {
                // the pivot must divide the whole block
                if let Some(r) = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| a[r][c] % a[t][t] != 0)) {
                    for k in t..cols {
                        a[t][k] += a[r][k];
                    }
                    continue;
                }
                break;
            }
            // move the smallest nonzero of row/column t onto the diagonal
            let (r, c) = (t..rows)
                .map(|r| (r, t))
                .chain((t..cols).map(|c| (t, c)))
                .filter(|&(r, c)| a[r][c] != 0)
                .min_by_key(|&(r, c)| a[r][c].abs())
                .expect("pivot is nonzero");
            a.swap(t, r);
            for row in a.iter_mut() {
                row.swap(t, c);
            }
        }
        diag.push(a[t][t].unsigned_abs() as u64);
    }
    diag.into_iter().filter(|&d| d > 1).collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub complexes: usize,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Dense Betti numbers for the given coefficients, `None` meaning `Q`.
pub fn dense_betti(c: &Complex2, p: Option<i64>) -> [usize; 3] {
    let m = boundary2(c).to_dense();
    let rank2 = match p {
        None => dense_rank_rational(&m),
        Some(p) => dense_rank_mod_p(&m, p),
    };
    let b0 = connected_components(c);
    let rank1 = c.f0() - b0;
    [b0, c.f1() - rank1 - rank2, c.f2() - rank2]
}

/// Runs `iters` random complexes with `3 <= n <= n_max` through every check.
pub fn oracle_check(n_max: usize, iters: usize, seed: u64) -> OracleReport {
    let mut report = OracleReport::default();
    for i in 0..iters {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_trial_seed(seed, i as u64));
        let n = rng.gen_range(3..=n_max.max(3));
        let p = rng.gen_range(0.05..0.95);
        let y = sample(&SampleSpec::with_p(n, p, rng.gen())).expect("valid spec");
        // half of the cases drop some edges, to exercise disconnected skeleta
        let c = if rng.gen_bool(0.5) { one_round_collapse(&y) } else { y };
        report.complexes += 1;
        let mut miss = |what: String| report.mismatches.push(format!("case {i} (n={n}): {what}"));

        for (k, p) in [(Coefficients::Rationals, None), (Coefficients::F2, Some(2))] {
            let sparse = betti(&c, k).expect("valid coefficients").betti;
            let dense = dense_betti(&c, p);
            if sparse != dense {
                miss(format!("betti over {k}: sparse {sparse:?}, dense {dense:?}"));
            }
            let chi = sparse[0] as i64 - sparse[1] as i64 + sparse[2] as i64;
            if chi != c.euler_characteristic() {
                miss(format!("euler over {k}: {chi} vs {}", c.euler_characteristic()));
            }
        }
        let torsion: Vec<u64> = h1_torsion(&c)
            .iter()
            .map(|x: &BigUint| u64::try_from(x).expect("small"))
            .collect();
        let dense_t = dense_torsion(&boundary2(&c).to_dense());
        if torsion != dense_t {
            miss(format!("torsion: sparse {torsion:?}, dense {dense_t:?}"));
        }

        let terminal: BTreeSet<Face> = collapse_fully(&c).0.faces().iter().copied().collect();
        for _ in 0..20 {
            let (r, _) = collapse_fully_randomized(&c, &mut rng);
            let other: BTreeSet<Face> = r.faces().iter().copied().collect();
            if other != terminal {
                miss("collapse order changed the terminal faces".into());
                break;
            }
        }
    }
    report
}
