//! Dense reference implementations and small-complex generators shared by
//! the integration tests. Deliberately naive and independent of the library's
//! elimination code.

#![allow(dead_code)]

use lmtopo::collapse::one_round_collapse;
use lmtopo::homology::{boundary2, connected_components};
use lmtopo::sampler::{sample, SampleSpec};
use lmtopo::Complex2;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

pub fn all_triples(n: usize) -> Vec<[u64; 3]> {
    let n = n as u64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// A complex on `3..=n_max` vertices with an arbitrary face set.
pub fn small_complex(n_max: usize) -> impl Strategy<Value = Complex2> {
    (3..=n_max).prop_flat_map(|n| {
        let t = all_triples(n);
        proptest::collection::vec(any::<bool>(), t.len()).prop_map(move |keep| {
            let faces = t.iter().zip(&keep).filter(|(_, k)| **k).map(|(f, _)| *f);
            Complex2::new(n, faces).unwrap()
        })
    })
}

/// Like [`small_complex`], sometimes with edges removed by a collapse round.
pub fn small_complex_any_skeleton(n_max: usize) -> impl Strategy<Value = Complex2> {
    (small_complex(n_max), any::<bool>())
        .prop_map(|(c, thin)| if thin { one_round_collapse(&c) } else { c })
}

/// Deterministic stream of random complexes for fixed-count loops.
pub fn random_complex(index: u64, n_max: usize) -> Complex2 {
    let n = 3 + (index as usize * 7919) % (n_max - 2);
    let p = 0.1 + 0.8 * ((index * 2654435761) % 1000) as f64 / 1000.0;
    let c = sample(&SampleSpec::with_p(n, p, index ^ 0x5eed)).unwrap();
    if index % 3 == 0 {
        one_round_collapse(&c)
    } else {
        c
    }
}

pub fn dense_boundary(c: &Complex2) -> Vec<Vec<BigInt>> {
    boundary2(c)
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect()
}

/// Rank over `Q`: integer elimination by cross-multiplication, each row
/// divided by its content to keep entries small.
pub fn rank_rational(mut a: Vec<Vec<BigInt>>) -> usize {
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let lead = row[col].clone();
            for k in 0..cols {
                row[k] = &row[k] * &pivot_row[col] - &lead * &pivot_row[k];
            }
            let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in row.iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank_mod(a: &[Vec<BigInt>], p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| u64::try_from(x.mod_floor(&pb)).unwrap())
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = modpow(m[rank][col], p - 2, p);
        for r in rank + 1..m.len() {
            let f = m[r][col] * inv % p;
            if f == 0 {
                continue;
            }
            for k in col..cols {
                m[r][k] = (m[r][k] + p - f * m[rank][k] % p) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn modpow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// Smith normal form diagonal (nonzero entries, in divisibility order),
/// computed with 2x2 Bezout transformations.
pub fn smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .find(|&(r, c)| !a[r][c].is_zero())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut changed = false;
            // clear column t below the pivot
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let (x, y) = (a[t][t].clone(), a[r][t].clone());
                let (g, s, u) = bezout(&x, &y);
                let (xg, yg) = (&x / &g, &y / &g);
                for k in t..cols {
                    let (top, bot) = (a[t][k].clone(), a[r][k].clone());
                    a[t][k] = &s * &top + &u * &bot;
                    a[r][k] = &xg * &bot - &yg * &top;
                }
                changed = true;
            }
            // clear row t right of the pivot
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let (x, y) = (a[t][t].clone(), a[t][c].clone());
                let (g, s, u) = bezout(&x, &y);
                let (xg, yg) = (&x / &g, &y / &g);
                for row in a.iter_mut().skip(t) {
                    let (left, right) = (row[t].clone(), row[c].clone());
                    row[t] = &s * &left + &u * &right;
                    row[c] = &xg * &right - &yg * &left;
                }
                changed = true;
            }
            if changed {
                continue;
            }
            // divisibility: fold any offending row into row t and repeat
            let d = a[t][t].clone();
            match (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !(&a[r][c] % &d).is_zero())) {
                Some(r) => {
                    for k in t..cols {
                        let v = a[r][k].clone();
                        a[t][k] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// `(g, s, u)` with `s*x + u*y = g = gcd(x, y)`, and `(x, 1, 0)` when `x | y`
/// so that an already-dividing pivot is left untouched.
fn bezout(x: &BigInt, y: &BigInt) -> (BigInt, BigInt, BigInt) {
    if (y % x).is_zero() {
        return (x.clone(), BigInt::one(), BigInt::zero());
    }
    let e = x.extended_gcd(y);
    (e.gcd, e.x, e.y)
}

/// Invariant factors greater than one, as `u64`.
pub fn torsion(c: &Complex2) -> Vec<u64> {
    smith_diagonal(dense_boundary(c))
        .into_iter()
        .filter(|d| !d.is_one())
        .map(|d| u64::try_from(d).unwrap())
        .collect()
}

/// Betti numbers `[β₀, β₁, β₂]` over `Q` (`p = None`) or `GF(p)`.
pub fn betti_dense(c: &Complex2, p: Option<u64>) -> [usize; 3] {
    let m = dense_boundary(c);
    let r2 = match p {
        None => rank_rational(m),
        Some(p) => rank_mod(&m, p),
    };
    let b0 = components(c);
    assert_eq!(b0, connected_components(c));
    [b0, c.f1() - (c.f0() - b0) - r2, c.f2() - r2]
}

/// Components by depth-first search over present edges.
fn components(c: &Complex2) -> usize {
    let n = c.n();
    let mut adj = vec![Vec::new(); n];
    for e in c.edges() {
        adj[e.lo() as usize].push(e.hi() as usize);
        adj[e.hi() as usize].push(e.lo() as usize);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}
