//! Diagonal of the Smith normal form over the integers, for sparse matrices.
//!
//! Works on the matrix as a list of sparse vectors. Pivots are chosen with
//! the smallest absolute value first and the smallest Markowitz cost among
//! those. Every pivot is reduced fully: its coordinate is cleared from all
//! other vectors by vector operations, then its vector is cleared by
//! coordinate operations, restarting on any nonzero remainder (which is
//! strictly smaller than the pivot). Unit pivots are taken from a
//! coordinate-count heap; the rest by a global scan.
//!
//! Arithmetic starts in `i64` with overflow checks and restarts in
//! arbitrary precision when an entry leaves that range.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug)]
struct Overflow;

trait SnfInt: Clone + Debug + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    /// `(q, r)` with `self = q * d + r` and `|r| < |d|`.
    fn div_rem_euclid(&self, d: &Self) -> Result<(Self, Self), Overflow>;
    /// `self - q * b`.
    fn sub_mul(&self, q: &Self, b: &Self) -> Result<Self, Overflow>;
    fn to_biguint_abs(&self) -> BigUint;
}

impl SnfInt for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn div_rem_euclid(&self, d: &Self) -> Result<(Self, Self), Overflow> {
        let q = self.checked_div_euclid(*d).ok_or(Overflow)?;
        let r = self.checked_rem_euclid(*d).ok_or(Overflow)?;
        Ok((q, r))
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Result<Self, Overflow> {
        q.checked_mul(*b)
            .and_then(|m| self.checked_sub(m))
            .ok_or(Overflow)
    }
    fn to_biguint_abs(&self) -> BigUint {
        BigUint::from(self.unsigned_abs())
    }
}

impl SnfInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn div_rem_euclid(&self, d: &Self) -> Result<(Self, Self), Overflow> {
        let (q, r) = self.div_mod_floor(d);
        Ok((q, r))
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Result<Self, Overflow> {
        Ok(self - q * b)
    }
    fn to_biguint_abs(&self) -> BigUint {
        self.abs().to_biguint().expect("absolute value is nonnegative")
    }
}

/// Absolute values of the nonzero diagonal entries of a diagonal matrix
/// equivalent to the input (not yet in divisibility-chain form).
///
/// `vectors` are sparse integer vectors over `dim` coordinates.
pub fn smith_diagonal(dim: usize, vectors: &[Vec<(u32, i64)>]) -> Vec<BigUint> {
    match Eliminator::<i64>::new(dim, vectors).run() {
        Ok(d) => d,
        Err(Overflow) => Eliminator::<BigInt>::new(dim, vectors)
            .run()
            .expect("arbitrary precision cannot overflow"),
    }
}

/// Invariant factors `d_1 | d_2 | ...` of `⊕ Z/d_i`, dropping trivial ones.
pub fn invariant_factors(diagonal: &[BigUint]) -> Vec<BigUint> {
    let mut d: Vec<BigUint> = diagonal.iter().filter(|x| !x.is_one()).cloned().collect();
    d.sort();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = &d[i] / &g * &d[j];
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d.retain(|x| !x.is_one());
    d
}

struct Eliminator<T> {
    vecs: Vec<Vec<(u32, T)>>,
    alive: Vec<bool>,
    holders: Vec<Vec<u32>>,
    count: Vec<u32>,
    done: Vec<bool>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
    diagonal: Vec<BigUint>,
}

impl<T: SnfInt> Eliminator<T> {
    fn new(dim: usize, input: &[Vec<(u32, i64)>]) -> Self {
        let mut holders = vec![Vec::new(); dim];
        let mut count = vec![0u32; dim];
        let mut vecs = Vec::with_capacity(input.len());
        let mut alive = Vec::with_capacity(input.len());
        for (i, v) in input.iter().enumerate() {
            let mut v: Vec<(u32, T)> = v
                .iter()
                .filter(|&&(_, x)| x != 0)
                .map(|&(c, x)| (c, T::from_i64(x)))
                .collect();
            v.sort_unstable_by_key(|e| e.0);
            for &(c, _) in &v {
                holders[c as usize].push(i as u32);
                count[c as usize] += 1;
            }
            alive.push(!v.is_empty());
            vecs.push(v);
        }
        let heap = count
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(c, &k)| Reverse((k, c as u32)))
            .collect();
        Eliminator {
            vecs,
            alive,
            holders,
            count,
            done: vec![false; dim],
            heap,
            diagonal: Vec::new(),
        }
    }

    fn entry(&self, v: u32, c: u32) -> Option<&T> {
        let vec = &self.vecs[v as usize];
        vec.binary_search_by_key(&c, |e| e.0).ok().map(|i| &vec[i].1)
    }

    fn live_holders(&mut self, c: u32) -> Vec<u32> {
        let mut list = std::mem::take(&mut self.holders[c as usize]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&v| self.alive[v as usize] && self.entry(v, c).is_some());
        self.holders[c as usize] = list.clone();
        list
    }

    fn bump(&mut self, c: u32, delta: i32) {
        let k = &mut self.count[c as usize];
        *k = (*k as i32 + delta) as u32;
        if *k > 0 && !self.done[c as usize] {
            self.heap.push(Reverse((*k, c)));
        }
    }

    fn run(mut self) -> Result<Vec<BigUint>, Overflow> {
        // unit pivots, cheapest coordinate first
        while let Some(Reverse((k, c))) = self.heap.pop() {
            if self.done[c as usize] || self.count[c as usize] != k || k == 0 {
                continue;
            }
            let holders = self.live_holders(c);
            let best = holders
                .iter()
                .filter(|&&v| self.entry(v, c).is_some_and(T::is_unit))
                .min_by_key(|&&v| (self.vecs[v as usize].len(), v))
                .copied();
            if let Some(v) = best {
                self.reduce(v, c)?;
            }
        }
        // whatever is left: smallest entry, then cheapest
        while let Some((v, c)) = self.scan_pivot() {
            self.reduce(v, c)?;
        }
        Ok(self.diagonal)
    }

    fn scan_pivot(&self) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32, &T, usize)> = None;
        for (v, vec) in self.vecs.iter().enumerate() {
            if !self.alive[v] {
                continue;
            }
            for (c, x) in vec {
                let cost = (self.count[*c as usize] as usize - 1) * (vec.len() - 1);
                let better = match best {
                    None => true,
                    Some((_, _, bx, bcost)) => match x.cmp_abs(bx) {
                        Ordering::Less => true,
                        Ordering::Equal => cost < bcost,
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((v as u32, *c, x, cost));
                }
            }
        }
        best.map(|(v, c, _, _)| (v, c))
    }

    /// Isolates a pivot starting from `(v, c)` and records it.
    fn reduce(&mut self, mut v: u32, mut c: u32) -> Result<(), Overflow> {
        'outer: loop {
            let pivot_val = self.entry(v, c).expect("pivot present").clone();
            for w in self.live_holders(c) {
                if w == v {
                    continue;
                }
                let (q, _) = self.entry(w, c).expect("holder").div_rem_euclid(&pivot_val)?;
                self.sub_multiple(w, &q, v)?;
                if let Some(r) = self.entry(w, c) {
                    if !r.is_zero() {
                        v = w;
                        continue 'outer;
                    }
                }
            }
            // c is held by v alone; coordinate operations clear the rest of v
            let mut smallest: Option<(u32, T)> = None;
            let entries = std::mem::take(&mut self.vecs[v as usize]);
            let mut kept = Vec::with_capacity(entries.len());
            for (k, x) in entries {
                if k == c {
                    kept.push((k, x));
                    continue;
                }
                let (_, r) = x.div_rem_euclid(&pivot_val)?;
                if r.is_zero() {
                    self.bump(k, -1);
                } else {
                    if smallest.as_ref().is_none_or(|(_, s)| r.cmp_abs(s).is_lt()) {
                        smallest = Some((k, r.clone()));
                    }
                    kept.push((k, r));
                }
            }
            self.vecs[v as usize] = kept;
            if let Some((k, _)) = smallest {
                c = k;
                continue;
            }
            self.diagonal.push(pivot_val.to_biguint_abs());
            self.vecs[v as usize].clear();
            self.alive[v as usize] = false;
            self.bump(c, -1);
            self.done[c as usize] = true;
            self.holders[c as usize] = Vec::new();
            return Ok(());
        }
    }

    /// `vecs[w] -= q * vecs[v]`.
    fn sub_multiple(&mut self, w: u32, q: &T, v: u32) -> Result<(), Overflow> {
        if q.is_zero() {
            return Ok(());
        }
        let target = std::mem::take(&mut self.vecs[w as usize]);
        let pivot = std::mem::take(&mut self.vecs[v as usize]);
        let mut out = Vec::with_capacity(target.len() + pivot.len());
        let zero = T::from_i64(0);
        let (mut i, mut j) = (0, 0);
        let result = loop {
            if i == target.len() && j == pivot.len() {
                break Ok(());
            }
            let tc = target.get(i).map_or(u32::MAX, |e| e.0);
            let pc = pivot.get(j).map_or(u32::MAX, |e| e.0);
            match tc.cmp(&pc) {
                Ordering::Less => {
                    out.push(target[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let val = match zero.sub_mul(q, &pivot[j].1) {
                        Ok(x) => x,
                        Err(e) => break Err(e),
                    };
                    out.push((pc, val));
                    self.holders[pc as usize].push(w);
                    self.bump(pc, 1);
                    j += 1;
                }
                Ordering::Equal => {
                    let val = match target[i].1.sub_mul(q, &pivot[j].1) {
                        Ok(x) => x,
                        Err(e) => break Err(e),
                    };
                    if val.is_zero() {
                        self.bump(tc, -1);
                    } else {
                        out.push((tc, val));
                    }
                    i += 1;
                    j += 1;
                }
            }
        };
        self.vecs[v as usize] = pivot;
        result?;
        if out.is_empty() {
            self.alive[w as usize] = false;
        }
        self.vecs[w as usize] = out;
        Ok(())
    }
}
