//! Rank of sparse matrices over prime fields.
//!
//! Elimination runs in two phases. The sparse phase pivots Markowitz-style:
//! zero-fill pivots first (a coordinate held by one vector, or a vector with
//! a single entry), then the coordinate held by the fewest vectors paired
//! with the shortest vector holding it. Once the cheapest pivot would cost
//! more than [`DENSE_SWITCH_COST`] fill operations, the surviving block is
//! copied into a dense matrix and finished there, bit-packed for `p = 2`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::field::PrimeField;

/// Markowitz cost above which the remaining block is finished densely.
const DENSE_SWITCH_COST: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EliminationStats {
    pub sparse_pivots: usize,
    pub dense_rows: usize,
    pub dense_cols: usize,
    pub dense_rank: usize,
}

/// Rank of the span of `vectors`, each a sparse vector `(coordinate, value)`
/// over `dim` coordinates with values already reduced mod `p`.
pub fn rank_of_vectors(
    dim: usize,
    vectors: Vec<Vec<(u32, u32)>>,
    field: PrimeField,
) -> (usize, EliminationStats) {
    let mut elim = SparseEliminator::new(dim, vectors, field);
    elim.run();
    let sparse_rank = elim.rank;
    let (rows, cols) = elim.remaining();
    let mut stats = EliminationStats {
        sparse_pivots: sparse_rank,
        dense_rows: rows.len(),
        dense_cols: cols,
        dense_rank: 0,
    };
    stats.dense_rank = if field.modulus() == 2 {
        dense_rank_f2(&rows, cols)
    } else {
        dense_rank_mod_p(&rows, cols, field)
    };
    (sparse_rank + stats.dense_rank, stats)
}

struct SparseEliminator {
    field: PrimeField,
    vecs: Vec<Vec<(u32, u32)>>,
    alive: Vec<bool>,
    /// Vectors that may hold each coordinate; entries go stale and are
    /// filtered when read.
    holders: Vec<Vec<u32>>,
    count: Vec<u32>,
    done: Vec<bool>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
    singletons: Vec<u32>,
    rank: usize,
    scratch: Vec<(u32, u32)>,
}

impl SparseEliminator {
    fn new(dim: usize, vecs: Vec<Vec<(u32, u32)>>, field: PrimeField) -> Self {
        let mut holders = vec![Vec::new(); dim];
        let mut count = vec![0u32; dim];
        let mut alive = vec![true; vecs.len()];
        let mut singletons = Vec::new();
        let vecs: Vec<Vec<(u32, u32)>> = vecs
            .into_iter()
            .map(|mut v| {
                v.retain(|&(_, x)| x != 0);
                v.sort_unstable_by_key(|&(c, _)| c);
                v
            })
            .collect();
        for (i, v) in vecs.iter().enumerate() {
            if v.is_empty() {
                alive[i] = false;
            }
            if v.len() == 1 {
                singletons.push(i as u32);
            }
            for &(c, _) in v {
                holders[c as usize].push(i as u32);
                count[c as usize] += 1;
            }
        }
        let heap = count
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(c, &k)| Reverse((k, c as u32)))
            .collect();
        SparseEliminator {
            field,
            vecs,
            alive,
            holders,
            count,
            done: vec![false; dim],
            heap,
            singletons,
            rank: 0,
            scratch: Vec::new(),
        }
    }

    fn value_at(&self, v: u32, c: u32) -> Option<u32> {
        let vec = &self.vecs[v as usize];
        vec.binary_search_by_key(&c, |&(k, _)| k)
            .ok()
            .map(|i| vec[i].1)
    }

    /// Live vectors holding coordinate `c`, deduplicated.
    fn live_holders(&mut self, c: u32) -> Vec<u32> {
        let mut list = std::mem::take(&mut self.holders[c as usize]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&v| self.alive[v as usize] && self.value_at(v, c).is_some());
        self.holders[c as usize] = list.clone();
        list
    }

    fn run(&mut self) {
        loop {
            if let Some(v) = self.singletons.pop() {
                if self.alive[v as usize] && self.vecs[v as usize].len() == 1 {
                    let c = self.vecs[v as usize][0].0;
                    let holders = self.live_holders(c);
                    self.pivot(v, c, &holders);
                }
                continue;
            }
            let Some(Reverse((k, c))) = self.heap.pop() else {
                break;
            };
            if self.done[c as usize] || self.count[c as usize] != k || k == 0 {
                continue;
            }
            let holders = self.live_holders(c);
            debug_assert_eq!(holders.len(), k as usize);
            let &v = holders
                .iter()
                .min_by_key(|&&v| (self.vecs[v as usize].len(), v))
                .expect("count > 0");
            let cost = (holders.len() - 1) * (self.vecs[v as usize].len() - 1);
            if cost > DENSE_SWITCH_COST {
                self.heap.push(Reverse((k, c)));
                break;
            }
            self.pivot(v, c, &holders);
        }
    }

    fn set_count(&mut self, c: u32, delta: i32) {
        let k = &mut self.count[c as usize];
        *k = (*k as i32 + delta) as u32;
        if *k > 0 && !self.done[c as usize] {
            self.heap.push(Reverse((*k, c)));
        }
    }

    fn pivot(&mut self, v: u32, c: u32, holders: &[u32]) {
        let f = self.field;
        let pivot_vec = std::mem::take(&mut self.vecs[v as usize]);
        self.alive[v as usize] = false;
        let pv = pivot_vec
            .binary_search_by_key(&c, |&(k, _)| k)
            .map(|i| pivot_vec[i].1)
            .expect("pivot vector holds pivot coordinate");
        let inv = f.inv(pv);
        for &w in holders {
            if w == v {
                continue;
            }
            let wv = self.value_at(w, c).expect("holder");
            let factor = f.mul(wv, inv);
            self.axpy(w, factor, &pivot_vec);
        }
        for &(k, _) in &pivot_vec {
            self.set_count(k, -1);
        }
        self.done[c as usize] = true;
        self.holders[c as usize] = Vec::new();
        self.rank += 1;
    }

    /// `vecs[w] -= factor * pivot`.
    fn axpy(&mut self, w: u32, factor: u32, pivot: &[(u32, u32)]) {
        let f = self.field;
        let target = std::mem::take(&mut self.vecs[w as usize]);
        let mut out = std::mem::take(&mut self.scratch);
        out.clear();
        let (mut i, mut j) = (0, 0);
        while i < target.len() || j < pivot.len() {
            let tc = target.get(i).map_or(u32::MAX, |e| e.0);
            let pc = pivot.get(j).map_or(u32::MAX, |e| e.0);
            if tc < pc {
                out.push(target[i]);
                i += 1;
            } else if pc < tc {
                let val = f.neg(f.mul(factor, pivot[j].1));
                out.push((pc, val));
                self.holders[pc as usize].push(w);
                self.set_count(pc, 1);
                j += 1;
            } else {
                let val = f.sub(target[i].1, f.mul(factor, pivot[j].1));
                if val == 0 {
                    self.set_count(tc, -1);
                } else {
                    out.push((tc, val));
                }
                i += 1;
                j += 1;
            }
        }
        if out.is_empty() {
            self.alive[w as usize] = false;
        } else if out.len() == 1 {
            self.singletons.push(w);
        }
        self.scratch = target;
        self.vecs[w as usize] = out;
    }

    /// Surviving vectors, re-indexed over the surviving coordinates.
    fn remaining(&self) -> (Vec<Vec<(u32, u32)>>, usize) {
        let mut remap = vec![u32::MAX; self.count.len()];
        let mut next = 0u32;
        for (c, &k) in self.count.iter().enumerate() {
            if k > 0 && !self.done[c] {
                remap[c] = next;
                next += 1;
            }
        }
        let rows = self
            .vecs
            .iter()
            .zip(&self.alive)
            .filter(|(v, &a)| a && !v.is_empty())
            .map(|(v, _)| v.iter().map(|&(c, x)| (remap[c as usize], x)).collect())
            .collect();
        (rows, next as usize)
    }
}

/// Gaussian elimination on a dense copy over `GF(p)`.
pub(crate) fn dense_rank_mod_p(rows: &[Vec<(u32, u32)>], cols: usize, field: PrimeField) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let p = field.modulus();
    let mut m: Vec<Vec<u32>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![0u32; cols];
            for &(c, x) in r {
                d[c as usize] = x;
            }
            d
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = field.inv(m[rank][col]) as u64;
        // normalize the pivot row so updates need a single multiply
        for x in &mut m[rank][col..] {
            *x = ((*x as u64 * inv) % p) as u32;
        }
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank][col..];
        for row in tail.iter_mut() {
            let lead = row[col];
            if lead == 0 {
                continue;
            }
            sub_scaled_row(&mut row[col..], prow, lead, p);
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// `row -= w * pivot (mod p)` using Shoup's precomputed quotient, so the
/// inner loop has no division. Requires `p < 2^31`, `w < p`.
#[inline]
fn sub_scaled_row(row: &mut [u32], pivot: &[u32], w: u32, p: u64) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { sub_scaled_row_avx512(row, pivot, w, p) };
        }
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: as above.
            return unsafe { sub_scaled_row_avx2(row, pivot, w, p) };
        }
    }
    sub_scaled_row_generic(row, pivot, w, p)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn sub_scaled_row_avx512(row: &mut [u32], pivot: &[u32], w: u32, p: u64) {
    sub_scaled_row_generic(row, pivot, w, p)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn sub_scaled_row_avx2(row: &mut [u32], pivot: &[u32], w: u32, p: u64) {
    sub_scaled_row_generic(row, pivot, w, p)
}

#[inline(always)]
fn sub_scaled_row_generic(row: &mut [u32], pivot: &[u32], w: u32, p: u64) {
    let neg = p - w as u64;
    let shoup = ((neg << 32) / p) as u32;
    let (neg, p32) = (neg as u32, p as u32);
    for (x, &y) in row.iter_mut().zip(pivot) {
        let q = ((y as u64 * shoup as u64) >> 32) as u32;
        // y*neg - q*p lies in [0, 2p), so 32-bit wrapping arithmetic is exact
        let prod = y.wrapping_mul(neg).wrapping_sub(q.wrapping_mul(p32));
        let prod = if prod >= p32 { prod - p32 } else { prod };
        let s = x.wrapping_add(prod);
        *x = if s >= p32 { s - p32 } else { s };
    }
}

/// Bit-packed Gaussian elimination over `GF(2)`.
pub(crate) fn dense_rank_f2(rows: &[Vec<(u32, u32)>], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let words = cols.div_ceil(64);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![0u64; words];
            for &(c, x) in r {
                if x & 1 == 1 {
                    d[c as usize / 64] |= 1 << (c % 64);
                }
            }
            d
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(piv) = (rank..m.len()).find(|&i| m[i][w] & bit != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank][w..];
        for row in tail.iter_mut() {
            if row[w] & bit != 0 {
                for (x, &y) in row[w..].iter_mut().zip(prow) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
