use std::collections::HashMap;
use std::fmt::Write as _;

use crate::complex::{Complex2, Edge, Face};

/// The boundary map `∂₂` with rows indexed by present edges and columns by
/// faces. Face `(i, j, k)` maps to `(j,k) - (i,k) + (i,j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBoundaryMatrix {
    pub rows: Vec<Edge>,
    pub cols: Vec<Face>,
    /// Per column, `(row, sign)` in increasing row order.
    pub entries: Vec<[(u32, i8); 3]>,
}

/// Orientation signs of the face edges `(i,j)`, `(i,k)`, `(j,k)`.
pub const FACE_SIGNS: [i8; 3] = [1, -1, 1];

pub fn boundary2(c: &Complex2) -> SparseBoundaryMatrix {
    let rows: Vec<Edge> = c.edges().collect();
    let index: HashMap<Edge, u32> = rows
        .iter()
        .enumerate()
        .map(|(i, e)| (*e, i as u32))
        .collect();
    let entries = c
        .faces()
        .iter()
        .map(|f| {
            let es = f.edges();
            std::array::from_fn(|t| (index[&es[t]], FACE_SIGNS[t]))
        })
        .collect();
    SparseBoundaryMatrix {
        rows,
        cols: c.faces().to_vec(),
        entries,
    }
}

impl SparseBoundaryMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Columns as sparse integer vectors.
    pub(crate) fn integer_columns(&self) -> Vec<Vec<(u32, i64)>> {
        self.entries
            .iter()
            .map(|col| col.iter().map(|&(r, s)| (r, s as i64)).collect())
            .collect()
    }

    /// Coordinate text: a `rows cols` header, then `row col value` per entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows(), self.ncols());
        for (j, col) in self.entries.iter().enumerate() {
            for &(r, v) in col {
                writeln!(s, "{r} {j} {v}").unwrap();
            }
        }
        s
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.ncols()]; self.nrows()];
        for (j, col) in self.entries.iter().enumerate() {
            for &(r, v) in col {
                m[r as usize][j] = v as i64;
            }
        }
        m
    }
}
