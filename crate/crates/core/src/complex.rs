//! 2-complexes on `n` vertices with a (initially) complete 1-skeleton.
//!
//! Faces are stored as sorted vertex triples, edges as sorted pairs. A
//! freshly built complex has every one of the `C(n, 2)` edges present;
//! collapses remove edges, which is tracked as the set of missing edges.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = u32;

/// An edge `{a, b}` with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Edge(pub [Vertex; 2]);

/// A 2-face `{a, b, c}` with `a < b < c`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Face(pub [Vertex; 3]);

impl Edge {
    /// Builds the edge with endpoints sorted. The endpoints must differ.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Edge([a, b])
        } else {
            Edge([b, a])
        }
    }

    pub fn lo(&self) -> Vertex {
        self.0[0]
    }

    pub fn hi(&self) -> Vertex {
        self.0[1]
    }
}

impl Face {
    /// Builds the face with vertices sorted. The vertices must be distinct.
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        debug_assert!(v[0] < v[1] && v[1] < v[2]);
        Face(v)
    }

    /// The three edges in lexicographic order: `(i,j)`, `(i,k)`, `(j,k)`.
    pub fn edges(&self) -> [Edge; 3] {
        let [i, j, k] = self.0;
        [Edge([i, j]), Edge([i, k]), Edge([j, k])]
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges().contains(e)
    }

    /// The vertex of this face not on `e`. `e` must be one of its edges.
    pub fn opposite(&self, e: &Edge) -> Vertex {
        let [i, j, k] = self.0;
        if !e.0.contains(&i) {
            i
        } else if !e.0.contains(&j) {
            j
        } else {
            k
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Number of edges of the complete graph on `n` vertices.
pub fn complete_edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A 2-dimensional simplicial complex. Immutable once built; operations that
/// change it return a new value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex2 {
    n: usize,
    faces: Vec<Face>,
    missing_edges: BTreeSet<Edge>,
}

impl Complex2 {
    /// Validates and normalizes `faces` into a complex on the complete
    /// 1-skeleton of `n` vertices.
    pub fn new<I>(n: usize, faces: I) -> Result<Self>
    where
        I: IntoIterator<Item = [u64; 3]>,
    {
        if n > Vertex::MAX as usize {
            return Err(Error::InvalidSpec(format!("n = {n} exceeds the vertex range")));
        }
        let mut out = Vec::new();
        for [a, b, c] in faces {
            for v in [a, b, c] {
                if v >= n as u64 {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b || b == c || a == c {
                return Err(Error::DegenerateFace(a, b, c));
            }
            out.push(Face::new(a as Vertex, b as Vertex, c as Vertex));
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateFace(w[0]));
        }
        Ok(Complex2 {
            n,
            faces: out,
            missing_edges: BTreeSet::new(),
        })
    }

    /// Complex with no faces on the complete graph `K_n`.
    pub fn empty(n: usize) -> Self {
        Complex2 {
            n,
            faces: Vec::new(),
            missing_edges: BTreeSet::new(),
        }
    }

    /// Trusted constructor: `faces` sorted and unique, every face edge present.
    pub(crate) fn from_parts(n: usize, faces: Vec<Face>, missing_edges: BTreeSet<Edge>) -> Self {
        debug_assert!(faces.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(faces
            .iter()
            .all(|f| f.edges().iter().all(|e| !missing_edges.contains(e))));
        Complex2 {
            n,
            faces,
            missing_edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Faces in lexicographic order.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn f0(&self) -> usize {
        self.n
    }

    pub fn f1(&self) -> usize {
        complete_edge_count(self.n) - self.missing_edges.len()
    }

    pub fn f2(&self) -> usize {
        self.faces.len()
    }

    pub fn contains_face(&self, f: &Face) -> bool {
        self.faces.binary_search(f).is_ok()
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        (e.hi() as usize) < self.n && e.lo() < e.hi() && !self.missing_edges.contains(e)
    }

    /// Edges removed from the complete skeleton, in lexicographic order.
    pub fn missing_edges(&self) -> &BTreeSet<Edge> {
        &self.missing_edges
    }

    pub fn has_complete_skeleton(&self) -> bool {
        self.missing_edges.is_empty()
    }

    /// Present edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.n as Vertex;
        (0..n)
            .flat_map(move |a| (a + 1..n).map(move |b| Edge([a, b])))
            .filter(|e| !self.missing_edges.contains(e))
    }

    pub fn incidence(&self) -> EdgeIncidence {
        EdgeIncidence::build(&self.faces)
    }

    /// `f0 - f1 + f2`, with every vertex counted.
    pub fn euler_characteristic(&self) -> i64 {
        self.f0() as i64 - self.f1() as i64 + self.f2() as i64
    }

    /// Same skeleton, with the given faces deleted. Faces not in the
    /// complex are ignored.
    pub fn without_faces(&self, removed: &[Face]) -> Complex2 {
        let removed: BTreeSet<&Face> = removed.iter().collect();
        Complex2 {
            n: self.n,
            faces: self
                .faces
                .iter()
                .filter(|f| !removed.contains(f))
                .copied()
                .collect(),
            missing_edges: self.missing_edges.clone(),
        }
    }

    /// Text form: `n=<n>` followed by one sorted face per line.
    ///
    /// Only the face set is written; the file format always denotes the
    /// complete skeleton, so missing edges do not survive a round trip.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for Face([a, b, c]) in &self.faces {
            s.push_str(&format!("{a} {b} {c}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut faces = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if n.is_none() {
                let value = line.strip_prefix("n=").ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("expected header `n=<integer>`, got `{line}`"),
                })?;
                n = Some(value.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad vertex count: {e}"),
                })?);
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected three vertex indices, got `{line}`"),
                });
            }
            let mut tri = [0u64; 3];
            for (slot, p) in tri.iter_mut().zip(&parts) {
                *slot = p.parse().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad vertex index `{p}`: {e}"),
                })?;
            }
            faces.push(tri);
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing `n=` header".into(),
        })?;
        Complex2::new(n, faces)
    }
}

/// Edge to coface incidence. Only edges of positive degree are stored.
#[derive(Clone, Debug, Default)]
pub struct EdgeIncidence {
    cofaces: HashMap<Edge, Vec<Face>>,
}

impl EdgeIncidence {
    pub fn build(faces: &[Face]) -> Self {
        let mut cofaces: HashMap<Edge, Vec<Face>> = HashMap::with_capacity(faces.len() * 2);
        for f in faces {
            for e in f.edges() {
                cofaces.entry(e).or_default().push(*f);
            }
        }
        EdgeIncidence { cofaces }
    }

    pub fn degree(&self, e: &Edge) -> usize {
        self.cofaces.get(e).map_or(0, Vec::len)
    }

    pub fn cofaces(&self, e: &Edge) -> &[Face] {
        self.cofaces.get(e).map_or(&[], Vec::as_slice)
    }

    /// Drops `f` from the coface lists of its three edges.
    pub fn remove_face(&mut self, f: &Face) {
        for e in f.edges() {
            if let Some(list) = self.cofaces.get_mut(&e) {
                if let Some(pos) = list.iter().position(|g| g == f) {
                    list.swap_remove(pos);
                }
                if list.is_empty() {
                    self.cofaces.remove(&e);
                }
            }
        }
    }

    /// Edges of positive degree, unordered.
    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &[Face])> {
        self.cofaces.iter().map(|(e, v)| (e, v.as_slice()))
    }

    /// Sum of degrees over all edges; equals `3 * f2`.
    pub fn total_degree(&self) -> usize {
        self.cofaces.values().map(Vec::len).sum()
    }

    /// Edges of degree exactly one, sorted.
    pub fn free_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .cofaces
            .iter()
            .filter(|(_, v)| v.len() == 1)
            .map(|(e, _)| *e)
            .collect();
        out.sort_unstable();
        out
    }
}

impl PartialEq for EdgeIncidence {
    fn eq(&self, other: &Self) -> bool {
        if self.cofaces.len() != other.cofaces.len() {
            return false;
        }
        self.cofaces.iter().all(|(e, v)| match other.cofaces.get(e) {
            Some(w) if w.len() == v.len() => {
                let mut a = v.clone();
                let mut b = w.clone();
                a.sort_unstable();
                b.sort_unstable();
                a == b
            }
            _ => false,
        })
    }
}

impl Eq for EdgeIncidence {}
