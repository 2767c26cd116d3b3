//! Cores, tetrahedron boundaries and the punctured complex.
//!
//! A core is a 2-complex in which every edge lies in at least two faces.
//! The faces surviving a full collapse form the largest one. A tetrahedron
//! boundary is a 4-set of vertices with all four triangles present;
//! puncturing deletes faces until none is left intact.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::collapse::collapse_fully;
use crate::complex::{Complex2, Edge, Face, Vertex};

/// A 4-vertex set `a < b < c < d` whose four triangles are all faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TetraBoundary(pub [Vertex; 4]);

impl TetraBoundary {
    /// The four triangles in lexicographic order.
    pub fn faces(&self) -> [Face; 4] {
        let [a, b, c, d] = self.0;
        [
            Face([a, b, c]),
            Face([a, b, d]),
            Face([a, c, d]),
            Face([b, c, d]),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoreSubcomplex {
    pub faces: Vec<Face>,
    pub edges: Vec<Edge>,
}

impl CoreSubcomplex {
    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// Two boundaries (indices into the boundary list) sharing `face`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedFace {
    pub first: usize,
    pub second: usize,
    pub face: Face,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TetraReport {
    pub boundaries: Vec<TetraBoundary>,
    #[serde(rename = "shared")]
    pub shared_face_pairs: Vec<SharedFace>,
    /// For each boundary, the deleted face that destroyed it.
    #[serde(serialize_with = "punctures_as_object")]
    pub punctures: BTreeMap<TetraBoundary, Face>,
}

fn punctures_as_object<S: Serializer>(
    p: &BTreeMap<TetraBoundary, Face>,
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(p.len()))?;
    for (TetraBoundary([a, b, c, d]), face) in p {
        map.serialize_entry(&format!("{a},{b},{c},{d}"), face)?;
    }
    map.end()
}

impl TetraReport {
    pub fn is_face_disjoint(&self) -> bool {
        self.shared_face_pairs.is_empty()
    }

    /// Distinct faces removed by the puncture, sorted.
    pub fn removed_faces(&self) -> Vec<Face> {
        let set: BTreeSet<Face> = self.punctures.values().copied().collect();
        set.into_iter().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Faces of `R_∞(c)` with their edges; empty iff `c` is 2-collapsible.
pub fn extract_core(c: &Complex2) -> CoreSubcomplex {
    let (residue, _) = collapse_fully(c);
    let faces = residue.faces().to_vec();
    let edges: BTreeSet<Edge> = faces.iter().flat_map(|f| f.edges()).collect();
    CoreSubcomplex {
        faces,
        edges: edges.into_iter().collect(),
    }
}

/// All tetrahedron boundaries, sorted.
///
/// Each boundary `{a,b,c,d}` is found once, from its smallest face
/// `(a,b,c)`, by trying the fourth vertices `d > c` of faces on edge `(a,b)`.
pub fn find_tetra_boundaries(c: &Complex2) -> Vec<TetraBoundary> {
    let inc = c.incidence();
    let mut out = Vec::new();
    for f in c.faces() {
        let [a, b, k] = f.0;
        let ab = Edge([a, b]);
        for g in inc.cofaces(&ab) {
            let d = g.opposite(&ab);
            if d <= k {
                continue;
            }
            if c.contains_face(&Face([a, k, d])) && c.contains_face(&Face([b, k, d])) {
                out.push(TetraBoundary([a, b, k, d]));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Every pair of boundaries sharing a face. Two distinct 4-sets meet in at
/// most three vertices, so a pair shares at most one face.
pub fn shared_face_pairs(boundaries: &[TetraBoundary]) -> Vec<SharedFace> {
    let mut by_face: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
    for (i, t) in boundaries.iter().enumerate() {
        for f in t.faces() {
            by_face.entry(f).or_default().push(i);
        }
    }
    let mut out = Vec::new();
    for (face, owners) in by_face {
        for (x, &i) in owners.iter().enumerate() {
            for &j in &owners[x + 1..] {
                out.push(SharedFace {
                    first: i,
                    second: j,
                    face,
                });
            }
        }
    }
    out.sort_unstable_by_key(|s| (s.first, s.second));
    out
}

/// Deletes faces so that no boundary in `boundaries` survives.
///
/// Faces shared by several boundaries go first (most boundaries hit, then
/// lexicographic), each removed only if it still hits an intact boundary.
/// Every boundary left intact then loses its smallest face. With
/// face-disjoint boundaries this is exactly one face per boundary.
pub fn puncture(c: &Complex2, boundaries: &[TetraBoundary]) -> (Complex2, TetraReport) {
    let shared = shared_face_pairs(boundaries);
    let mut owners: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
    for s in &shared {
        let list = owners.entry(s.face).or_default();
        for i in [s.first, s.second] {
            if !list.contains(&i) {
                list.push(i);
            }
        }
    }
    let mut candidates: Vec<(Face, Vec<usize>)> = owners.into_iter().collect();
    candidates.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));

    let mut punctures = BTreeMap::new();
    for (face, list) in candidates {
        if list.iter().all(|i| punctures.contains_key(&boundaries[*i])) {
            continue;
        }
        for &i in &list {
            punctures.entry(boundaries[i]).or_insert(face);
        }
    }
    for t in boundaries {
        punctures.entry(*t).or_insert(t.faces()[0]);
    }

    let report = TetraReport {
        boundaries: boundaries.to_vec(),
        shared_face_pairs: shared,
        punctures,
    };
    let z = c.without_faces(&report.removed_faces());
    (z, report)
}

/// Finds the boundaries of `c`, punctures them all and re-scans the result.
pub fn puncture_all(c: &Complex2) -> (Complex2, TetraReport) {
    let boundaries = find_tetra_boundaries(c);
    let (z, report) = puncture(c, &boundaries);
    // deleting faces cannot create a boundary
    assert!(
        find_tetra_boundaries(&z).is_empty(),
        "tetrahedron boundary survived puncturing"
    );
    (z, report)
}
