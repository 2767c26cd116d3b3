//! Elementary collapses at free edges.
//!
//! An edge is free when it lies in exactly one face. Collapsing it removes
//! the edge and that face. [`collapse_fully`] runs a FIFO worklist seeded
//! with the free edges in lexicographic order; every edge that drops to
//! degree one is appended, so each face and edge is touched a bounded
//! number of times.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, Edge, EdgeIncidence, Face};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseStep {
    pub edge: Edge,
    pub face: Face,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseTrace {
    pub steps: Vec<CollapseStep>,
    pub initial_f2: usize,
    pub final_f2: usize,
}

impl CollapseTrace {
    /// Re-applies every step to `initial`, checking each edge is free at its turn.
    pub fn replay(&self, initial: &Complex2) -> Result<Complex2> {
        if initial.f2() != self.initial_f2 {
            return Err(Error::InvalidSpec(format!(
                "trace starts from {} faces, complex has {}",
                self.initial_f2,
                initial.f2()
            )));
        }
        let mut state = Working::new(initial);
        for step in &self.steps {
            match state.inc.cofaces(&step.edge) {
                [f] if *f == step.face => state.collapse(step.edge),
                _ => {
                    return Err(Error::NotFree {
                        edge: step.edge,
                        degree: state.inc.degree(&step.edge),
                    })
                }
            };
        }
        let out = state.finish(initial);
        if out.f2() != self.final_f2 {
            return Err(Error::InvalidSpec(format!(
                "replay ended with {} faces, trace records {}",
                out.f2(),
                self.final_f2
            )));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.steps).expect("trace serializes")
    }
}

/// Mutable scratch state shared by the collapse routines.
struct Working {
    inc: EdgeIncidence,
    removed_faces: HashSet<Face>,
    removed_edges: BTreeSet<Edge>,
}

impl Working {
    fn new(c: &Complex2) -> Self {
        Working {
            inc: c.incidence(),
            removed_faces: HashSet::new(),
            removed_edges: BTreeSet::new(),
        }
    }

    /// Collapses at `e`, which must be free. Returns the removed face.
    fn collapse(&mut self, e: Edge) -> Face {
        let face = self.inc.cofaces(&e)[0];
        self.inc.remove_face(&face);
        self.removed_faces.insert(face);
        self.removed_edges.insert(e);
        face
    }

    fn finish(self, c: &Complex2) -> Complex2 {
        let faces = c
            .faces()
            .iter()
            .filter(|f| !self.removed_faces.contains(f))
            .copied()
            .collect();
        let mut missing = c.missing_edges().clone();
        missing.extend(self.removed_edges);
        Complex2::from_parts(c.n(), faces, missing)
    }
}

/// Edges of degree exactly one, in lexicographic order.
pub fn free_edges(c: &Complex2) -> Vec<Edge> {
    c.incidence().free_edges()
}

/// Collapses `c` at the free edge `e`.
pub fn elementary_collapse(c: &Complex2, e: Edge) -> Result<Complex2> {
    let mut state = Working::new(c);
    let degree = state.inc.degree(&e);
    if degree != 1 {
        return Err(Error::NotFree { edge: e, degree });
    }
    state.collapse(e);
    Ok(state.finish(c))
}

/// Collapses until no free edge remains, returning `R_∞(c)` and the trace.
pub fn collapse_fully(c: &Complex2) -> (Complex2, CollapseTrace) {
    let mut state = Working::new(c);
    let mut queue: VecDeque<Edge> = state.inc.free_edges().into();
    let mut steps = Vec::new();
    while let Some(e) = queue.pop_front() {
        if state.inc.degree(&e) != 1 {
            continue;
        }
        let face = state.collapse(e);
        steps.push(CollapseStep { edge: e, face });
        for other in face.edges() {
            if other != e && state.inc.degree(&other) == 1 {
                queue.push_back(other);
            }
        }
    }
    let out = state.finish(c);
    let trace = CollapseTrace {
        steps,
        initial_f2: c.f2(),
        final_f2: out.f2(),
    };
    (out, trace)
}

/// Like [`collapse_fully`], but picks the next free edge uniformly at random
/// from the pending set. Used to check that the terminal face set does not
/// depend on the collapse order.
pub fn collapse_fully_randomized<R: Rng + ?Sized>(
    c: &Complex2,
    rng: &mut R,
) -> (Complex2, CollapseTrace) {
    let mut state = Working::new(c);
    let mut pending = state.inc.free_edges();
    let mut steps = Vec::new();
    while !pending.is_empty() {
        let e = pending.swap_remove(rng.gen_range(0..pending.len()));
        if state.inc.degree(&e) != 1 {
            continue;
        }
        let face = state.collapse(e);
        steps.push(CollapseStep { edge: e, face });
        for other in face.edges() {
            if other != e && state.inc.degree(&other) == 1 {
                pending.push(other);
            }
        }
    }
    let out = state.finish(c);
    let trace = CollapseTrace {
        steps,
        initial_f2: c.f2(),
        final_f2: out.f2(),
    };
    (out, trace)
}

/// One round `R(c)`: snapshot the free edges, then collapse each one that is
/// still free when reached, in lexicographic order.
pub fn one_round_collapse(c: &Complex2) -> Complex2 {
    let mut state = Working::new(c);
    for e in state.inc.free_edges() {
        if state.inc.degree(&e) == 1 {
            state.collapse(e);
        }
    }
    state.finish(c)
}

pub fn is_2_collapsible(c: &Complex2) -> bool {
    collapse_fully(c).0.f2() == 0
}
