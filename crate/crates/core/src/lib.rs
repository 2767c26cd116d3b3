//! Random Linial–Meshulam 2-complexes: sampling, collapses, cores,
//! homology and freeness certificates for the fundamental group.

pub mod certifier;
pub mod collapse;
pub mod complex;
pub mod constants;
pub mod cores;
pub mod error;
pub mod experiments;
pub mod homology;
pub mod oracle;
pub mod sampler;

pub use complex::{Complex2, Edge, Face, Vertex};
pub use error::{Error, Result};
