//! Freeness certificates for the fundamental group.
//!
//! Puncture every tetrahedron boundary to get `Z`. If the boundaries are
//! face-disjoint and `Z` collapses to a graph, `π₁` is free. Otherwise a
//! positive rational `β₂(Z)` shows `π₁` is not free, provided `Z` is
//! aspherical (which cannot be checked here, hence the verdict name).
//! Anything else is inconclusive. Torsion in `H₁`, when computed, rules out
//! freeness with no caveat and is recorded alongside the verdict.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::collapse::{collapse_fully, CollapseTrace};
use crate::complex::Complex2;
use crate::cores::{find_tetra_boundaries, puncture, TetraReport};
use crate::error::{Error, Result};
use crate::homology::{betti_collapsed, integral_homology_collapsed, Coefficients, HomologySummary};

pub const NOT_FREE_UNCONDITIONAL: &str = "NOT_FREE_UNCONDITIONAL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Free,
    NotFreeModuloAsphericity,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Free => "FREE",
            Verdict::NotFreeModuloAsphericity => "NOT_FREE_MODULO_ASPHERICITY",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// A test of the pipeline that did not go through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    FaceDisjoint,
    ZCollapsible,
    Betti2Positive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub tetra: TetraReport,
    /// Full collapse of `Z`; ends at zero faces exactly when `z_collapsible`.
    pub z_trace: CollapseTrace,
    pub z_collapsible: bool,
    /// Rational homology of `Z`.
    pub homology_z: HomologySummary,
    pub failed: Vec<Check>,
    /// Invariant factors of `H₁(c; Z)`, when requested.
    #[serde(
        skip_serializing_if = "Option::is_none",
        with = "crate::homology::torsion_serde"
    )]
    pub torsion_h1: Option<Vec<BigUint>>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl Certificate {
    /// True when `H₁` torsion was found, which no free group allows.
    pub fn not_free_unconditional(&self) -> bool {
        self.evidence
            .torsion_h1
            .as_ref()
            .is_some_and(|t| !t.is_empty())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Run the integer Smith form for `H₁` torsion (slow on large complexes).
    pub torsion: bool,
}

pub fn certify(c: &Complex2) -> Certificate {
    certify_with(c, CertifyOptions::default())
}

pub fn certify_with(c: &Complex2, options: CertifyOptions) -> Certificate {
    let boundaries = find_tetra_boundaries(c);
    let (z, tetra) = puncture(c, &boundaries);
    let (_, z_trace) = collapse_fully(&z);
    let z_collapsible = z_trace.final_f2 == 0;
    let homology_z = betti_collapsed(&z, Coefficients::Rationals).expect("default primes are valid");

    let mut failed = Vec::new();
    let mut notes = Vec::new();
    if !tetra.is_face_disjoint() {
        failed.push(Check::FaceDisjoint);
        notes.push(format!(
            "{} pairs of tetrahedron boundaries share a face",
            tetra.shared_face_pairs.len()
        ));
    }
    if !z_collapsible {
        failed.push(Check::ZCollapsible);
    }
    let verdict = if failed.is_empty() {
        Verdict::Free
    } else if homology_z.betti2() > 0 {
        Verdict::NotFreeModuloAsphericity
    } else {
        failed.push(Check::Betti2Positive);
        Verdict::Inconclusive
    };

    let torsion_h1 = options.torsion.then(|| {
        integral_homology_collapsed(c)
            .torsion
            .expect("integral homology carries torsion")
    });
    if let Some(t) = torsion_h1.as_ref().filter(|t| !t.is_empty()) {
        let factors: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        notes.push(format!(
            "{NOT_FREE_UNCONDITIONAL}: H_1 has torsion [{}]",
            factors.join(", ")
        ));
    }

    Certificate {
        verdict,
        evidence: Evidence {
            tetra,
            z_trace,
            z_collapsible,
            homology_z,
            failed,
            torsion_h1,
            notes,
        },
    }
}

/// Checks a certificate against `c` without trusting its derived fields:
/// the boundary list and punctures are recomputed, the trace is replayed and
/// the homology of `Z` is recomputed.
pub fn verify(c: &Complex2, cert: &Certificate) -> Result<()> {
    let ev = &cert.evidence;
    let fail = |msg: String| Err(Error::InvalidSpec(msg));
    if find_tetra_boundaries(c) != ev.tetra.boundaries {
        return fail("boundary list does not match the complex".into());
    }
    for (t, f) in &ev.tetra.punctures {
        if !t.faces().contains(f) {
            return fail(format!("puncture {f} is not a face of boundary {:?}", t.0));
        }
    }
    if ev.tetra.punctures.len() != ev.tetra.boundaries.len() {
        return fail("some boundary was not punctured".into());
    }
    let z = c.without_faces(&ev.tetra.removed_faces());
    if !find_tetra_boundaries(&z).is_empty() {
        return fail("a boundary survives in Z".into());
    }
    let residue = ev.z_trace.replay(&z)?;
    match cert.verdict {
        Verdict::Free => {
            if !ev.tetra.is_face_disjoint() {
                return fail("FREE with boundaries sharing a face".into());
            }
            if residue.f2() != 0 {
                return fail("FREE but Z does not collapse".into());
            }
            if cert.not_free_unconditional() {
                return fail("FREE alongside H_1 torsion".into());
            }
        }
        Verdict::NotFreeModuloAsphericity | Verdict::Inconclusive => {
            let b2 = betti_collapsed(&z, Coefficients::Rationals)?.betti2();
            if b2 != ev.homology_z.betti2() {
                return fail(format!(
                    "recorded betti2(Z) = {}, recomputed {b2}",
                    ev.homology_z.betti2()
                ));
            }
            if (cert.verdict == Verdict::NotFreeModuloAsphericity) != (b2 > 0) {
                return fail(format!("verdict {} with betti2(Z) = {b2}", cert.verdict.as_str()));
            }
        }
    }
    Ok(())
}
