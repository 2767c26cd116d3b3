//! Sampling from the Linial–Meshulam model `Y(n, p)`.
//!
//! Triples are visited in lexicographic order and each consumes exactly one
//! uniform `f64` draw from a ChaCha8 stream; the triple is kept when the
//! draw is below `p`. Pinning the draw order is what makes a `(spec, seed)`
//! pair reproduce the same complex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, Face, Vertex};
use crate::error::{Error, Result};

/// Identifier of the face-inclusion generator, recorded in run manifests.
pub const RNG_ALGORITHM: &str = "chacha8-lex-uniform-f64";

/// Face density, either as a raw probability or as `c` with `p = c / n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Density {
    P(f64),
    C(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n: usize,
    pub density: Density,
    pub seed: u64,
    pub rng_algorithm: String,
}

impl SampleSpec {
    pub fn with_p(n: usize, p: f64, seed: u64) -> Self {
        SampleSpec {
            n,
            density: Density::P(p),
            seed,
            rng_algorithm: RNG_ALGORITHM.to_string(),
        }
    }

    pub fn with_c(n: usize, c: f64, seed: u64) -> Self {
        SampleSpec {
            n,
            density: Density::C(c),
            seed,
            rng_algorithm: RNG_ALGORITHM.to_string(),
        }
    }

    /// The inclusion probability, validated to lie in `[0, 1]`.
    pub fn p(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        let p = match self.density {
            Density::P(p) => p,
            Density::C(c) => c / self.n as f64,
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidSpec(format!(
                "face probability {p} is outside [0, 1]"
            )));
        }
        Ok(p)
    }
}

/// Draws `Y ~ Y(n, p)` for the given spec.
pub fn sample(spec: &SampleSpec) -> Result<Complex2> {
    if spec.rng_algorithm != RNG_ALGORITHM {
        return Err(Error::InvalidSpec(format!(
            "unsupported rng algorithm `{}`",
            spec.rng_algorithm
        )));
    }
    let p = spec.p()?;
    let n = spec.n;
    if n > Vertex::MAX as usize {
        return Err(Error::InvalidSpec(format!("n = {n} exceeds the vertex range")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut faces = Vec::new();
    let n = n as Vertex;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rng.gen::<f64>() < p {
                    faces.push(Face([a, b, c]));
                }
            }
        }
    }
    Ok(Complex2::from_parts(spec.n, faces, Default::default()))
}

/// SplitMix64 output function; a bijection on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` of a run with `master_seed`.
///
/// Computes `mix64(master + (index + 1) * φ)` where `φ = 0x9e3779b97f4a7c15`
/// is odd, so the map is injective in `trial_index` for a fixed master seed.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    mix64(master_seed.wrapping_add(trial_index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn extreme_probabilities() {
        let c = sample(&SampleSpec::with_p(10, 0.0, 3)).unwrap();
        assert_eq!(c.f2(), 0);
        let c = sample(&SampleSpec::with_p(6, 1.0, 3)).unwrap();
        assert_eq!(c.f2(), 20);
        let c = sample(&SampleSpec::with_c(4, 4.0, 9)).unwrap();
        assert_eq!(c.f2(), 4);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(sample(&SampleSpec::with_c(5, 6.0, 0)).is_err());
        assert!(sample(&SampleSpec::with_p(5, -0.1, 0)).is_err());
        assert!(sample(&SampleSpec::with_p(0, 0.5, 0)).is_err());
        let mut spec = SampleSpec::with_p(5, 0.5, 0);
        spec.rng_algorithm = "mt19937".into();
        assert!(sample(&spec).is_err());
    }

    #[test]
    fn deterministic() {
        let spec = SampleSpec::with_c(40, 2.5, 77);
        assert_eq!(sample(&spec).unwrap(), sample(&spec).unwrap());
        let other = SampleSpec::with_c(40, 2.5, 78);
        assert_ne!(sample(&spec).unwrap(), sample(&other).unwrap());
    }

    #[test]
    fn trial_seeds() {
        let s = 0xdead_beef;
        assert_ne!(derive_trial_seed(s, 0), derive_trial_seed(s, 1));
        assert_eq!(derive_trial_seed(s, 42), derive_trial_seed(s, 42));
        let seeds: HashSet<u64> = (0..10_000).map(|k| derive_trial_seed(s, k)).collect();
        assert_eq!(seeds.len(), 10_000);
    }

    #[test]
    fn mean_face_count() {
        // n = 100, c = 2.5: p * C(100, 3) = 0.025 * 161700 = 4042.5
        let trials = 500;
        let counts: Vec<f64> = (0..trials)
            .map(|t| {
                let spec = SampleSpec::with_c(100, 2.5, derive_trial_seed(11, t));
                sample(&spec).unwrap().f2() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
        let se = (var / trials as f64).sqrt();
        assert!((mean - 4042.5).abs() < 3.0 * se, "mean {mean}, se {se}");
    }
}
