//! Monte Carlo sweeps over `(n, c)` grids.
//!
//! Trial `i` of a sweep (counting over the grid in row-major order, `n`
//! outermost) uses seed `derive_trial_seed(master_seed, i)`, so the results
//! depend only on the configuration and never on scheduling.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certifier::{certify_with, CertifyOptions, Verdict};
use crate::collapse::collapse_fully;
use crate::constants::{solve_c2, solve_gamma2};
use crate::error::{Error, Result};
use crate::homology::{betti, Coefficients, DEFAULT_PRIMES};
use crate::sampler::{derive_trial_seed, sample, SampleSpec, RNG_ALGORITHM};

/// Torsion is computed by default only up to this many vertices.
pub const TORSION_AUTO_MAX_N: usize = 60;

pub const CSV_COLUMNS: [&str; 14] = [
    "n",
    "c",
    "seed",
    "f2_initial",
    "f2_core",
    "collapsible_Y",
    "tetra_count",
    "shared_pairs",
    "collapsible_Z",
    "betti2_Y",
    "betti2_Z",
    "torsion_found",
    "verdict",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub c_values: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    /// `None` means on for `n <= TORSION_AUTO_MAX_N` only.
    pub compute_torsion: Option<bool>,
    pub compute_betti_y: bool,
    /// Off by default: timings differ between runs, so a sweep with timing
    /// on is reproducible in every column except `wall_ms`.
    pub record_wall_time: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: vec![100, 150, 200],
            c_values: landmark_densities(),
            trials: 100,
            master_seed: 0,
            compute_torsion: None,
            compute_betti_y: true,
            record_wall_time: false,
            out_dir: None,
        }
    }
}

/// `2.0, γ₂, 2.6, c₂, 3.0`, with the two constants solved at call time.
pub fn landmark_densities() -> Vec<f64> {
    let g = solve_gamma2().expect("gamma2 solves").value;
    let c = solve_c2().expect("c2 solves").value;
    vec![2.0, g, 2.6, c, 3.0]
}

impl SweepConfig {
    /// Many small complexes around `c₂`, with torsion on.
    pub fn torsion_probe() -> Self {
        let c2 = solve_c2().expect("c2 solves").value;
        SweepConfig {
            n_values: vec![24, 36, 48],
            c_values: vec![2.6, c2, 2.9, 3.2],
            trials: 400,
            compute_torsion: Some(true),
            ..SweepConfig::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(SweepConfig::default()),
            "torsion-probe" => Ok(SweepConfig::torsion_probe()),
            _ => Err(Error::InvalidConfig(format!("unknown preset `{name}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() || self.c_values.is_empty() {
            return bad("n_values and c_values must be nonempty".into());
        }
        let n_min = *self.n_values.iter().min().unwrap();
        if n_min == 0 {
            return bad("n must be positive".into());
        }
        for &c in &self.c_values {
            if !c.is_finite() || c < 0.0 {
                return bad(format!("density c = {c} must be finite and nonnegative"));
            }
            if c > n_min as f64 {
                return bad(format!("c = {c} exceeds n = {n_min}, so p > 1"));
            }
        }
        Ok(())
    }

    pub fn toggles_for(&self, n: usize) -> TrialToggles {
        TrialToggles {
            torsion: self.compute_torsion.unwrap_or(n <= TORSION_AUTO_MAX_N),
            betti_y: self.compute_betti_y,
            wall_time: self.record_wall_time,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SweepConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid_size(&self) -> usize {
        self.n_values.len() * self.c_values.len() * self.trials
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialToggles {
    pub torsion: bool,
    pub betti_y: bool,
    pub wall_time: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub n: usize,
    pub c: f64,
    pub seed: u64,
    pub f2_initial: usize,
    pub f2_core: usize,
    #[serde(rename = "collapsible_Y")]
    pub collapsible_y: bool,
    pub tetra_count: usize,
    pub shared_pairs: usize,
    #[serde(rename = "collapsible_Z")]
    pub collapsible_z: bool,
    #[serde(rename = "betti2_Y")]
    pub betti2_y: Option<usize>,
    #[serde(rename = "betti2_Z")]
    pub betti2_z: Option<usize>,
    pub torsion_found: Option<bool>,
    pub verdict: Verdict,
    pub wall_ms: Option<u64>,
}

impl TrialResult {
    /// The per-row invariants every produced result must satisfy.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.f2_core > self.f2_initial {
            return Err(format!("f2_core {} > f2_initial {}", self.f2_core, self.f2_initial));
        }
        if self.collapsible_y != (self.f2_core == 0) {
            return Err("collapsible_Y disagrees with f2_core".into());
        }
        if let (Some(y), Some(z)) = (self.betti2_y, self.betti2_z) {
            if z + self.tetra_count < y {
                return Err(format!(
                    "betti2_Z {z} < betti2_Y {y} - tetra_count {}",
                    self.tetra_count
                ));
            }
        }
        if self.verdict == Verdict::Free && !(self.collapsible_z && self.shared_pairs == 0) {
            return Err("FREE without a collapsible, face-disjoint puncture".into());
        }
        if self.verdict == Verdict::NotFreeModuloAsphericity && self.betti2_z == Some(0) {
            return Err("NOT_FREE_MODULO_ASPHERICITY with betti2_Z = 0".into());
        }
        if self.verdict == Verdict::Free && self.torsion_found == Some(true) {
            return Err("FREE with torsion in H_1".into());
        }
        Ok(())
    }
}

/// Samples `Y(n, c/n)`, collapses, certifies, and records the observables.
pub fn run_trial(n: usize, c: f64, seed: u64, toggles: TrialToggles) -> Result<TrialResult> {
    let start = Instant::now();
    let y = sample(&SampleSpec::with_c(n, c, seed))?;
    let (core, _) = collapse_fully(&y);
    let cert = certify_with(&y, CertifyOptions { torsion: toggles.torsion });
    let betti2_y = if toggles.betti_y {
        Some(betti(&core, Coefficients::Rationals)?.betti2())
    } else {
        None
    };
    let ev = &cert.evidence;
    let result = TrialResult {
        n,
        c,
        seed,
        f2_initial: y.f2(),
        f2_core: core.f2(),
        collapsible_y: core.f2() == 0,
        tetra_count: ev.tetra.boundaries.len(),
        shared_pairs: ev.tetra.shared_face_pairs.len(),
        collapsible_z: ev.z_collapsible,
        betti2_y,
        betti2_z: Some(ev.homology_z.betti2()),
        torsion_found: toggles.torsion.then(|| cert.not_free_unconditional()),
        verdict: cert.verdict,
        wall_ms: toggles.wall_time.then(|| start.elapsed().as_millis() as u64),
    };
    if let Err(msg) = result.check() {
        panic!("inconsistent trial (n={n}, c={c}, seed={seed}): {msg}");
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub rng_algorithm: String,
    pub master_seed: u64,
    pub config: SweepConfig,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub primes: [u64; 2],
}

impl RunManifest {
    pub fn new(config: &SweepConfig) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng_algorithm: RNG_ALGORITHM.to_string(),
            master_seed: config.master_seed,
            config: config.clone(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            primes: DEFAULT_PRIMES,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub frac_free: f64,
    pub frac_not_free: f64,
    pub frac_inconclusive: f64,
    pub frac_collapsible_y: f64,
    pub frac_collapsible_z: f64,
    pub f2_core_over_n2_mean: f64,
    pub f2_core_over_n2_stderr: f64,
    pub tetra_mean: f64,
    pub tetra_stderr: f64,
    /// `c⁴/24`, the limiting mean number of tetrahedron boundaries.
    pub tetra_predicted: f64,
    pub frac_shared: f64,
    pub betti2_z_over_n2_mean: Option<f64>,
    pub betti2_z_over_n2_stderr: Option<f64>,
    pub betti2_y_over_n2_mean: Option<f64>,
    pub torsion_trials: usize,
    pub torsion_found: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub rows: Vec<AggregateRow>,
}

impl AggregateTable {
    pub fn row(&self, n: usize, c: f64) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.n == n && r.c == c)
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Groups by `(n, c)` in order of first appearance.
pub fn aggregate(results: &[TrialResult]) -> AggregateTable {
    let mut order: Vec<(usize, u64)> = Vec::new();
    let mut groups: HashMap<(usize, u64), Vec<&TrialResult>> = HashMap::new();
    for r in results {
        let key = (r.n, r.c.to_bits());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    let rows = order
        .into_iter()
        .map(|key| aggregate_group(&groups[&key]))
        .collect();
    AggregateTable { rows }
}

fn aggregate_group(g: &[&TrialResult]) -> AggregateRow {
    let (n, c) = (g[0].n, g[0].c);
    let k = g.len() as f64;
    let n2 = (n * n) as f64;
    let frac = |pred: &dyn Fn(&TrialResult) -> bool| g.iter().filter(|r| pred(r)).count() as f64 / k;
    let scaled = |xs: Vec<usize>| xs.into_iter().map(|x| x as f64 / n2).collect::<Vec<_>>();

    let (f2_mean, f2_se) = mean_stderr(&scaled(g.iter().map(|r| r.f2_core).collect()));
    let tetra: Vec<f64> = g.iter().map(|r| r.tetra_count as f64).collect();
    let (tetra_mean, tetra_se) = mean_stderr(&tetra);
    let b2z: Option<Vec<usize>> = g.iter().map(|r| r.betti2_z).collect();
    let (b2z_mean, b2z_se) = match b2z {
        Some(v) => {
            let (m, s) = mean_stderr(&scaled(v));
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    let b2y: Option<Vec<usize>> = g.iter().map(|r| r.betti2_y).collect();
    let torsion: Vec<bool> = g.iter().filter_map(|r| r.torsion_found).collect();

    AggregateRow {
        n,
        c,
        trials: g.len(),
        frac_free: frac(&|r| r.verdict == Verdict::Free),
        frac_not_free: frac(&|r| r.verdict == Verdict::NotFreeModuloAsphericity),
        frac_inconclusive: frac(&|r| r.verdict == Verdict::Inconclusive),
        frac_collapsible_y: frac(&|r| r.collapsible_y),
        frac_collapsible_z: frac(&|r| r.collapsible_z),
        f2_core_over_n2_mean: f2_mean,
        f2_core_over_n2_stderr: f2_se,
        tetra_mean,
        tetra_stderr: tetra_se,
        tetra_predicted: c.powi(4) / 24.0,
        frac_shared: frac(&|r| r.shared_pairs > 0),
        betti2_z_over_n2_mean: b2z_mean,
        betti2_z_over_n2_stderr: b2z_se,
        betti2_y_over_n2_mean: b2y.map(|v| mean_stderr(&scaled(v)).0),
        torsion_trials: torsion.len(),
        torsion_found: torsion.iter().filter(|&&t| t).count(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub manifest: RunManifest,
    pub results: Vec<TrialResult>,
    pub table: AggregateTable,
}

/// Runs every trial of `config` on `workers` threads (`0` lets rayon decide).
pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<SweepOutcome> {
    config.validate()?;
    let manifest = RunManifest::new(config);
    let results = run_trials(config, workers)?;
    let table = aggregate(&results);
    Ok(SweepOutcome {
        manifest,
        results,
        table,
    })
}

/// Reruns the sweep recorded in `manifest`, refusing if it came from a
/// different version or generator.
pub fn rerun(manifest: &RunManifest, workers: usize) -> Result<SweepOutcome> {
    if manifest.rng_algorithm != RNG_ALGORITHM {
        return Err(Error::InvalidConfig(format!(
            "manifest uses generator `{}`, this build has `{RNG_ALGORITHM}`",
            manifest.rng_algorithm
        )));
    }
    if manifest.version != env!("CARGO_PKG_VERSION") {
        return Err(Error::InvalidConfig(format!(
            "manifest written by version {}, this is {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        )));
    }
    if manifest.master_seed != manifest.config.master_seed {
        return Err(Error::InvalidConfig("manifest seeds disagree".into()));
    }
    let mut out = run_sweep(&manifest.config, workers)?;
    out.manifest = manifest.clone();
    Ok(out)
}

fn run_trials(config: &SweepConfig, workers: usize) -> Result<Vec<TrialResult>> {
    let mut jobs = Vec::with_capacity(config.grid_size());
    for &n in &config.n_values {
        for &c in &config.c_values {
            for _ in 0..config.trials {
                let index = jobs.len() as u64;
                jobs.push((n, c, derive_trial_seed(config.master_seed, index)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(n, c, seed)| run_trial(n, c, seed, config.toggles_for(n)))
            .collect()
    })
}

pub fn write_csv<W: Write>(w: W, results: &[TrialResult]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in results {
        out.serialize(r)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn emit_csv(path: &Path, results: &[TrialResult]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(file, results)
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialResult>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<TrialResult>, _>>()?;
    Ok(rows)
}

pub fn emit_json(path: &Path, results: &[TrialResult]) -> Result<()> {
    write_json(path, results)
}

pub fn read_json(path: &Path) -> Result<Vec<TrialResult>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

impl SweepOutcome {
    /// Writes `manifest.json`, `results.csv`, `results.json`, `aggregates.csv`
    /// and `aggregates.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("manifest.json"), &self.manifest)?;
        emit_csv(&dir.join("results.csv"), &self.results)?;
        emit_json(&dir.join("results.json"), &self.results)?;
        write_json(&dir.join("aggregates.json"), &self.table)?;
        let path = dir.join("aggregates.csv");
        let mut w = csv::Writer::from_path(&path)?;
        for row in &self.table.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            n_values: vec![12, 16],
            c_values: vec![2.0, 3.0],
            trials: 4,
            master_seed: 42,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn default_grid_uses_solved_constants() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.c_values.len(), 5);
        assert_eq!(cfg.c_values[1], solve_gamma2().unwrap().value);
        assert_eq!(cfg.c_values[3], solve_c2().unwrap().value);
        cfg.validate().unwrap();
        assert!(cfg.toggles_for(60).torsion && !cfg.toggles_for(61).torsion);
        assert!(SweepConfig::preset("torsion-probe").unwrap().toggles_for(48).torsion);
        assert!(SweepConfig::preset("nope").is_err());
    }

    #[test]
    fn validation() {
        let zero = SweepConfig { trials: 0, ..small() };
        assert!(matches!(zero.validate(), Err(Error::InvalidConfig(_))));
        let dense = SweepConfig { c_values: vec![13.0], ..small() };
        assert!(dense.validate().is_err());
        let neg = SweepConfig { c_values: vec![-1.0], ..small() };
        assert!(neg.validate().is_err());
        assert!(run_sweep(&zero, 1).is_err());
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let err = serde_json::from_str::<SweepConfig>(r#"{"trials": 3, "colour": 1}"#);
        assert!(err.is_err());
        let ok: SweepConfig = serde_json::from_str(r#"{"trials": 3, "n_values": [10]}"#).unwrap();
        assert_eq!(ok.trials, 3);
        assert_eq!(ok.c_values, landmark_densities());
    }

    #[test]
    fn complete_complex_on_four_vertices() {
        let r = run_trial(4, 4.0, 1, TrialToggles::default()).unwrap();
        assert_eq!(r.f2_initial, 4);
        assert_eq!(r.tetra_count, 1);
        assert_eq!(r.verdict, Verdict::Free);
    }

    #[test]
    fn sparse_trials_are_free() {
        for seed in 0..20 {
            let r = run_trial(50, 0.5, seed, TrialToggles::default()).unwrap();
            assert!(r.collapsible_y);
            assert_eq!(r.verdict, Verdict::Free);
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_COLUMNS.join(",") + "\n");

        let r = run_trial(10, 2.0, 3, TrialToggles { betti_y: true, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, std::slice::from_ref(&r)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 14);
        assert_eq!(cells[0], "10");
        assert_eq!(cells[2], r.seed.to_string());
        assert_eq!(cells[11], "");
        assert_eq!(cells[12], r.verdict.as_str());
        assert_eq!(cells[13], "");
    }

    #[test]
    fn outputs_round_trip() {
        let out = run_sweep(&small(), 2).unwrap();
        assert_eq!(out.results.len(), 16);
        assert_eq!(out.table.rows.len(), 4);
        let dir = tempfile::tempdir().unwrap();
        out.write(dir.path()).unwrap();
        let back = read_json(&dir.path().join("results.json")).unwrap();
        assert_eq!(back, out.results);
        assert_eq!(aggregate(&back), out.table);
        assert_eq!(read_csv(&dir.path().join("results.csv")).unwrap(), out.results);
        let m = RunManifest::from_json_file(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(m, out.manifest);
    }

    #[test]
    fn independent_of_worker_count() {
        let a = run_sweep(&small(), 1).unwrap();
        let b = run_sweep(&small(), 3).unwrap();
        assert_eq!(a.results, b.results);
        let again = rerun(&a.manifest, 2).unwrap();
        assert_eq!(again.results, a.results);
    }

    #[test]
    fn rerun_refuses_foreign_manifests() {
        let mut m = RunManifest::new(&small());
        m.rng_algorithm = "mt19937".into();
        assert!(rerun(&m, 1).is_err());
        let mut m = RunManifest::new(&small());
        m.version = "0.0.0-other".into();
        assert!(rerun(&m, 1).is_err());
    }

    #[test]
    fn stderr() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[7.0]), (7.0, 0.0));
    }
}
