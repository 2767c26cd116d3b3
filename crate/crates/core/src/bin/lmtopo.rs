use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;

use lmtopo::certifier::{certify_with, Certificate, CertifyOptions};
use lmtopo::collapse::collapse_fully;
use lmtopo::constants::{solve_c2, solve_gamma2, ThresholdConstant};
use lmtopo::cores::TetraReport;
use lmtopo::experiments::{rerun, run_sweep, RunManifest, SweepConfig, SweepOutcome};
use lmtopo::homology::{betti_collapsed, integral_homology_collapsed, Coefficients, HomologySummary};
use lmtopo::oracle::oracle_check;
use lmtopo::sampler::{sample, SampleSpec};
use lmtopo::Complex2;

#[derive(Parser)]
#[command(name = "lmtopo", version, about = "Random 2-complexes and the freeness of their fundamental groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the threshold constants gamma2 and c2.
    Constants {
        #[arg(long)]
        json: bool,
    },
    /// Sample Y(n, p) and write it in text form.
    #[command(group(ArgGroup::new("density").required(true).args(["p", "c"])))]
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse, puncture, compute homology and certify one complex.
    Analyze {
        file: PathBuf,
        /// Also compute H_1 torsion over the integers.
        #[arg(long)]
        torsion: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a Monte Carlo sweep and write manifest, results and aggregates.
    Sweep {
        /// JSON sweep configuration.
        #[arg(long, conflicts_with_all = ["preset", "manifest"])]
        config: Option<PathBuf>,
        /// Named configuration: `default` or `torsion-probe`.
        #[arg(long, conflicts_with = "manifest")]
        preset: Option<String>,
        /// Rerun the sweep recorded in a manifest.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, env = "LMTOPO_WORKERS", default_value_t = 0)]
        workers: usize,
        /// Force torsion on for every grid point.
        #[arg(long)]
        torsion: bool,
        /// Record wall-clock time per trial.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Cross-check the sparse pipeline against dense brute force.
    OracleCheck {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Constants { json } => constants(json),
        Command::Sample { n, p, c, seed, out } => {
            let spec = match (p, c) {
                (Some(p), _) => SampleSpec::with_p(n, p, seed),
                (_, Some(c)) => SampleSpec::with_c(n, c, seed),
                _ => unreachable!("clap requires one of --p, --c"),
            };
            let text = sample(&spec)?.to_text();
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Analyze { file, torsion, json } => analyze(file, torsion, json),
        Command::Sweep {
            config,
            preset,
            manifest,
            n,
            c,
            trials,
            seed,
            workers,
            torsion,
            timing,
            out_dir,
        } => {
            let outcome = if let Some(path) = manifest {
                if !(n.is_empty() && c.is_empty() && trials.is_none() && seed.is_none() && !torsion && !timing) {
                    bail!("--manifest reruns a recorded sweep and takes no grid options");
                }
                rerun(&RunManifest::from_json_file(&path)?, workers)?
            } else {
                let mut cfg = match (config, preset) {
                    (Some(path), _) => SweepConfig::from_json_file(&path)?,
                    (_, Some(name)) => SweepConfig::preset(&name)?,
                    _ => SweepConfig::default(),
                };
                if !n.is_empty() {
                    cfg.n_values = n;
                }
                if !c.is_empty() {
                    cfg.c_values = c;
                }
                if let Some(t) = trials {
                    cfg.trials = t;
                }
                if let Some(s) = seed {
                    cfg.master_seed = s;
                }
                if torsion {
                    cfg.compute_torsion = Some(true);
                }
                if timing {
                    cfg.record_wall_time = true;
                }
                if out_dir.is_some() {
                    cfg.out_dir = out_dir.clone();
                }
                run_sweep(&cfg, workers)?
            };
            let dir = out_dir
                .or_else(|| outcome.manifest.config.out_dir.clone())
                .context("no output directory: pass --out-dir or set out_dir in the config")?;
            outcome.write(&dir)?;
            print_table(&outcome);
            println!("wrote {}", dir.display());
            Ok(())
        }
        Command::OracleCheck { n_max, iters, seed } => {
            let report = oracle_check(n_max, iters, seed);
            for m in &report.mismatches {
                println!("MISMATCH {m}");
            }
            println!(
                "{} complexes, {} mismatches",
                report.complexes,
                report.mismatches.len()
            );
            if !report.passed() {
                bail!("oracle check failed");
            }
            Ok(())
        }
    }
}

fn constants(json: bool) -> Result<()> {
    let all = [solve_gamma2()?, solve_c2()?];
    if json {
        println!("{}", serde_json::to_string_pretty(&all)?);
        return Ok(());
    }
    let row = |k: &ThresholdConstant| {
        println!(
            "{:<7} {:.12}  root {:.15}  residual {:.1e}  bracket [{:.15}, {:.15}]",
            k.name, k.value, k.inner_root, k.residual, k.bracket[0], k.bracket[1]
        )
    };
    all.iter().for_each(row);
    Ok(())
}

#[derive(Serialize)]
struct Analysis {
    n: usize,
    f: [usize; 3],
    euler_characteristic: i64,
    f2_core: usize,
    collapsible: bool,
    tetra: TetraReport,
    homology_q: HomologySummary,
    homology_f2: HomologySummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    homology_z: Option<HomologySummary>,
    certificate: Certificate,
}

fn analyze(file: PathBuf, torsion: bool, json: bool) -> Result<()> {
    let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let c = Complex2::from_text(&text)?;
    let (core, _) = collapse_fully(&c);
    let cert = certify_with(&c, CertifyOptions { torsion });
    let a = Analysis {
        n: c.n(),
        f: [c.f0(), c.f1(), c.f2()],
        euler_characteristic: c.euler_characteristic(),
        f2_core: core.f2(),
        collapsible: core.f2() == 0,
        tetra: cert.evidence.tetra.clone(),
        homology_q: betti_collapsed(&c, Coefficients::Rationals)?,
        homology_f2: betti_collapsed(&c, Coefficients::F2)?,
        homology_z: torsion.then(|| integral_homology_collapsed(&c)),
        certificate: cert,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&a)?);
        return Ok(());
    }
    println!("n = {}, f = {:?}, chi = {}", a.n, a.f, a.euler_characteristic);
    println!("core faces: {} (2-collapsible: {})", a.f2_core, a.collapsible);
    println!(
        "tetrahedron boundaries: {}, shared-face pairs: {}",
        a.tetra.boundaries.len(),
        a.tetra.shared_face_pairs.len()
    );
    println!("betti over Q:  {:?}", a.homology_q.betti);
    println!("betti over F2: {:?}", a.homology_f2.betti);
    if let Some(t) = a.certificate.evidence.torsion_h1.as_ref() {
        let f: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        println!("H_1 torsion: [{}]", f.join(", "));
    }
    println!("betti2(Z) = {}", a.certificate.evidence.homology_z.betti2());
    println!("verdict: {}", a.certificate.verdict.as_str());
    for note in &a.certificate.evidence.notes {
        println!("  note: {note}");
    }
    Ok(())
}

fn print_table(out: &SweepOutcome) {
    println!(
        "{:>5} {:>9} {:>6} {:>7} {:>7} {:>7} {:>10} {:>8} {:>8} {:>10}",
        "n", "c", "trials", "free", "notfree", "inconc", "f2core/n2", "tetra", "c^4/24", "b2Z/n2"
    );
    for r in &out.table.rows {
        println!(
            "{:>5} {:>9.6} {:>6} {:>7.3} {:>7.3} {:>7.3} {:>10.5} {:>8.3} {:>8.3} {:>10.5}",
            r.n,
            r.c,
            r.trials,
            r.frac_free,
            r.frac_not_free,
            r.frac_inconclusive,
            r.f2_core_over_n2_mean,
            r.tetra_mean,
            r.tetra_predicted,
            r.betti2_z_over_n2_mean.unwrap_or(f64::NAN)
        );
    }
}
