//! `hspm`: channel synthesis, model-mismatch sweeps, dataset export and
//! two-phase channel estimation from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical or
//! convergence failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hspm_core::channel::{farfield_metric, synth, ModelKind};
use hspm_core::estimation::{AngleGrid, Perturbation};
use hspm_core::experiment::{
    run_estimate, run_eval, run_sweep, write_eval_csv, write_sweep_csv, CodebookSpec, EstimateOptions,
    EvalConfig, Phase1Method, SweepAxis, SweepConfig,
};
use hspm_core::io::{
    export_dataset, import_external_estimates, load_scene, read_json, save_scene, write_json, write_matrix,
    DatasetConfig,
};
use hspm_core::sampler::{sample_scene, SamplerConfig};
use hspm_core::{Error, Result};

#[derive(Parser)]
#[command(name = "hspm", version, about = "Hybrid spherical/planar wave channel toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a channel matrix file.
    Synth {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Model mismatch of PWM and HSPM against SWM along one axis, as CSV.
    Sweep {
        #[arg(long)]
        axis: SweepAxis,
        /// Sweep config JSON; the standard configuration for the axis if absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the far-field metric of a scene.
    Ffmetric {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Export a training set (manifest.json, samples.bin, labels.bin).
    Dataset {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run two-phase estimation on one scene and write a JSON report.
    Estimate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        phase1: Phase1Method,
        /// External estimates JSON, required with `--phase1 external`.
        #[arg(long)]
        estimates: Option<PathBuf>,
        /// Received SNR in dB; noise-free if absent.
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth model.
        #[arg(long, default_value = "swm")]
        truth: ModelKind,
        /// Standard deviation of the oracle angle perturbation, radians.
        #[arg(long, default_value_t = 0.0)]
        angle_sigma: f64,
        #[arg(long, default_value_t = 4)]
        codewords: usize,
        /// Report zero runtimes so the output is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Monte Carlo NMSE of several estimators, as CSV.
    Eval {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a randomly sampled scene file.
    GenScene {
        /// Sampler config JSON; defaults if absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Synth { scene, model, out } => {
            let s = load_scene(&scene)?;
            let mut h = synth(&s, model)?;
            h.scene_hash = s.fingerprint();
            write_matrix(&out, &h)?;
            println!("{} x {} {} channel written to {}", h.nrows(), h.ncols(), model, out.display());
        }
        Cmd::Sweep { axis, config, out } => {
            let cfg = match config {
                Some(p) => {
                    let c: SweepConfig = read_json(&p)?;
                    if c.axis != axis {
                        return Err(Error::validation("axis", format!("config sweeps {}, not {axis}", c.axis)));
                    }
                    c
                }
                None => SweepConfig::standard(axis),
            };
            let rows = run_sweep(&cfg)?;
            write_sweep_csv(&out, axis, &rows)?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
        Cmd::Ffmetric { scene } => {
            println!("{}", farfield_metric(&load_scene(&scene)?));
        }
        Cmd::Dataset { config, out, seed } => {
            let cfg: DatasetConfig = read_json(&config)?;
            let m = export_dataset(&cfg, &out, seed)?;
            println!("{} samples of shape {:?} written to {}", m.num_samples, m.sample_shape, out.display());
        }
        Cmd::Estimate {
            scene,
            phase1,
            estimates,
            snr,
            seed,
            out,
            truth,
            angle_sigma,
            codewords,
            no_timing,
        } => {
            let s = load_scene(&scene)?;
            let external = match (phase1, estimates) {
                (Phase1Method::External, Some(p)) => Some(import_external_estimates(&p)?),
                (Phase1Method::External, None) => {
                    return Err(Error::invalid("--phase1 external needs --estimates"));
                }
                _ => None,
            };
            let opts = EstimateOptions {
                phase1,
                truth,
                snr_db: snr.unwrap_or(f64::INFINITY),
                seed,
                codebook: CodebookSpec {
                    tx_codewords: codewords,
                    rx_codewords: codewords,
                    n_s: None,
                },
                grid: AngleGrid::default(),
                perturbation: Perturbation::angles(angle_sigma),
                external,
                timing: !no_timing,
                ..EstimateOptions::default()
            };
            let report = run_estimate(&s, &opts)?;
            write_json(&out, &report)?;
            println!("nmse_db {}", report.nmse_db);
        }
        Cmd::Eval { config, trials, out } => {
            let cfg: EvalConfig = match config {
                Some(p) => read_json(&p)?,
                None => EvalConfig::default(),
            };
            let rows = run_eval(&cfg, trials)?;
            write_eval_csv(&out, &rows)?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
        Cmd::GenScene { config, seed, index, out } => {
            let cfg: SamplerConfig = match config {
                Some(p) => read_json(&p)?,
                None => SamplerConfig::default(),
            };
            let s = sample_scene(&cfg, seed, index)?;
            save_scene(&out, &s)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}
