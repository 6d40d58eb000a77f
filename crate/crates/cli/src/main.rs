//! Command-line Monte Carlo experiment runner.
//!
//! Subcommands map one-to-one onto the experiment kinds (`nmse-sinr`,
//! `nmse-samples`, `sr-sinr`, `rank-detect`) plus `flops` for the
//! closed-form complexity counts. Scenario parameters come from an
//! optional flat key=value config file; command-line flags override file
//! values. Each run writes `trials.csv`, `aggregate.csv`,
//! `plot.<kind>.txt` and `meta.txt` into the output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jamcov::beamform::flop_counts;
use jamcov::estimators::Method;
use jamcov::sim::{
    emit_csv, emit_plot_script, run_experiment, write_meta, ExperimentKind, ExperimentSpec,
    RankMode, SinrMode,
};
use jamcov::system::SystemConfig;

#[derive(Parser)]
#[command(
    name = "jamcov",
    about = "Monte Carlo simulator for jamming-covariance estimation and interference-nulling beamforming in secure spatial modulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimation error versus SINR (fixed sample count).
    NmseSinr(RunArgs),
    /// Estimation error versus sample count (fixed SINR).
    NmseSamples(RunArgs),
    /// Secrecy rate versus SINR.
    SrSinr(RunArgs),
    /// AIC rank-detection statistics versus sample count (fixed SINR).
    RankDetect(RunArgs),
    /// Print the closed-form FLOP counts of the estimators.
    Flops(FlopsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value scenario/experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for the experiment's random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated methods: scm,evd,pca-evd,jd,ideal.
    #[arg(long)]
    methods: Option<String>,
    /// Rank source: oracle | aic.
    #[arg(long)]
    rank_mode: Option<String>,
    /// Sweep-to-power mapping: jamming-power | split | split:ETA | split:ETA:GAMMA.
    #[arg(long)]
    sinr_mode: Option<String>,
    /// Sweep grid (comma-separated values: dB for SINR sweeps, counts for
    /// sample sweeps).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Fixed SINR (dB) for the sample-count and rank-detection sweeps.
    #[arg(long, allow_hyphen_values = true)]
    sinr: Option<f64>,
    /// Draws of the inner mutual-information Monte Carlo (SR sweep).
    #[arg(long)]
    mi_draws: Option<usize>,
    /// Worker threads (0 = one per logical CPU).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct FlopsArgs {
    /// Snapshot count K.
    #[arg(long, default_value_t = 8)]
    samples: u64,
    /// Covariance dimension N_r.
    #[arg(long, default_value_t = 8)]
    dim: u64,
    /// Interference rank r.
    #[arg(long, default_value_t = 3)]
    rank: u64,
    /// Receive antennas N_b (rotation-pair count).
    #[arg(long, default_value_t = 8)]
    nb: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let (kind, args) = match cli.command {
        Command::NmseSinr(a) => (ExperimentKind::NmseVsSinr, a),
        Command::NmseSamples(a) => (ExperimentKind::NmseVsSamples, a),
        Command::SrSinr(a) => (ExperimentKind::SrVsSinr, a),
        Command::RankDetect(a) => (ExperimentKind::RankDetection, a),
        Command::Flops(f) => {
            if !(f.rank >= 1 && f.rank < f.dim) {
                return Err(format!("rank must satisfy 1 <= r < dim, got r={} dim={}", f.rank, f.dim));
            }
            if f.samples < f.rank {
                return Err(format!("samples must be >= rank, got K={} r={}", f.samples, f.rank));
            }
            let c = flop_counts(f.samples, f.dim, f.rank, f.nb);
            println!("K={} Nr={} r={} Nb={}", f.samples, f.dim, f.rank, f.nb);
            println!("SCM     {:>16}", c.scm);
            println!("PCA-EVD {:>16}", c.pca_evd);
            println!("JD      {:>16}", c.jd);
            return Ok(());
        }
    };

    let spec = build_spec(kind, &args)?;
    spec.validate().map_err(|e| e.to_string())?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create output directory {}: {e}", args.out.display()))?;

    let t0 = std::time::Instant::now();
    let records = run_experiment(&spec).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();

    let (trials_path, aggregate_path) = emit_csv(&records, &spec, &args.out).map_err(|e| e.to_string())?;
    let plot_path = args.out.join(format!("plot.{}.txt", kind.key()));
    emit_plot_script(&aggregate_path, kind, &plot_path).map_err(|e| e.to_string())?;
    let meta_path = write_meta(&spec, &args.out).map_err(|e| e.to_string())?;

    println!(
        "{} complete: {} trials x {} sweep points in {elapsed:.1} s",
        kind,
        spec.trials,
        spec.sweep_values.len()
    );
    for p in [&trials_path, &aggregate_path, &plot_path, &meta_path] {
        println!("  wrote {}", p.display());
    }
    Ok(())
}

fn build_spec(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentSpec, String> {
    let mut spec = ExperimentSpec::new(kind, SystemConfig::default());
    if let Some(path) = &args.config {
        apply_config_file(&mut spec, path)?;
    }
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    if let Some(methods) = &args.methods {
        spec.methods = parse_methods(methods)?;
    }
    if let Some(mode) = &args.rank_mode {
        spec.rank_mode =
            RankMode::parse(mode).ok_or_else(|| format!("unknown rank mode '{mode}' (oracle|aic)"))?;
    }
    if let Some(mode) = &args.sinr_mode {
        spec.sinr_mode = SinrMode::parse(mode)
            .ok_or_else(|| format!("unknown sinr mode '{mode}' (jamming-power|split[:eta[:gamma]])"))?;
    }
    if let Some(grid) = &args.grid {
        spec.sweep_values = parse_grid(grid)?;
    }
    if let Some(sinr) = args.sinr {
        spec.fixed_sinr_db = sinr;
    }
    if let Some(draws) = args.mi_draws {
        spec.mi_draws = draws;
    }
    if let Some(workers) = args.workers {
        spec.workers = workers;
    }
    Ok(spec)
}

fn parse_methods(list: &str) -> Result<Vec<Method>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Method::parse(s).ok_or_else(|| format!("unknown method '{s}'")))
        .collect()
}

fn parse_grid(list: &str) -> Result<Vec<f64>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("bad grid value '{s}': {e}")))
        .collect()
}

/// Flat `key = value` file; `#` starts a comment. Unknown keys are errors
/// so typos do not silently fall back to defaults.
fn apply_config_file(spec: &mut ExperimentSpec, path: &PathBuf) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut nt_explicit = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |e: String| format!("{}:{}: {key}: {e}", path.display(), lineno + 1);
        let parse_usize = |v: &str| v.parse::<usize>().map_err(|e| bad(e.to_string()));
        let parse_f64 = |v: &str| v.parse::<f64>().map_err(|e| bad(e.to_string()));
        let c = &mut spec.config;
        match key {
            "nx" => c.nx = parse_usize(value)?,
            "nt" => {
                c.nt = parse_usize(value)?;
                nt_explicit = true;
            }
            "nb" => c.nb = parse_usize(value)?,
            "nm" => c.nm = parse_usize(value)?,
            "nm_prime" => c.nm_prime = parse_usize(value)?,
            "beta" => c.beta = parse_f64(value)?,
            "p" => c.p = parse_f64(value)?,
            "p_m" => c.p_m = parse_f64(value)?,
            "sigma_a2" => c.sigma_a2 = parse_f64(value)?,
            "sigma_m2" => c.sigma_m2 = parse_f64(value)?,
            "sigma_b2" => c.sigma_b2 = parse_f64(value)?,
            "sigma_mrx2" => c.sigma_mrx2 = parse_f64(value)?,
            "mod_order" => c.mod_order = parse_usize(value)?,
            "samples" => c.samples = parse_usize(value)?,
            "trials" => spec.trials = parse_usize(value)?,
            "seed" => spec.master_seed = value.parse::<u64>().map_err(|e| bad(e.to_string()))?,
            "methods" => spec.methods = parse_methods(value).map_err(bad)?,
            "rank_mode" => {
                spec.rank_mode = RankMode::parse(value).ok_or_else(|| bad("oracle|aic".into()))?
            }
            "sinr_mode" => {
                spec.sinr_mode = SinrMode::parse(value)
                    .ok_or_else(|| bad("jamming-power|split[:eta[:gamma]]".into()))?
            }
            "grid" => spec.sweep_values = parse_grid(value).map_err(bad)?,
            "sinr_db" => spec.fixed_sinr_db = parse_f64(value)?,
            "mi_draws" => spec.mi_draws = parse_usize(value)?,
            "workers" => spec.workers = parse_usize(value)?,
            other => return Err(bad(format!("unknown key '{other}'"))),
        }
    }
    if !nt_explicit {
        spec.config.nt = SystemConfig::derived_nt(spec.config.nx);
    }
    Ok(())
}
