//! Seeded parallel Monte Carlo experiment runner.
//!
//! An [`ExperimentSpec`] describes one sweep (which quantity varies, the
//! grid, the trial count, which estimators run). Every trial derives its
//! own random stream from the master seed and its `(sweep, trial)` cell
//! through the counter-based ChaCha generator, so results are bit-identical
//! for a given seed no matter how many worker threads execute the trials or
//! in which order they finish.
//!
//! Outputs are plain CSV: one row per trial plus a companion aggregate file
//! (mean and standard error per cell), and a gnuplot script per figure
//! kind that references exactly the series present in the aggregate.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::beamform::{flop_counts, nmse, secrecy_rate, sjnr, zfc_rbf, MetricsRecord, DEFAULT_MI_DRAWS};
use crate::estimators::{evd_truncate, ideal_estimate, jd, pca_evd, scm, Method};
use crate::rank::detect_rank;
use crate::system::{
    draw_channels, jamming_only_sample, population_interference_cov, sinr_to_jamming_power,
    SystemConfig, SystemError, TransmitSymbol,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("i/o failure on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed csv at {path}: {reason}")]
    MalformedCsv { path: PathBuf, reason: String },
}

/// Which figure an experiment reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Estimation error versus the swept ratio, fixed sample count.
    NmseVsSinr,
    /// Estimation error versus sample count, fixed ratio.
    NmseVsSamples,
    /// Secrecy rate versus the swept ratio.
    SrVsSinr,
    /// Rank-detection statistics versus sample count, fixed ratio.
    RankDetection,
}

impl ExperimentKind {
    pub fn key(&self) -> &'static str {
        match self {
            ExperimentKind::NmseVsSinr => "nmse-sinr",
            ExperimentKind::NmseVsSamples => "nmse-samples",
            ExperimentKind::SrVsSinr => "sr-sinr",
            ExperimentKind::RankDetection => "rank-detect",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// How the per-trial rank is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMode {
    /// Use the configured true jamming stream count.
    Oracle,
    /// Detect from the slot-1 samples.
    Aic,
}

impl RankMode {
    pub fn parse(s: &str) -> Option<RankMode> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" => Some(RankMode::Oracle),
            "aic" => Some(RankMode::Aic),
            _ => None,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            RankMode::Oracle => "oracle",
            RankMode::Aic => "aic",
        }
    }
}

/// Mapping from a swept SINR value to scenario powers.
///
/// The axis is defined as `beta P / (p_m sigma_m2 nm_prime + sigma_b2)` in
/// both modes; they differ in how the denominator budget is split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SinrMode {
    /// Solve for the jamming power with the configured receiver noise held
    /// fixed. Low SINR means overwhelming jamming against a quiet receiver.
    JammingPower,
    /// Split the denominator budget between jamming and noise so the
    /// jamming-to-noise ratio rises with the axis: at swept value `s` (dB)
    /// the noise receives `1 / (1 + eta 10^(gamma s / 10))` of the budget
    /// and the jamming the rest. Low SINR then means a noise-dominated
    /// estimation slot and high SINR a clean one, the regime sweep in which
    /// the estimators separate; `gamma > 1` compresses the transition so
    /// the curves flatten within the plotted range.
    Split { eta: f64, gamma: f64 },
}

impl SinrMode {
    pub fn key(&self) -> String {
        match self {
            SinrMode::JammingPower => "jamming-power".into(),
            SinrMode::Split { eta, gamma } => format!("split:{eta}:{gamma}"),
        }
    }

    pub fn parse(s: &str) -> Option<SinrMode> {
        let lower = s.to_ascii_lowercase();
        if lower == "jamming-power" {
            return Some(SinrMode::JammingPower);
        }
        if lower == "split" {
            return Some(SinrMode::Split { eta: DEFAULT_SPLIT_ETA, gamma: DEFAULT_SPLIT_GAMMA });
        }
        if let Some(rest) = lower.strip_prefix("split:") {
            let mut parts = rest.splitn(2, ':');
            let eta = parts.next()?.parse::<f64>().ok().filter(|e| *e > 0.0)?;
            let gamma = match parts.next() {
                Some(g) => g.parse::<f64>().ok().filter(|g| *g > 0.0)?,
                None => DEFAULT_SPLIT_GAMMA,
            };
            return Some(SinrMode::Split { eta, gamma });
        }
        None
    }
}

/// Jamming-to-noise level constant of [`SinrMode::Split`]: the ratio at
/// the 0 dB sweep point.
pub const DEFAULT_SPLIT_ETA: f64 = 0.5;
/// Transition exponent of [`SinrMode::Split`].
pub const DEFAULT_SPLIT_GAMMA: f64 = 4.0;

/// Default SINR grid: -10 to 15 dB in 2.5 dB steps.
pub fn default_sinr_grid() -> Vec<f64> {
    (0..11).map(|i| -10.0 + 2.5 * i as f64).collect()
}

/// Default sample-count grid for the sample sweep.
pub fn default_sample_grid() -> Vec<f64> {
    vec![4.0, 6.0, 8.0, 12.0, 16.0]
}

/// One experiment: sweep grid, trial budget, scenario config and methods.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub sweep_values: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub config: SystemConfig,
    pub methods: Vec<Method>,
    pub rank_mode: RankMode,
    pub sinr_mode: SinrMode,
    /// SINR point used by the sample-count and rank-detection sweeps.
    pub fixed_sinr_db: f64,
    /// Draw count of the inner mutual-information Monte Carlo.
    pub mi_draws: usize,
    /// Worker threads; 0 means one per logical CPU.
    pub workers: usize,
}

impl ExperimentSpec {
    /// Experiment with the standard defaults for `kind`.
    pub fn new(kind: ExperimentKind, config: SystemConfig) -> Self {
        let (sweep_values, trials, methods, rank_mode, sinr_mode) = match kind {
            ExperimentKind::NmseVsSinr => (
                default_sinr_grid(),
                2000,
                vec![Method::Scm, Method::Evd, Method::PcaEvd, Method::Jd],
                RankMode::Oracle,
                SinrMode::Split { eta: DEFAULT_SPLIT_ETA, gamma: DEFAULT_SPLIT_GAMMA },
            ),
            ExperimentKind::NmseVsSamples => (
                default_sample_grid(),
                2000,
                vec![Method::Scm, Method::Evd, Method::PcaEvd, Method::Jd],
                RankMode::Oracle,
                SinrMode::Split { eta: DEFAULT_SPLIT_ETA, gamma: DEFAULT_SPLIT_GAMMA },
            ),
            ExperimentKind::SrVsSinr => (
                default_sinr_grid(),
                500,
                vec![Method::Scm, Method::Evd, Method::PcaEvd, Method::Jd, Method::Ideal],
                RankMode::Oracle,
                SinrMode::Split { eta: DEFAULT_SPLIT_ETA, gamma: DEFAULT_SPLIT_GAMMA },
            ),
            ExperimentKind::RankDetection => (
                vec![8.0, 16.0, 32.0, 64.0, 100.0],
                1000,
                vec![Method::PcaEvd],
                RankMode::Aic,
                SinrMode::JammingPower,
            ),
        };
        // the SR sweep trades inner-loop draws for runtime; the per-call
        // default of secrecy_rate itself stays DEFAULT_MI_DRAWS
        let mi_draws = match kind {
            ExperimentKind::SrVsSinr => 400,
            _ => DEFAULT_MI_DRAWS,
        };
        Self {
            kind,
            sweep_values,
            trials,
            master_seed: 1,
            config,
            methods,
            rank_mode,
            sinr_mode,
            fixed_sinr_db: -5.0,
            mi_draws,
            workers: 0,
        }
    }

    /// Scenario at one sweep point: resolves the swept value into the
    /// config (jamming power and/or noise, or sample count).
    pub fn resolve_point(&self, sweep_value: f64) -> Result<SystemConfig, SimError> {
        let mut cfg = self.config.clone();
        let sinr_db = match self.kind {
            ExperimentKind::NmseVsSinr | ExperimentKind::SrVsSinr => sweep_value,
            ExperimentKind::NmseVsSamples | ExperimentKind::RankDetection => {
                let l = sweep_value;
                if l < 2.0 || l.fract() != 0.0 {
                    return Err(SimError::InvalidSpec(format!(
                        "sample-count sweep values must be integers >= 2, got {l}"
                    )));
                }
                cfg.samples = l as usize;
                self.fixed_sinr_db
            }
        };
        match self.sinr_mode {
            SinrMode::JammingPower => {
                cfg.p_m = sinr_to_jamming_power(&cfg, sinr_db)?;
            }
            SinrMode::Split { eta, gamma } => {
                let budget = cfg.beta * cfg.p * 10f64.powf(-sinr_db / 10.0);
                let jam_to_noise = eta * 10f64.powf(gamma * sinr_db / 10.0);
                cfg.sigma_b2 = budget / (1.0 + jam_to_noise);
                cfg.sigma_mrx2 = cfg.sigma_b2;
                cfg.p_m = (budget - cfg.sigma_b2) / (cfg.sigma_m2 * cfg.nm_prime as f64);
            }
        }
        cfg.validate()?;
        if cfg.p_m <= 0.0 {
            return Err(SimError::InvalidSpec(format!(
                "sweep point {sweep_value} resolves to zero jamming power; the truth covariance would be zero"
            )));
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::InvalidSpec("trials must be >= 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(SimError::InvalidSpec("sweep grid is empty".into()));
        }
        if self.methods.is_empty() {
            return Err(SimError::InvalidSpec("method set is empty".into()));
        }
        let mut seen = Vec::new();
        for m in &self.methods {
            if seen.contains(m) {
                return Err(SimError::InvalidSpec(format!("duplicate method {m}")));
            }
            seen.push(*m);
        }
        if self.mi_draws == 0 {
            return Err(SimError::InvalidSpec("mi_draws must be >= 1".into()));
        }
        if let SinrMode::Split { eta, gamma } = self.sinr_mode {
            if !(eta > 0.0 && eta.is_finite() && gamma > 0.0 && gamma.is_finite()) {
                return Err(SimError::InvalidSpec(format!(
                    "split parameters must be positive, got eta={eta}, gamma={gamma}"
                )));
            }
        }
        if self.config.beta * self.config.p <= 0.0 {
            return Err(SimError::InvalidSpec(
                "beta * P must be positive to define the SINR axis".into(),
            ));
        }
        if matches!(self.kind, ExperimentKind::NmseVsSinr | ExperimentKind::SrVsSinr)
            && self.config.samples < 2
        {
            return Err(SimError::InvalidSpec(
                "estimation needs at least two snapshots per trial".into(),
            ));
        }
        self.config.validate()?;
        // every sweep point must resolve before any trial runs
        for &v in &self.sweep_values {
            self.resolve_point(v)?;
        }
        Ok(())
    }
}

/// One Monte Carlo trial's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub trial_index: usize,
    /// Stream id of the trial's random source (derived injectively from the
    /// sweep and trial indices).
    pub seed: u64,
    /// Detected (or oracle) interference rank; estimators use it clamped
    /// to `min(L - 1, nb - 1)`.
    pub detected_rank: usize,
    /// Convergence of the joint-diagonalization sweeps, when JD ran.
    pub jd_converged: Option<bool>,
    /// Metrics per method, in the experiment's method order.
    pub metrics: Vec<(Method, MetricsRecord)>,
}

fn trial_stream(sweep_idx: usize, trial_idx: usize) -> u64 {
    ((sweep_idx as u64) << 40) | trial_idx as u64
}

fn run_trial(spec: &ExperimentSpec, sweep_idx: usize, trial_idx: usize) -> Result<TrialRecord, SimError> {
    let sweep_value = spec.sweep_values[sweep_idx];
    let cfg = spec.resolve_point(sweep_value)?;
    let stream = trial_stream(sweep_idx, trial_idx);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.master_seed);
    rng.set_stream(stream);

    let ch = draw_channels(&cfg, &mut rng)?;
    let rjj = population_interference_cov(&cfg, &ch);
    let samples: Vec<_> = (0..cfg.samples)
        .map(|_| jamming_only_sample(&cfg, &ch, &mut rng))
        .collect();

    let detected = match spec.rank_mode {
        RankMode::Oracle => cfg.nm_prime,
        RankMode::Aic => detect_rank(&samples),
    };
    // estimators need r < min(L, Nb); a detected rank beyond that cannot be
    // used for reconstruction from L snapshots
    let r_eff = detected.min(cfg.samples - 1).min(cfg.nb - 1).max(1);

    let sym = TransmitSymbol::random(&cfg, &mut rng);
    let h_eff = ch.hs().col(sym.antenna);
    let flops = flop_counts(cfg.samples as u64, cfg.nb as u64, r_eff as u64, cfg.nb as u64);

    let mut jd_converged = None;
    let mut metrics = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let estimate = match method {
            Method::Scm => {
                // raw sample covariance (the comparison baseline); its
                // nulling subspace dimension is the trial rank
                let mut est = scm(&samples);
                est.rank_used = r_eff;
                est
            }
            Method::Evd => evd_truncate(&samples, r_eff),
            Method::PcaEvd => pca_evd(&samples, r_eff),
            Method::Jd => {
                let out = jd(&samples, r_eff);
                jd_converged = Some(out.converged);
                out.estimate
            }
            Method::Ideal => ideal_estimate(&rjj, cfg.nm_prime),
        };
        let err = nmse(&estimate.matrix, &rjj);
        let bf = zfc_rbf(&estimate, &h_eff);
        let ratio = sjnr(&bf, &cfg, &ch, &rjj, sym.antenna);
        let sr = if spec.kind == ExperimentKind::SrVsSinr {
            secrecy_rate(&cfg, &ch, &bf, &mut rng, spec.mi_draws)
        } else {
            f64::NAN
        };
        let fl = match method {
            Method::Scm => flops.scm,
            Method::PcaEvd => flops.pca_evd,
            Method::Jd => flops.jd,
            Method::Evd | Method::Ideal => 0,
        };
        metrics.push((method, MetricsRecord { nmse: err, sjnr: ratio, secrecy_rate: sr, flops: fl }));
    }

    Ok(TrialRecord {
        sweep_value,
        trial_index: trial_idx,
        seed: stream,
        detected_rank: detected,
        jd_converged,
        metrics,
    })
}

/// Runs every `(sweep, trial)` cell on a worker pool and returns the
/// records sorted by cell. Deterministic for a fixed master seed
/// independent of worker count and scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>, SimError> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.sweep_values.len())
        .flat_map(|si| (0..spec.trials).map(move |ti| (si, ti)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| SimError::InvalidSpec(format!("worker pool: {e}")))?;
    let mut records = pool.install(|| {
        jobs.par_iter()
            .map(|&(si, ti)| run_trial(spec, si, ti).map(|r| ((si, ti), r)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    records.sort_by_key(|((si, ti), _)| (*si, *ti));
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

// ── CSV output ───────────────────────────────────────────────────────────

/// 12 significant digits, round-trippable.
fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.11e}")
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), SimError> {
    let mut f = std::fs::File::create(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(contents.as_bytes()).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn trials_header(methods: &[Method]) -> String {
    let mut cols = vec![
        "sweep_value".to_string(),
        "trial_index".to_string(),
        "seed".to_string(),
        "detected_rank".to_string(),
        "jd_converged".to_string(),
    ];
    for m in methods {
        for metric in ["nmse", "sjnr", "sr", "flops"] {
            cols.push(format!("{metric}_{}", m.key()));
        }
    }
    cols.join(",")
}

/// Writes one row per trial to `trials.csv` and per-cell aggregates to
/// `aggregate.csv` inside `dir`; returns both paths.
pub fn emit_csv(
    records: &[TrialRecord],
    spec: &ExperimentSpec,
    dir: &Path,
) -> Result<(PathBuf, PathBuf), SimError> {
    if records.is_empty() {
        return Err(SimError::InvalidSpec("no records to write".into()));
    }
    spec.validate()?;

    let mut out = String::new();
    out.push_str(&trials_header(&spec.methods));
    out.push('\n');
    for r in records {
        let mut row = vec![
            fmt_float(r.sweep_value),
            r.trial_index.to_string(),
            r.seed.to_string(),
            r.detected_rank.to_string(),
            r.jd_converged.map(|b| b.to_string()).unwrap_or_default(),
        ];
        assert_eq!(r.metrics.len(), spec.methods.len(), "record/method mismatch");
        for ((m, rec), want) in r.metrics.iter().zip(&spec.methods) {
            assert_eq!(m, want, "method order mismatch in record");
            row.push(fmt_float(rec.nmse));
            row.push(fmt_float(rec.sjnr));
            row.push(fmt_float(rec.secrecy_rate));
            row.push(rec.flops.to_string());
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let trials_path = dir.join("trials.csv");
    write_file(&trials_path, &out)?;

    let aggregate_path = dir.join("aggregate.csv");
    write_file(&aggregate_path, &aggregate_csv(records, spec))?;
    Ok((trials_path, aggregate_path))
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn aggregate_csv(records: &[TrialRecord], spec: &ExperimentSpec) -> String {
    let mut cols = vec!["sweep_value".to_string(), "trials".to_string()];
    for m in &spec.methods {
        for metric in ["nmse", "sjnr", "sr"] {
            cols.push(format!("{metric}_mean_{}", m.key()));
            cols.push(format!("{metric}_se_{}", m.key()));
        }
    }
    cols.push("rank_match_rate".into());
    cols.push("mean_detected_rank".into());
    let mut out = cols.join(",");
    out.push('\n');

    for &sweep in &spec.sweep_values {
        let cell: Vec<&TrialRecord> = records.iter().filter(|r| r.sweep_value == sweep).collect();
        if cell.is_empty() {
            continue;
        }
        let mut row = vec![fmt_float(sweep), cell.len().to_string()];
        for (mi, _) in spec.methods.iter().enumerate() {
            for metric in 0..3 {
                let vals: Vec<f64> = cell
                    .iter()
                    .map(|r| {
                        let rec = &r.metrics[mi].1;
                        match metric {
                            0 => rec.nmse,
                            1 => rec.sjnr,
                            _ => rec.secrecy_rate,
                        }
                    })
                    .collect();
                let (mean, se) = mean_and_se(&vals);
                row.push(fmt_float(mean));
                row.push(fmt_float(se));
            }
        }
        let hits = cell.iter().filter(|r| r.detected_rank == spec.config.nm_prime).count();
        row.push(fmt_float(hits as f64 / cell.len() as f64));
        let mean_rank = cell.iter().map(|r| r.detected_rank as f64).sum::<f64>() / cell.len() as f64;
        row.push(fmt_float(mean_rank));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads back a `trials.csv` produced by [`emit_csv`].
pub fn parse_trials_csv(path: &Path) -> Result<Vec<TrialRecord>, SimError> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |reason: String| SimError::MalformedCsv { path: path.to_path_buf(), reason };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols[0] != "sweep_value" {
        return Err(malformed("unexpected header".into()));
    }
    let mut methods = Vec::new();
    let mut i = 5;
    while i < cols.len() {
        let name = cols[i]
            .strip_prefix("nmse_")
            .ok_or_else(|| malformed(format!("unexpected column {}", cols[i])))?;
        let m = Method::parse(name).ok_or_else(|| malformed(format!("unknown method {name}")))?;
        methods.push(m);
        i += 4;
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(malformed(format!("row {} has {} fields, expected {}", lineno + 2, fields.len(), cols.len())));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| malformed(format!("bad float {s}: {e}")));
        let sweep_value = parse_f(fields[0])?;
        let trial_index = fields[1].parse::<usize>().map_err(|e| malformed(e.to_string()))?;
        let seed = fields[2].parse::<u64>().map_err(|e| malformed(e.to_string()))?;
        let detected_rank = fields[3].parse::<usize>().map_err(|e| malformed(e.to_string()))?;
        let jd_converged = match fields[4] {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            other => return Err(malformed(format!("bad jd_converged {other}"))),
        };
        let mut metrics = Vec::new();
        for (k, m) in methods.iter().enumerate() {
            let base = 5 + 4 * k;
            metrics.push((
                *m,
                MetricsRecord {
                    nmse: parse_f(fields[base])?,
                    sjnr: parse_f(fields[base + 1])?,
                    secrecy_rate: parse_f(fields[base + 2])?,
                    flops: fields[base + 3].parse::<u64>().map_err(|e| malformed(e.to_string()))?,
                },
            ));
        }
        records.push(TrialRecord {
            sweep_value,
            trial_index,
            seed,
            detected_rank,
            jd_converged,
            metrics,
        });
    }
    Ok(records)
}

// ── plot script ──────────────────────────────────────────────────────────

/// Writes a gnuplot script for the aggregate file, one series per method
/// present in its header. NMSE figures use a log-scale y axis.
pub fn emit_plot_script(
    aggregate_path: &Path,
    kind: ExperimentKind,
    out_path: &Path,
) -> Result<(), SimError> {
    let text = std::fs::read_to_string(aggregate_path).map_err(|source| SimError::Io {
        path: aggregate_path.to_path_buf(),
        source,
    })?;
    let header = text.lines().next().unwrap_or_default();
    let cols: Vec<&str> = header.split(',').collect();

    let (metric, ylabel, logscale, xlabel) = match kind {
        ExperimentKind::NmseVsSinr => ("nmse", "NMSE", true, "SINR (dB)"),
        ExperimentKind::NmseVsSamples => ("nmse", "NMSE", true, "number of samples"),
        ExperimentKind::SrVsSinr => ("sr", "secrecy rate (bits per channel use)", false, "SINR (dB)"),
        ExperimentKind::RankDetection => ("rank_match_rate", "detection probability", false, "number of samples"),
    };

    let mut series: Vec<(String, usize, Option<usize>)> = Vec::new();
    if kind == ExperimentKind::RankDetection {
        let idx = cols
            .iter()
            .position(|c| *c == "rank_match_rate")
            .ok_or_else(|| SimError::MalformedCsv {
                path: aggregate_path.to_path_buf(),
                reason: "rank_match_rate column missing".into(),
            })?;
        series.push(("AIC".into(), idx + 1, None));
    } else {
        for (i, c) in cols.iter().enumerate() {
            if let Some(rest) = c.strip_prefix(&format!("{metric}_mean_")) {
                let m = Method::parse(rest).ok_or_else(|| SimError::MalformedCsv {
                    path: aggregate_path.to_path_buf(),
                    reason: format!("unknown method column {c}"),
                })?;
                let se_idx = cols.iter().position(|s| *s == format!("{metric}_se_{rest}"));
                series.push((m.to_string(), i + 1, se_idx.map(|x| x + 1)));
            }
        }
        if series.is_empty() {
            return Err(SimError::MalformedCsv {
                path: aggregate_path.to_path_buf(),
                reason: format!("no {metric}_mean_* columns in aggregate"),
            });
        }
    }

    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    s.push_str(&format!("set ylabel '{ylabel}'\n"));
    if logscale {
        s.push_str("set logscale y\n");
    }
    s.push_str("set key outside right\nset grid\n");
    let data = aggregate_path
        .file_name()
        .map(|f| f.to_string_lossy().to_string())
        .unwrap_or_else(|| aggregate_path.display().to_string());
    let mut plots = Vec::new();
    for (label, col, se) in &series {
        match se {
            Some(se_col) => plots.push(format!(
                "'{data}' every ::1 using 1:{col}:{se_col} with yerrorlines title '{label}'"
            )),
            None => plots.push(format!(
                "'{data}' every ::1 using 1:{col} with linespoints title '{label}'"
            )),
        }
    }
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    write_file(out_path, &s)
}

/// Human-readable record of the run conventions next to the CSVs.
pub fn write_meta(spec: &ExperimentSpec, dir: &Path) -> Result<PathBuf, SimError> {
    let c = &spec.config;
    let mut s = String::new();
    s.push_str(&format!("experiment = {}\n", spec.kind));
    s.push_str(&format!("master_seed = {}\n", spec.master_seed));
    s.push_str(&format!("trials_per_point = {}\n", spec.trials));
    s.push_str(&format!(
        "sweep_values = {}\n",
        spec.sweep_values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    ));
    s.push_str(&format!(
        "methods = {}\n",
        spec.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
    ));
    s.push_str(&format!("rank_mode = {}\n", spec.rank_mode.key()));
    s.push_str(&format!("sinr_mode = {}\n", spec.sinr_mode.key()));
    s.push_str(&format!("fixed_sinr_db = {}\n", spec.fixed_sinr_db));
    s.push_str(&format!("mi_draws = {}\n", spec.mi_draws));
    s.push_str(&format!(
        "config: nx={} nt={} nb={} nm={} nm_prime={} beta={} p={} p_m={} sigma_a2={} sigma_m2={} sigma_b2={} sigma_mrx2={} mod_order={} samples={}\n",
        c.nx, c.nt, c.nb, c.nm, c.nm_prime, c.beta, c.p, c.p_m, c.sigma_a2, c.sigma_m2, c.sigma_b2,
        c.sigma_mrx2, c.mod_order, c.samples
    ));
    s.push_str("conventions:\n");
    s.push_str("  - the SCM curve is the raw sample covariance scored against the jamming covariance; its beamformer nulls the trial-rank principal subspace.\n");
    s.push_str("  - Mallory's receiver whitens with its own interference-plus-noise covariance (artificial noise + residual self-interference + thermal noise).\n");
    s.push_str("  - secrecy rate uses Monte Carlo mutual information of the discrete spatial-modulation alphabet.\n");
    let path = dir.join("meta.txt");
    write_file(&path, &s)?;
    Ok(path)
}
