//! Command-line front end: `simulate`, `run`, `compare` and `check`.
//!
//! Exit codes: 0 ok, 1 usage or configuration error, 2 data error, 3 property failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::check::{self, CheckOptions, Mutation};
use crate::config::{ConfigError, RunConfig};
use crate::eqf::OutputModel;
use crate::ins::InsState;
use crate::io::{self, fmt_f64, DataError};
use crate::metrics::{self, AneesSummary, MetricSeries, SweepGrid};
use crate::sim::{self, FilterRun, NoiseSpec, RunArtifacts, RunResult, SensorLog, Stream};
use crate::symmetry::SymmetryKind;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "INS_EQF_THREADS";

pub const CONFIG_ECHO: &str = "config.toml";
pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const ANEES_FILE: &str = "anees.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

pub const METRICS_HEADER: [&str; 10] =
    ["kind", "t", "runs", "attitude_deg", "velocity", "position", "gyro_bias", "acc_bias", "anees", "nis"];
pub const ANEES_HEADER: [&str; 3] = ["kind", "transient", "asymptotic"];
pub const FAILURES_HEADER: [&str; 3] = ["run", "kind", "message"];
pub const SWEEP_HEADER: [&str; 8] = ["kind_a", "kind_b", "axis", "attitude", "magnitude", "l_a", "l_b", "difference"];

/// Largest error dimension; narrower kinds leave the trailing sigma and error cells empty.
const MAX_DIM: usize = 18;

pub fn estimates_header() -> Vec<String> {
    let mut h: Vec<String> = ["kind", "t"].iter().map(|s| s.to_string()).collect();
    h.extend(io::TRUTH_HEADER[1..].iter().map(|s| s.to_string()));
    h.extend(["bvx", "bvy", "bvz", "nis", "nees"].iter().map(|s| s.to_string()));
    h.extend((0..MAX_DIM).map(|i| format!("sigma{i}")));
    h.extend((0..MAX_DIM).map(|i| format!("eps{i}")));
    h
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{0}")]
    Property(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Property(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ins-eqf", version, about = "Equivariant filters for biased inertial navigation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic imu/gnss/truth log.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Zero all sensor noise and bias walks in the generated log (the prior draw stays).
        #[arg(long)]
        noise_free: bool,
    },
    /// Run every kind over a CSV log directory.
    Run {
        /// Directory holding imu.csv, gnss.csv and optionally truth.csv.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo comparison: ANEES table, metric series and optional sweep panels.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Also write the linearization sweep.
        #[arg(long)]
        sweep: bool,
    },
    /// Run the invariant property suite.
    Check {
        #[arg(long, default_value_t = CheckOptions::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = CheckOptions::default().samples)]
        samples: usize,
        /// Flip the sign of the gravity term in the closed-form state matrix.
        #[arg(long)]
        mutate_gravity: bool,
    },
}

/// Config file plus overrides; flags win over the file.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated kinds: mekf, iekf, tfg, tg, dp, sd.
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<SymmetryKind>>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Trajectory duration in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub no_virtual_bias_update: bool,
    /// First-order position output for every kind.
    #[arg(long)]
    pub linear_output: bool,
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(k) = &self.kinds {
            cfg.kinds = k.clone();
        }
        if let Some(m) = self.runs {
            cfg.runs = m;
        }
        if let Some(d) = self.duration {
            cfg.trajectory.duration = d;
        }
        if self.no_virtual_bias_update {
            cfg.filter.virtual_bias_update = false;
        }
        if self.linear_output {
            cfg.filter.output = OutputModel::Linear;
        }
        let cfg = cfg.normalized();
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Sensor noise and bias walks removed; the prior is kept.
pub fn noise_free(noise: &NoiseSpec) -> NoiseSpec {
    NoiseSpec {
        gyro_noise: 0.0,
        acc_noise: 0.0,
        gyro_walk: 0.0,
        acc_walk: 0.0,
        vel_noise: 0.0,
        vel_walk: 0.0,
        position: 0.0,
        ..noise.clone()
    }
}

/// Log of run 0: initial truth drawn from the prior, sensors from `noise`.
pub fn simulate(cfg: &RunConfig, noise: &NoiseSpec) -> SensorLog {
    let x0 = sim::sample_prior(&cfg.noise.prior, &mut sim::stream_rng(cfg.seed, 0, Stream::Prior));
    sim::generate_from(&cfg.trajectory, noise, &x0, &cfg.filter_config().gravity, 0)
}

/// Runs each configured kind over `log` with the configured tuning.
pub fn run_log(cfg: &RunConfig, log: &SensorLog) -> Vec<FilterRun> {
    let fnoise = cfg.noise.filter_noise();
    let fc = cfg.filter_config();
    cfg.kinds.iter().map(|&k| sim::run_filter(k, log, &sim::prior_covariance(k, &cfg.noise.prior), &fnoise, &fc)).collect()
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| DataError::Io { path: dir.to_path_buf(), source }.into())
}

pub fn write_config_echo(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let p = dir.join(CONFIG_ECHO);
    std::fs::write(&p, cfg.to_toml()).map_err(|source| DataError::Io { path: p, source }.into())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_estimates(path: &Path, runs: &[FilterRun]) -> Result<(), DataError> {
    let header = estimates_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = runs.iter().flat_map(|r| {
        r.epochs.iter().map(move |e| {
            let mut row = vec![r.kind.name().to_string(), fmt_f64(e.t)];
            row.extend(io::state_cells(&e.estimate));
            row.extend(e.estimate.bias_vel.iter().map(|&v| fmt_f64(v)));
            row.push(opt(e.nis));
            row.push(opt(e.nees));
            row.extend((0..MAX_DIM).map(|i| opt(e.sigma_diag.get(i).copied())));
            row.extend((0..MAX_DIM).map(|i| opt(e.eps.as_ref().and_then(|v| v.get(i).copied()))));
            row
        })
    });
    io::write_table(path, &header, rows)
}

pub fn write_metrics(path: &Path, series: &[MetricSeries]) -> Result<(), DataError> {
    let rows = series.iter().flat_map(|s| {
        s.points.iter().map(move |p| {
            let r = &p.rmse;
            vec![
                s.kind.name().to_string(),
                fmt_f64(p.t),
                p.runs.to_string(),
                fmt_f64(r.attitude_deg),
                fmt_f64(r.velocity),
                fmt_f64(r.position),
                fmt_f64(r.gyro_bias),
                fmt_f64(r.acc_bias),
                opt(p.anees),
                opt(p.nis),
            ]
        })
    });
    io::write_table(path, &METRICS_HEADER, rows)
}

/// NIS-only metrics for logs without truth.
fn write_nis_metrics(path: &Path, runs: &[FilterRun]) -> Result<(), DataError> {
    let rows = runs.iter().flat_map(|r| {
        r.epochs.iter().map(move |e| {
            let mut row = vec![r.kind.name().to_string(), fmt_f64(e.t), "1".to_string()];
            row.extend(std::iter::repeat_n(String::new(), 6));
            row.push(opt(e.nis));
            row
        })
    });
    io::write_table(path, &METRICS_HEADER, rows)
}

pub fn write_anees(path: &Path, table: &[(SymmetryKind, Option<AneesSummary>)]) -> Result<(), DataError> {
    let rows = table.iter().map(|(k, s)| vec![k.name().to_string(), opt(s.map(|s| s.transient)), opt(s.map(|s| s.asymptotic))]);
    io::write_table(path, &ANEES_HEADER, rows)
}

pub fn write_failures(path: &Path, art: &RunArtifacts) -> Result<(), DataError> {
    let rows = art.runs.iter().flat_map(|r| {
        r.filters.iter().filter_map(move |f| f.failure.as_ref().map(|m| vec![r.run.to_string(), f.kind.name().to_string(), m.clone()]))
    });
    io::write_table(path, &FAILURES_HEADER, rows)
}

pub fn write_sweep(path: &Path, grids: &[SweepGrid]) -> Result<(), DataError> {
    let rows = grids.iter().flat_map(|g| {
        (0..g.attitude.len()).flat_map(move |i| {
            (0..g.magnitude.len()).map(move |j| {
                vec![
                    g.kind_a.name().to_string(),
                    g.kind_b.name().to_string(),
                    g.axis.name().to_string(),
                    fmt_f64(g.attitude[i]),
                    fmt_f64(g.magnitude[j]),
                    opt(g.l_a[i][j]),
                    opt(g.l_b[i][j]),
                    opt(g.difference(i, j)),
                ]
            })
        })
    });
    io::write_table(path, &SWEEP_HEADER, rows)
}

/// Single-run artifacts with the truth sampled at the record epochs of the longest filter.
fn single_run_artifacts(cfg: &RunConfig, log: &SensorLog, filters: Vec<FilterRun>) -> Option<RunArtifacts> {
    let longest = filters.iter().max_by_key(|f| f.epochs.len())?;
    let truth: Option<Vec<InsState>> = longest
        .epochs
        .iter()
        .map(|e| {
            let i = log.truth.partition_point(|s| s.t < e.t - 1e-9);
            log.truth.get(i).filter(|s| (s.t - e.t).abs() <= 1e-9).map(|s| s.state)
        })
        .collect();
    Some(RunArtifacts { kinds: cfg.kinds.clone(), runs: vec![RunResult { run: 0, truth: truth?, filters }] })
}

/// Everything `compare` produces.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub artifacts: RunArtifacts,
    pub series: Vec<MetricSeries>,
    pub table: Vec<(SymmetryKind, Option<AneesSummary>)>,
    pub sweeps: Vec<SweepGrid>,
}

impl Comparison {
    pub fn failures(&self) -> usize {
        self.artifacts.runs.iter().flat_map(|r| &r.filters).filter(|f| f.failure.is_some()).count()
    }
}

pub fn compare(cfg: &RunConfig, with_sweep: bool) -> Result<Comparison, CliError> {
    if cfg.runs < 2 {
        return Err(CliError::Usage(format!("compare needs at least 2 runs, got {}", cfg.runs)));
    }
    let artifacts = sim::run_monte_carlo(&cfg.trajectory, &cfg.noise, &cfg.kinds, cfg.runs, &cfg.filter_config());
    let series = metrics::series(&artifacts);
    let table = series.iter().map(|s| (s.kind, metrics::anees_summary(s))).collect();
    let mut sweeps = Vec::new();
    if with_sweep || cfg.sweep.enabled {
        let g = cfg.filter_config().gravity;
        for [a, b] in &cfg.sweep.pairs {
            for &axis in &cfg.sweep.axes {
                sweeps.push(metrics::linearization_sweep(*a, *b, axis, &cfg.sweep.grid, &g));
            }
        }
    }
    Ok(Comparison { artifacts, series, table, sweeps })
}

pub fn format_table(table: &[(SymmetryKind, Option<AneesSummary>)]) -> String {
    let mut s = format!("{:<10} {:>10} {:>10}\n", "filter", "ANEES(T)", "ANEES(A)");
    for (k, a) in table {
        let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        s += &format!("{:<10} {:>10} {:>10}\n", k.label(), cell(a.map(|a| a.transient)), cell(a.map(|a| a.asymptotic)));
    }
    s
}

/// `simulate`: writes the log and the effective config; returns both.
pub fn cmd_simulate(common: &Common, quiet: bool) -> Result<(RunConfig, SensorLog), CliError> {
    let cfg = common.resolve()?;
    let noise = if quiet { noise_free(&cfg.noise) } else { cfg.noise.clone() };
    let log = simulate(&cfg, &noise);
    io::write_log(&cfg.output, &log)?;
    write_config_echo(&cfg, &cfg.output)?;
    Ok((cfg, log))
}

/// `run`: filters a CSV log and writes estimates and metrics (NIS only without truth).
pub fn cmd_run(data: &Path, common: &Common) -> Result<(RunConfig, Vec<FilterRun>), CliError> {
    let cfg = common.resolve()?;
    let log = io::read_log(data)?;
    let filters = run_log(&cfg, &log);
    ensure_dir(&cfg.output)?;
    write_estimates(&cfg.output.join(ESTIMATES_FILE), &filters)?;
    let metrics_path = cfg.output.join(METRICS_FILE);
    let art = if log.truth.is_empty() { None } else { single_run_artifacts(&cfg, &log, filters.clone()) };
    match art {
        Some(art) => write_metrics(&metrics_path, &metrics::series(&art))?,
        None => write_nis_metrics(&metrics_path, &filters)?,
    }
    write_config_echo(&cfg, &cfg.output)?;
    Ok((cfg, filters))
}

/// `compare`: Monte-Carlo batch; failed filter runs are listed, not fatal.
pub fn cmd_compare(common: &Common, with_sweep: bool) -> Result<(RunConfig, Comparison), CliError> {
    let cfg = common.resolve()?;
    let c = compare(&cfg, with_sweep)?;
    let out = &cfg.output;
    ensure_dir(out)?;
    write_anees(&out.join(ANEES_FILE), &c.table)?;
    write_metrics(&out.join(METRICS_FILE), &c.series)?;
    write_failures(&out.join(FAILURES_FILE), &c.artifacts)?;
    if !c.sweeps.is_empty() {
        write_sweep(&out.join(SWEEP_FILE), &c.sweeps)?;
    }
    write_config_echo(&cfg, out)?;
    Ok((cfg, c))
}

fn cmd_check(seed: u64, samples: usize, mutate_gravity: bool) -> Result<(), CliError> {
    let opts = CheckOptions { seed, samples, mutation: mutate_gravity.then_some(Mutation::FlipGravity) };
    let report = check::run(&opts);
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Property(format!("{} properties failed", report.failures().count())))
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`] when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}: '{v}' is not a positive integer")))?;
    // A pool that is already built (e.g. inside tests) is left as is.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    match &cli.command {
        Command::Simulate { common, noise_free } => {
            let (cfg, log) = cmd_simulate(common, *noise_free)?;
            eprintln!("wrote {} imu, {} gnss, {} truth rows to {}", log.imu.len(), log.gnss.len(), log.truth.len(), cfg.output.display());
            Ok(())
        }
        Command::Run { data, common } => {
            let (_, filters) = cmd_run(data, common)?;
            for f in &filters {
                let last = f.epochs.last().expect("initial epoch");
                eprintln!("{:<10} t={:<8} {}", f.kind.label(), fmt_f64(last.t), f.failure.as_deref().unwrap_or("ok"));
            }
            Ok(())
        }
        Command::Compare { common, sweep } => {
            let (cfg, c) = cmd_compare(common, *sweep)?;
            print!("{}", format_table(&c.table));
            let failed = c.failures();
            if failed > 0 {
                eprintln!("{failed} filter runs stopped early; see {}", cfg.output.join(FAILURES_FILE).display());
            }
            Ok(())
        }
        Command::Check { seed, samples, mutate_gravity } => cmd_check(*seed, *samples, *mutate_gravity),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
