//! Command-line front end for `jch-core`: reads a TOML recipe, runs one of
//! the spectrum / scan / dynamics tasks and writes CSV, JSON or SVG.
//!
//! Data goes to `--out` (or stdout); a one-line summary goes to stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use config::{key_help, Config, Format};

/// Environment variable consulted for the worker count when neither
/// `--threads` nor `run.threads` is given.
pub const THREADS_ENV: &str = "JCH_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] jch_core::Error),
}

impl CliError {
    /// 0 ok, 1 i/o, 2 configuration, 3 dimension guard, 4 numerical abort.
    pub fn exit_code(&self) -> i32 {
        use jch_core::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::DimensionGuard { .. } => 3,
                E::NoConvergence(_)
                | E::NormDrift { .. }
                | E::NegativeVariance(_)
                | E::SectorLeak
                | E::NotNormalized(_) => 4,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "jch",
    version,
    about = "Jaynes-Cummings-Hubbard ring with qubit-mediated hopping: spectra, phase diagrams, ramps, measurement statistics",
    after_help = "Energies are in units of g, times in 1/g. Exit codes: 0 ok, 1 i/o, 2 config, 3 dimension guard, 4 numerical abort."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML recipe
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Emit an SVG figure instead of the table (plot commands only)
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [env: JCH_THREADS]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Override a config key, e.g. --set model.delta_c=20 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues and ground-state statistics at one parameter point
    #[command(after_help = key_help(&["model", "spectrum", "run"]))]
    Spectrum(CommonArgs),
    /// Ground-state var(N_0) over the (delta, delta_c) grid
    #[command(after_help = key_help(&["model", "grid", "run"]))]
    Scan(CommonArgs),
    /// Analytic kappa / U_eff(1) over the (delta, delta_c) grid
    #[command(after_help = key_help(&["model", "grid", "run"]))]
    Ratio(CommonArgs),
    /// Phase boundary: the var crossing on each delta_c slice of a scan
    #[command(after_help = key_help(&["model", "grid", "boundary", "run"]))]
    Boundary(CommonArgs),
    /// Effective vs full Hamiltonian var(N_0) along delta
    #[command(after_help = key_help(&["model", "compare", "run"]))]
    Compare(CommonArgs),
    /// var(N_0) curves for several ring sizes
    #[command(after_help = key_help(&["model", "sizes", "run"]))]
    Sizes(CommonArgs),
    /// Time-dependent delta ramp from the Mott side to the superfluid side
    #[command(after_help = key_help(&["model", "ramp", "run"]))]
    Sweep(CommonArgs),
    /// Monte-Carlo run of the number-resolved measurement protocol
    #[command(after_help = key_help(&["model", "measure", "run"]))]
    Measure(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(c)
            | Command::Scan(c)
            | Command::Ratio(c)
            | Command::Boundary(c)
            | Command::Compare(c)
            | Command::Sizes(c)
            | Command::Sweep(c)
            | Command::Measure(c) => c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Scan(_) => "scan",
            Command::Ratio(_) => "ratio",
            Command::Boundary(_) => "boundary",
            Command::Compare(_) => "compare",
            Command::Sizes(_) => "sizes",
            Command::Sweep(_) => "sweep",
            Command::Measure(_) => "measure",
        }
    }
}

/// Bytes for the output destination plus the stderr summary.
#[derive(Debug, Clone)]
pub struct Output {
    pub body: Vec<u8>,
    pub summary: String,
}

/// Resolves the configuration of `command`: file, then `--set`, then flags,
/// then the thread-count environment variable.
pub fn resolve_config(common: &CommonArgs) -> Result<Config, CliError> {
    let mut cfg = Config::load(common.config.as_deref(), &common.set)?;
    if let Some(seed) = common.seed {
        cfg.run.seed = Some(seed);
    }
    if let Some(format) = common.format {
        cfg.run.format = Some(format);
    }
    if let Some(threads) = common.threads {
        cfg.run.threads = Some(threads);
    }
    if cfg.run.threads.is_none() {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            let n = v.trim().parse().map_err(|_| {
                CliError::Config(format!("{THREADS_ENV}={v} is not a thread count"))
            })?;
            cfg.run.threads = Some(n);
        }
    }
    Ok(cfg)
}

/// Runs `command` without touching the filesystem's output side.
pub fn execute(command: &Command) -> Result<Output, CliError> {
    let common = command.common();
    let cfg = resolve_config(common)?;
    let svg = common.svg;
    match command {
        Command::Spectrum(_) | Command::Measure(_) if svg => Err(CliError::Config(format!(
            "--svg is not available for `{}`",
            command.name()
        ))),
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Scan(_) => commands::scan(&cfg, svg),
        Command::Ratio(_) => commands::ratio(&cfg, svg),
        Command::Boundary(_) => commands::boundary(&cfg, svg),
        Command::Compare(_) => commands::compare(&cfg, svg),
        Command::Sizes(_) => commands::sizes(&cfg, svg),
        Command::Sweep(_) => commands::sweep(&cfg, svg),
        Command::Measure(_) => commands::measure(&cfg),
    }
}

/// Runs the command and writes its output; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(&cli.command).and_then(|out| {
        match &cli.command.common().out {
            Some(path) => std::fs::write(path, &out.body)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            None => {
                use std::io::Write;
                std::io::stdout()
                    .write_all(&out.body)
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
        eprintln!("{}", out.summary);
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("jch {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
