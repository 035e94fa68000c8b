//! Command-line driver: config parsing, subcommand dispatch and artifact output.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;

pub use config::{parse_config, ConfigError, Numeric, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

const DEFAULT_OUT: &str = "rankone-out";

#[derive(Debug, Parser)]
#[command(name = "rankone", version, about = "Spectral checks for rank-one perturbations of weighted shifts")]
pub struct Cli {
    /// Run configuration; without it the Hardy space and the default perturbations are used.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel parts.
    #[arg(long, global = true, value_name = "INT")]
    pub threads: Option<usize>,
    /// Seed for random perturbations (`oracle` only).
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Closed-form predictions for each perturbation.
    Analyze,
    /// Injectivity-modulus grid scans, one CSV per operator.
    Scan,
    /// Full check suite; exits 1 if any check fails.
    Verify,
    /// Exact brute-force cross-checks only.
    Oracle,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("config error: {0}")]
    Usage(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io { path: p.to_path_buf(), source })?;
            Ok(parse_config(&text)?)
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rankone: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    if cli.seed.is_some() && !matches!(cli.command, Command::Oracle) {
        return Err(CliError::Usage("--seed only applies to `oracle`".into()));
    }
    let config = load_config(cli.config.as_deref())?;
    let out = cli.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match cli.command {
        Command::Analyze => commands::analyze(&config, &out),
        Command::Scan => commands::scan(&config, &out),
        Command::Verify => commands::verify(&config, &out),
        Command::Oracle => commands::oracle(&config, &out, cli.seed),
    }
}
