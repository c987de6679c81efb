use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::RunConfig;

/// Spectra, coupling scans, refinement scans and bound checks for the
/// cutoff Yukawa Hamiltonian.
#[derive(Debug, Parser)]
#[command(name = "yukawa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to `<dir>/<command>.json` (or `.csv`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the solver and verification seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for assembly and diagonalization.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall-clock timings (outputs are otherwise reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Lowest eigenvalues at the configured coupling.
    Spectrum,
    /// Ground energy and gap over a coupling grid (CSV plus JSON sidecar).
    ScanKappa,
    /// Ground energy along a refinement sequence.
    Converge,
    /// Numerical check of the relative-bound inequalities.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::ScanKappa => "scan-kappa",
            Command::Converge => "converge",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration.
    Config(String),
    Core(yukawa_core::Error),
    Io(String),
    /// The bound report contains a failing inequality.
    VerifyFailed,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        use yukawa_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Core(E::Parameter { .. }) => 2,
            CliError::Core(E::Capacity { .. } | E::DenseCap { .. }) => 3,
            CliError::Core(E::NoConvergence { .. }) => 4,
            CliError::Core(_) | CliError::Io(_) | CliError::VerifyFailed => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::VerifyFailed => write!(f, "at least one inequality failed"),
        }
    }
}

impl From<yukawa_core::Error> for CliError {
    fn from(e: yukawa_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config PATH is required"))?;
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.solver.seed = seed;
        config.verify.seed = seed;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads: must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    let ctx = commands::Context {
        config,
        out: cli.out.clone(),
        timings: cli.timings,
        command: cli.command.name(),
    };
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::ScanKappa => commands::scan_kappa(&ctx),
        Command::Converge => commands::converge(&ctx),
        Command::Verify => commands::verify(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("yukawa {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
