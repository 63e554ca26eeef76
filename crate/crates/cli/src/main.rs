use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cohdist_core::config::{OutputFormat, RunConfig};
use cohdist_core::Error;

mod channels;
mod output;
mod report;
mod states;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or a domain violation; exit status 2.
    Input(String),
    /// A property that holds by construction failed; exit status 3.
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn internal(e: impl Display) -> Self {
        Self::Internal(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Internal(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Self::Internal(e.to_string()),
            other => Self::Input(other.to_string()),
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) => write!(f, "error: {m}"),
            Self::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cohdist", version, about = "Perfectly distinguishable coherifications: state regions and channel families")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct GlobalArgs {
    /// Base seed of every random choice.
    #[arg(long, global = true, env = "COHDIST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Residual below which a search counts as Found.
    #[arg(long = "tol", global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Residual above which a search counts as separated.
    #[arg(long = "tol-fail", global = true, default_value_t = 1e-3)]
    pub tol_fail: f64,
    #[arg(long, global = true, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long = "max-iter", global = true, default_value_t = 5000)]
    pub max_iter: usize,
    /// Worker threads; the default uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl GlobalArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            tolerance_success: self.tol,
            tolerance_fail: self.tol_fail,
            restarts: self.restarts,
            max_iterations: self.max_iter,
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
            workers: self.workers,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical versions admitting M perfectly distinguishable pure states.
    #[command(subcommand)]
    States(states::StatesCommand),
    /// Families of channels sharing a classical action.
    #[command(subcommand)]
    Channels(channels::ChannelsCommand),
    /// Runs the acceptance suite and prints a JSON summary.
    Report(report::ReportArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.global.config();
    cfg.validate()?;
    let work = || -> Result<(), CliError> {
        let out = match &cli.command {
            Command::States(c) => states::run(c, &cfg)?,
            Command::Channels(c) => channels::run(c, &cfg)?,
            Command::Report(a) => return report::run(a, &cfg, cli.global.out.as_deref()),
        };
        let text = out.render(&cfg.header(), cfg.format)?;
        output::emit(&text, cli.global.out.as_deref())
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(CliError::internal)?
            .install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
