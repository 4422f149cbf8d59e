mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use interact_auth::{Error, ErrorKind};

pub const RUN_DIR_ENV: &str = "INTERACT_AUTH_RUN_DIR";

#[derive(Debug, Parser)]
#[command(name = "interact-auth", version, about = "Behavioral authentication from object interactions")]
pub struct Cli {
    /// Root for every command's artifacts.
    #[arg(long, global = true, env = RUN_DIR_ENV, default_value = "run")]
    pub run_dir: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic session.
    Synth(commands::SynthArgs),
    /// Validate a session and summarize its segments.
    Ingest(commands::DataArgs),
    /// Export per-object feature matrices.
    Features(commands::FeaturesArgs),
    /// Maximum relative mutual information per object and sensor.
    Rmi(commands::RmiArgs),
    /// Fit deployable base models and, optionally, an ensemble.
    Train(commands::TrainArgs),
    /// Cross-validated FRR at fixed FAR for one victim.
    Evaluate(commands::EvaluateArgs),
    /// Voting and stacking ensembles over object subsets.
    Ensemble(commands::EnsembleArgs),
    /// Aggregate evaluation reports into summary tables.
    Report(commands::ReportArgs),
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 2,
        ErrorKind::Training => 3,
        ErrorKind::Io => 4,
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let line = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{line}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail("validation", first, 2);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return fail("validation", "--jobs must be at least 1", 2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail("validation", &e.to_string(), 2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.kind();
            let name = match kind {
                ErrorKind::Validation => "validation",
                ErrorKind::Training => "training",
                ErrorKind::Io => "io",
            };
            let msg = e.to_string().replace('\n', " ");
            fail(name, &msg, exit_code(kind))
        }
    }
}

pub fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
