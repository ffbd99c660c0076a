//! `fairsfs`: fair streaming feature selection from the command line.
//!
//! Every subcommand that writes files also writes a `manifest.json` with the
//! resolved configuration and SHA-256 digests of its inputs; `fairsfs replay`
//! re-runs a manifest into a fresh directory. Defaults can be overridden by
//! `FAIRSFS_*` environment variables. Exit codes: 0 success, 1 invalid
//! input, 2 data or runtime failure.

mod error;
mod evaluate;
mod manifest;
mod options;
mod report;
mod select;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "fairsfs", version, about = "Fair streaming feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select a fair feature set from a CSV file.
    Select(select::SelectArgs),
    /// Cross-validate a classifier on a feature list and report ACC, SPD and PE.
    Evaluate(evaluate::EvaluateArgs),
    /// Sample a random network, its data and its ground-truth fair set.
    Synth(synth::SynthArgs),
    /// Compare evaluation runs side by side.
    Report(report::ReportArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for the replayed run.
    #[arg(long)]
    out: PathBuf,
}

fn config<T: DeserializeOwned>(m: &RunManifest) -> Result<T, CliError> {
    serde_json::from_value(m.config.clone())
        .map_err(|e| CliError::validation(format!("manifest config does not match `{}`: {e}", m.command)))
}

fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let m = RunManifest::read(&args.manifest)?;
    m.verify_inputs()?;
    match m.command.as_str() {
        "select" => {
            let mut a: select::SelectArgs = config(&m)?;
            a.out = args.out.clone();
            select::execute(&a)
        }
        "evaluate" => {
            let mut a: evaluate::EvaluateArgs = config(&m)?;
            a.out = args.out.clone();
            evaluate::execute(&a)
        }
        "synth" => {
            let mut a: synth::SynthArgs = config(&m)?;
            let stem = m
                .outputs
                .first()
                .and_then(|o| o.strip_suffix(".net.json"))
                .ok_or_else(|| CliError::validation("synth manifest lists no network file"))?;
            a.out_prefix = args.out.join(stem);
            synth::execute(&a)
        }
        other => Err(CliError::validation(format!("cannot replay command `{other}`"))),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Select(a) => select::execute(&a),
        Command::Evaluate(a) => evaluate::execute(&a),
        Command::Synth(a) => synth::execute(&a),
        Command::Report(a) => report::execute(&a),
        Command::Replay(a) => replay(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("fairsfs: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fairsfs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
