use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use parabolic::cli::{run, CliError, Command, Options, OutputMode, Request};
use parabolic::rational;

/// Holonomy classification for parabolic geometries.
#[derive(Parser)]
#[command(name = "parabolic", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    output: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = parabolic::sampling::DEFAULT_SEED)]
    seed: u64,
    /// Number of instances or fields for sweeping commands.
    #[arg(long, global = true)]
    instances: Option<usize>,
    /// Oracle lattice radius, an integer or p/q.
    #[arg(long, global = true, default_value = "2")]
    grid_radius: String,
    /// Oracle lattice steps per half-axis.
    #[arg(long, global = true, default_value_t = parabolic::cli::DEFAULT_GRID_STEPS)]
    grid_steps: u32,
    /// Read the payload from a file instead of stdin.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Sub {
    /// Dimensions, grading element and Killing data of an algebra.
    AlgebraInfo,
    /// Checks the Lie axioms and grading of an algebra.
    AlgebraVerify,
    /// Classifies a holonomy element.
    Classify,
    /// Classifies a flat conformal field at a point.
    FlatClassify,
    /// Runs the flat-model identity sweep.
    VerifyIdentities,
    /// Compares the classifier against the brute-force oracle.
    OracleCompare,
    /// Reads a full `{"command", "payload", "output"}` document.
    Request,
}

fn read_input(file: &Option<PathBuf>) -> Result<Value, CliError> {
    let text = match file {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::schema("input", e.to_string()))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::schema("input", e.to_string()))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| CliError::schema("input", format!("invalid JSON: {e}")))
}

fn build_request(cli: &Cli) -> Result<Request, CliError> {
    let c = &cli.common;
    let grid_radius = rational::parse(&c.grid_radius)
        .ok_or_else(|| CliError::schema("options.grid_radius", "expected an integer or p/q"))?;
    let options = Options {
        output: match c.output {
            Format::Json => OutputMode::Json,
            Format::Text => OutputMode::Text,
        },
        seed: c.seed,
        instances: c.instances,
        grid_radius,
        grid_steps: c.grid_steps,
    };
    let command = match cli.command {
        Sub::AlgebraInfo => Command::AlgebraInfo,
        Sub::AlgebraVerify => Command::AlgebraVerify,
        Sub::Classify => Command::Classify,
        Sub::FlatClassify => Command::FlatClassify,
        Sub::VerifyIdentities => Command::VerifyIdentities,
        Sub::OracleCompare => Command::OracleCompare,
        Sub::Request => return Request::from_document(&read_input(&c.file)?, options),
    };
    Ok(Request { command, payload: read_input(&c.file)?, options })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match build_request(&cli) {
        Ok(request) => run(&request),
        Err(e) => e.outcome(match cli.common.output {
            Format::Json => OutputMode::Json,
            Format::Text => OutputMode::Text,
        }),
    };
    print!("{}", outcome.report);
    ExitCode::from(outcome.exit_code as u8)
}
