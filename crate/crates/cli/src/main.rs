//! `qforms`: runs engine jobs described by JSON files.

#![allow(clippy::needless_range_loop)]

mod error;
mod jobs;
mod report;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, CliResult};
use jobs::RunOptions;
use schema::{Kind, Overrides};

#[derive(Parser, Debug)]
#[command(
    name = "qforms",
    version,
    about = "Exact computations with graded manifolds and their cohomology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the structural identities of a payload.
    Check(JobArgs),
    /// Cohomology dimensions over a degree window.
    Betti(JobArgs),
    /// Cohomology of the basic subcomplex.
    Basic(JobArgs),
    /// Verify the conjugation identity for an algebroid differential.
    Mqk(JobArgs),
    /// Build the double of a Lie bialgebra and check compatibility.
    Double(JobArgs),
    /// Build the equivariant model of an algebroid with a Lie algebra action.
    Ginzburg(JobArgs),
    /// Sample the van Est map on a polynomial action groupoid.
    Vanest(JobArgs),
    /// Check the Cartan relations on random vector fields.
    CartanSuite(JobArgs),
}

#[derive(Args, Debug)]
struct JobArgs {
    /// JSON job file.
    file: PathBuf,
    /// Inclusive degree window `a..b`, overriding the file.
    #[arg(long, value_parser = schema::parse_window, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Weight value, overriding the file.
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<i64>,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Print cocycle representatives for nonzero cohomology.
    #[arg(long)]
    reps: bool,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of samples for sampled checks.
    #[arg(long, default_value_t = 25)]
    samples: usize,
}

impl Command {
    fn split(self) -> (Kind, JobArgs) {
        match self {
            Command::Check(a) => (Kind::Check, a),
            Command::Betti(a) => (Kind::Betti, a),
            Command::Basic(a) => (Kind::Basic, a),
            Command::Mqk(a) => (Kind::Mqk, a),
            Command::Double(a) => (Kind::Double, a),
            Command::Ginzburg(a) => (Kind::Ginzburg, a),
            Command::Vanest(a) => (Kind::Vanest, a),
            Command::CartanSuite(a) => (Kind::CartanSuite, a),
        }
    }
}

fn execute(kind: Kind, args: &JobArgs) -> CliResult<String> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", args.file.display())))?;
    let overrides = Overrides {
        window: args.window,
        weight: args.weight,
        json: args.json,
    };
    let job = schema::parse(&text, kind, &overrides)?;
    let opts = RunOptions {
        reps: args.reps,
        seed: args.seed,
        samples: args.samples,
    };
    let report = jobs::run(&job, &opts)?;
    let out = report.render(job.format);
    match report.failure {
        Some((invariant, witness)) => {
            print!("{out}");
            Err(CliError::validation(invariant, witness))
        }
        None => Ok(out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (kind, args) = cli.command.split();
    match execute(kind, &args) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
