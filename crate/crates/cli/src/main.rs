use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weighted_young_cli::record::EXIT_INPUT;
use weighted_young_cli::render::{render, Format};
use weighted_young_cli::scenario::Kind;
use weighted_young_cli::{batch_exit, load_scenarios, run_batch, write_outputs, Overrides};

/// Admissibility checks, sharpness probes and lemma verification for
/// weighted convolution and multiplication estimates.
///
/// Exit codes: check 0 bounded, 1 unbounded, 3 undetermined; probe 0 pass,
/// 1 necessity witnessed, 3 fail; verify-lemmas and sweep 0 on success,
/// 3 on a failed case; 2 for malformed scenarios, violated preconditions,
/// resolution-guard hits and sweeps over the row cap.
#[derive(Parser)]
#[command(name = "wyoung", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a parameter tuple and print the condition trace.
    Check(Common),
    /// Run a necessity probe, boundedness sweep or cross-check.
    Probe(Common),
    /// Run the lemma verification suites.
    VerifyLemmas(Common),
    /// Classify every tuple of a rational weight grid.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file; repeat for a batch, `-` reads stdin.
    #[arg(long, required = true)]
    scenario: Vec<PathBuf>,
    /// Directory for per-scenario JSON and CSV files and `index.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count per axis for every probe grid.
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Half width for every probe grid.
    #[arg(long = "grid-L")]
    grid_l: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

fn execute(kind: Kind, args: Common) -> anyhow::Result<i32> {
    let overrides = Overrides {
        seed: args.seed,
        grid_n: args.grid_n,
        grid_l: args.grid_l,
    };
    let scenarios = match load_scenarios(&args.scenario, kind, overrides) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_INPUT);
        }
    };
    let records = run_batch(&scenarios);
    if let Some(dir) = &args.out {
        write_outputs(dir, &records)?;
    }
    let code = batch_exit(&records);
    let mut stdout = std::io::stdout().lock();
    for rec in &records {
        match stdout.write_all(render(rec, args.format)?.as_bytes()) {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => return Ok(code),
            other => other?,
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Check(a) => (Kind::Check, a),
        Command::Probe(a) => (Kind::Probe, a),
        Command::VerifyLemmas(a) => (Kind::VerifyLemmas, a),
        Command::Sweep(a) => (Kind::Sweep, a),
    };
    match execute(kind, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
