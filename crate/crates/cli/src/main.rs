//! `justact`: evaluate and check Slick policies, run the bundled scenarios,
//! and audit or browse the traces they produce.

mod commands;
mod inspect;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use justact::lang::DEFAULT_STEP_BOUND;

#[derive(Parser)]
#[command(
    name = "justact",
    version,
    about = "Policy-justified actions over Slick"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Slick file and print its truths, unknowns and validity.
    Eval {
        file: PathBuf,
        /// Inference step bound.
        #[arg(long, default_value_t = DEFAULT_STEP_BOUND)]
        bound: usize,
        /// Also print the truth value of this fact.
        #[arg(long)]
        query: Option<String>,
    },
    /// Parse a Slick file and report syntax and safety problems.
    Check { file: PathBuf },
    /// Run a bundled scenario (or a directory holding a manifest.toml).
    Run {
        scenario: String,
        /// Where to write the JSONL trace.
        #[arg(long)]
        out: PathBuf,
        /// Refuse prohibited enactments, and fail if any were attempted.
        #[arg(long)]
        strict: bool,
        /// Agents whose scripts do not run.
        #[arg(long = "disable", value_name = "AGENT")]
        disabled: Vec<String>,
    },
    /// Verify a trace by replay, then print enactment audit reports.
    Audit {
        trace: PathBuf,
        /// Only this event.
        index: Option<usize>,
        /// Print reports as JSON lines.
        #[arg(long)]
        json: bool,
    },
    /// Browse a trace: events on the left, the selected enactment on the right.
    Inspect {
        trace: PathBuf,
        /// Print both panes for this event instead of opening the browser.
        #[arg(long, value_name = "INDEX")]
        dump: Option<usize>,
    },
    /// List the bundled scenarios.
    Scenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Eval { file, bound, query } => {
            commands::eval(&mut stdout, &file, bound, query.as_deref())
        }
        Command::Check { file } => commands::check(&mut stdout, &file),
        Command::Run {
            scenario,
            out,
            strict,
            disabled,
        } => commands::run(&mut stdout, &scenario, &out, strict, &disabled),
        Command::Audit { trace, index, json } => commands::audit(&mut stdout, &trace, index, json),
        Command::Inspect { trace, dump } => commands::inspect(&mut stdout, &trace, dump),
        Command::Scenarios => commands::scenarios(&mut stdout),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
