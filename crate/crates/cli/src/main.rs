use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod batch;
mod dump;
mod run;

use run::RunError;

/// Exit status when a counterexample was found.
pub const EXIT_BUG: u8 = 10;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_MODEL: u8 = 2;
/// Exit status of `validate` for a witness that does not replay.
pub const EXIT_INVALID_WITNESS: u8 = 20;

#[derive(Parser, Debug)]
#[command(name = "tapseq", version, about = "Hunts for bugs in sequential AIGER circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one model.
    Run {
        /// AIGER file (ascii or binary).
        model: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
        /// Write the counterexample here (AIGER witness format).
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Write key=value statistics here (no timing, reproducible).
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Directory receiving the step formula of every processed state as DIMACS.
        #[arg(long, value_name = "DIR")]
        dump_cnf: Option<PathBuf>,
        /// Directory receiving the resolution proof of every processed state.
        #[arg(long, value_name = "DIR")]
        dump_proof: Option<PathBuf>,
        /// File receiving one line per boundary point.
        #[arg(long, value_name = "FILE")]
        dump_points: Option<PathBuf>,
    },
    /// Replay a witness against a model.
    Validate { model: PathBuf, witness: PathBuf },
    /// Run every .aag/.aig file of a directory and print one CSV row each.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
        /// Also write the CSV rows to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write `<name>.cex` witnesses here.
        #[arg(long, value_name = "DIR")]
        witness_dir: Option<PathBuf>,
    },
    /// Write the built-in crafted circuits as .aag files.
    Corpus { dir: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Tapseq,
    Rand,
    Bmc,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Bfs,
    Dfs,
}

#[derive(Args, Debug, Clone)]
pub struct RunOptions {
    #[arg(long, value_enum, default_value = "tapseq")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "bfs")]
    pub order: OrderArg,
    /// Randomize every tenth decision when searching boundary points.
    #[arg(long)]
    pub randomize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 40_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_tries: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_length: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_depth: u64,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 180.0)]
    pub time_limit: f64,
    /// Index of the bad-state property to check.
    #[arg(long, default_value_t = 0)]
    pub property: usize,
    /// Encode complete proofs instead of the part the refutation depends on.
    #[arg(long)]
    pub no_trim: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run {
            model,
            opts,
            witness,
            stats,
            dump_cnf,
            dump_proof,
            dump_points,
        } => {
            let outputs = run::Outputs {
                witness,
                stats,
                dump_cnf,
                dump_proof,
                dump_points,
            };
            run::run_command(&model, &opts, &outputs)
        }
        Command::Validate { model, witness } => run::validate_command(&model, &witness),
        Command::Batch {
            dir,
            opts,
            csv,
            witness_dir,
        } => batch::batch_command(&dir, &opts, csv.as_deref(), witness_dir.as_deref()),
        Command::Corpus { dir } => batch::corpus_command(&dir),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                RunError::Usage(_) => EXIT_USAGE,
                RunError::Model(_) | RunError::Io { .. } => EXIT_MODEL,
            })
        }
    }
}
