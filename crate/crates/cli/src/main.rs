use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod input;

#[derive(Debug, Parser)]
#[command(name = "nlwave", version, about = "Pseudo-spectral solver for nonlocal nonlinear wave equations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON run configuration; the built-in default is used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "nlwave-out")]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for the study command.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the config sampling stride.
    #[arg(long, global = true)]
    pub sample_every: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the nonlinear system and write snapshots plus a manifest.
    Simulate,
    /// Vanishing-dispersion convergence study.
    Study {
        /// 1: delta + eps beta, 2: rescaled measure.
        #[arg(long = "type", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        kind: u8,
        /// Comma-separated, strictly decreasing.
        #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
        eps: String,
    },
    /// Picard iteration on the frozen-coefficient linear problems.
    Picard {
        #[arg(long, default_value_t = 8)]
        iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Kernel mass, moment, bounds and a symbol table.
    Kernels {
        /// Use the three-atom example measure instead of the config kernel.
        #[arg(long)]
        example: bool,
        /// Rows of the symbol table.
        #[arg(long, default_value_t = 33)]
        rows: usize,
    },
    /// Property suites with randomized test fields.
    Diagnostics {
        /// Suite to run; repeat for several. All suites run when omitted.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate => commands::simulate(&cli.global),
        Command::Study { kind, eps } => commands::study(&cli.global, kind, &eps),
        Command::Picard { iters, tol } => commands::picard(&cli.global, iters, tol),
        Command::Kernels { example, rows } => commands::kernels(&cli.global, example, rows),
        Command::Diagnostics { suites } => commands::diagnostics(&cli.global, &suites),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
