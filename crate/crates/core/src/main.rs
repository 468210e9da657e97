use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opspace::cli::{self, Command, RunConfig};

/// Operator, cb and Haagerup norms; Schur multiplier diagnostics.
#[derive(Parser)]
#[command(name = "opspace", version)]
struct Opts {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Solver tolerance, in (0, 1).
    #[arg(long, global = true, default_value_t = cli::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random restarts for the ascent lower bounds.
    #[arg(long, global = true, default_value_t = cli::DEFAULT_RESTARTS)]
    restarts: usize,
    /// CSV instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Put wall-clock seconds into the report (always printed to stderr).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ascent lower bound for the operator norm of a map.
    Norm { input: PathBuf },
    /// Completely bounded norm of a map.
    Cbnorm { input: PathBuf },
    /// Haagerup norm of a tensor by SDP and by factorization.
    Haagerup { input: PathBuf },
    /// Apply a symbol to a block matrix: {"symbol": ..., "blocks": ...}.
    SchurApply { input: PathBuf },
    /// Norm and cb norm of a Schur multiplier.
    SchurNorm { input: PathBuf },
    /// Vector factorization of a scalar symbol.
    Factorize { input: PathBuf },
    /// Tail multiplier norms for every cut.
    TailReport { input: PathBuf },
    /// Weighted transposes: norm against cb norm per block.
    Counterexample {
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Weights alpha_k = k^(-power).
        #[arg(long, default_value_t = 1.0)]
        power: f64,
    },
    /// Run the acceptance battery.
    CheckSuite,
}

fn main() -> ExitCode {
    let opts = match Opts::try_parse() {
        Ok(o) => o,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_INPUT } else { cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Ok(v) = std::env::var("OPSPACE_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: OPSPACE_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(cli::EXIT_INPUT as u8);
            }
        }
    }

    let mut config = RunConfig::new(Command::CheckSuite);
    config.command = match opts.command {
        Cmd::Norm { input } => with_input(&mut config, input, Command::Norm),
        Cmd::Cbnorm { input } => with_input(&mut config, input, Command::Cbnorm),
        Cmd::Haagerup { input } => with_input(&mut config, input, Command::Haagerup),
        Cmd::SchurApply { input } => with_input(&mut config, input, Command::SchurApply),
        Cmd::SchurNorm { input } => with_input(&mut config, input, Command::SchurNorm),
        Cmd::Factorize { input } => with_input(&mut config, input, Command::Factorize),
        Cmd::TailReport { input } => with_input(&mut config, input, Command::TailReport),
        Cmd::Counterexample { k, power } => {
            config.k = k;
            config.power = power;
            Command::Counterexample
        }
        Cmd::CheckSuite => Command::CheckSuite,
    };
    let c = opts.common;
    config.tol = c.tol;
    config.seed = c.seed;
    config.restarts = c.restarts;
    config.csv = c.csv;
    config.timings = c.timings;
    config.output_path = c.out;

    let outcome = cli::run(&config);
    if config.output_path.is_none() {
        if let Some(report) = &outcome.report {
            let _ = std::io::stdout().write_all(report.as_bytes());
        }
    }
    eprintln!("{}", outcome.diagnostics);
    ExitCode::from(outcome.exit_code as u8)
}

fn with_input(config: &mut RunConfig, input: PathBuf, command: Command) -> Command {
    config.input_path = Some(input);
    command
}
