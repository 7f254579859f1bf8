mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use output::Format;

/// Classical, quantum and non-signalling values of nonlocal computation
/// tasks and XOR games.
#[derive(Debug, Parser)]
#[command(name = "nonlocal", version)]
struct Cli {
    /// Output format; `human` renders the same payload as `json`.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct TaskArgs {
    /// and, or, xor, not, maj3, const0, const1, const0:n=K, tt:n=K:hex=H
    #[arg(long = "fn", value_name = "SPEC")]
    function: String,

    /// uniform, an inline JSON array, or a .json/.csv file
    #[arg(long, value_name = "SPEC", default_value = "uniform")]
    prior: String,

    /// Rescale priors whose sum is within 1e-6 of one.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical optimum, quantum bound and the optimal affine strategy.
    Value(TaskArgs),
    /// Exhaustive search over deterministic strategies (n ≤ 3).
    Bruteforce(TaskArgs),
    /// Hadamard bias against the operator-norm bound, plus a see-saw lower bound.
    Certificate {
        /// Game matrix as CSV, one row per x.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["function", "prior"])]
        game: Option<PathBuf>,
        #[arg(long = "fn", value_name = "SPEC", required_unless_present = "game")]
        function: Option<String>,
        #[arg(long, value_name = "SPEC")]
        prior: Option<String>,
        #[arg(long)]
        renormalize: bool,
        /// Pass threshold on norm bound minus Hadamard bias.
        #[arg(long, default_value_t = nonlocal::xorgame::DEFAULT_CERTIFICATE_TOL)]
        tol: f64,
        /// Seed of the see-saw random restarts.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Vector dimension; defaults to min(|X|, |Y|).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Export the induced Bell inequality as {n, C, K} JSON.
    Bell {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Correlation boxes and box protocols.
    #[command(subcommand)]
    Boxes(BoxCommand),
    /// Worst-case value over priors and the optimal mixed strategy.
    Minimax {
        #[arg(long = "fn", value_name = "SPEC")]
        function: String,
    },
    /// m-party version of the optimal affine strategy.
    Multiparty {
        #[command(flatten)]
        task: TaskArgs,
        /// Number of parties.
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Subcommand)]
enum BoxCommand {
    /// Monte Carlo estimate and exact success of a box resource.
    Simulate {
        /// pr-and, noisy-pr-and:p=P, perfect:FN, or a box/protocol JSON file
        #[arg(long, value_name = "SPEC")]
        protocol: String,
        #[command(flatten)]
        task: TaskArgs,
        /// Number of trials.
        #[arg(long = "n", value_name = "N")]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Validity, non-signalling and marginal checks for a box file.
    Analyze {
        #[arg(long = "box", value_name = "FILE")]
        path: PathBuf,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use nonlocal::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Parse(_) | Error::InvalidArgument(_) | Error::WidthMismatch { .. }) => 2,
        Some(Error::Guard { .. }) => 3,
        Some(Error::Numerical(_)) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match commands::run(cli.command) {
        Ok(result) => {
            println!("{}", result.render(cli.format));
            eprintln!(
                "nonlocal: {} finished in {:.3} s",
                result.command,
                start.elapsed().as_secs_f64()
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
