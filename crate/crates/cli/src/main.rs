use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lapsep::generate::{InstanceClass, InstanceKind};

mod commands;
mod report;

/// Separability and entanglement certificates for Laplacian-type density
/// matrices.
///
/// Exit codes: 0 separable / valid, 1 entangled / invalid certificate,
/// 2 unknown, 3 malformed input.
#[derive(Debug, Parser)]
#[command(name = "lapsep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Matrix,
    Graph,
}

#[derive(Debug, clap::Args)]
pub struct InputOpts {
    /// Input kind; inferred from the header token when omitted.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// Numerical tolerance.
    #[arg(long, default_value_t = lapsep::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide separability of one or more matrix or graph files.
    Classify {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        opts: InputOpts,
        /// Print a JSON report instead of a text line.
        #[arg(long)]
        json: bool,
        /// Worker threads for multiple inputs; reports keep input order.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write a product decomposition for a separable input.
    Decompose {
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: InputOpts,
        #[arg(long)]
        json: bool,
    },
    /// Check a decomposition against a matrix.
    Verify {
        input: PathBuf,
        decomposition: PathBuf,
        #[command(flatten)]
        opts: InputOpts,
        #[arg(long)]
        json: bool,
    },
    /// Write the partial transpose in matrix format.
    Ptranspose {
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: InputOpts,
    },
    /// Print the minimum eigenpair of the partial transpose if it is negative.
    Witness {
        input: PathBuf,
        #[command(flatten)]
        opts: InputOpts,
        #[arg(long)]
        json: bool,
    },
    /// Generate a random instance.
    Gen {
        /// s10, s1 or v1.
        class: InstanceClass,
        p: usize,
        q: usize,
        /// separable, entangled or random.
        #[arg(long, default_value = "random")]
        kind: InstanceKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted. Separable instances also write
        /// `<out>.decomp`.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Write the generating graph instead of the matrix, when there is one.
        #[arg(long, value_enum, default_value = "matrix")]
        format: InputFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify {
            inputs,
            opts,
            json,
            jobs,
        } => commands::classify(&inputs, &opts, json, jobs),
        Command::Decompose {
            input,
            out,
            opts,
            json,
        } => commands::decompose(&input, out.as_deref(), &opts, json),
        Command::Verify {
            input,
            decomposition,
            opts,
            json,
        } => commands::verify(&input, &decomposition, &opts, json),
        Command::Ptranspose { input, out, opts } => {
            commands::ptranspose(&input, out.as_deref(), &opts)
        }
        Command::Witness { input, opts, json } => commands::witness(&input, &opts, json),
        Command::Gen {
            class,
            p,
            q,
            kind,
            seed,
            out,
            format,
        } => commands::gen(class, kind, p, q, seed, out.as_deref(), format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_INVALID)
        }
    }
}
