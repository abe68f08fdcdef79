mod check;
mod gen;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Sequential consistency with bounded preemptions.
#[derive(Parser)]
#[command(name = "vscp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a trace has an SC interleaving with at most `--pi` preemptions.
    Check {
        trace: PathBuf,
        #[arg(long, default_value_t = 0)]
        pi: usize,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Report thread and event counts and writers per variable.
    Classify { trace: PathBuf },
    /// Generate a hardness instance as a trace plus a `.labels.json` sidecar.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// 3-CNF to a 3-writer program.
    Sat3w {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// 3-CNF to a 2-writer program.
    Sat2w {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Independent set of size K to a program with 3K preemptions.
    Indep {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// One-writer procedure when every variable has at most one writer, exact search otherwise.
    Auto,
    Onewriter,
    Exact,
    Oracle,
}

pub const EXIT_CONSISTENT: u8 = 0;
pub const EXIT_INCONSISTENT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

/// A failure that ends the command with a message and an exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn read_input(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            trace,
            pi,
            mode,
            json,
        } => check::check(&trace, pi, mode, json),
        Command::Classify { trace } => check::classify(&trace),
        Command::Gen { kind } => match kind {
            GenKind::Sat3w { cnf, out } => gen::sat(&cnf, &out, gen::Target::ThreeWriter),
            GenKind::Sat2w { cnf, out } => gen::sat(&cnf, &out, gen::Target::TwoWriter),
            GenKind::Indep { graph, k, out } => gen::indep(&graph, k, &out),
        },
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("vscp: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
