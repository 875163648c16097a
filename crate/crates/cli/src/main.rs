//! `spinwire` command-line front end: transfer, logical-transport and MQC time
//! series as CSV, the oracle verification suite, and manifest replay.

mod args;
mod manifest;
mod run;
mod verify;

use std::io;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "spinwire", version, about = "Quantum state transfer in spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polarization correlation C_{j,l}(t) for every site l.
    Transfer(run::TransferArgs),
    /// Logical-qubit transport correlations and entanglement fidelity.
    Logical(run::LogicalArgs),
    /// Zero- and double-quantum coherence intensities.
    Mqc(run::MqcArgs),
    /// Cross-check every fast path against the dense oracle.
    Verify(verify::VerifyArgs),
    /// Mirror time and group velocity of an engineered chain.
    Timing(run::TimingArgs),
    /// Re-run a command from its manifest.
    Replay(run::ReplayArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Verification(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Verification(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<spinwire::Error> for CliError {
    fn from(e: spinwire::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transfer(a) => run::transfer(a),
        Command::Logical(a) => run::logical(a),
        Command::Mqc(a) => run::mqc(a),
        Command::Verify(a) => verify::verify(a),
        Command::Timing(a) => run::timing(a),
        Command::Replay(a) => run::replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinwire: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
