//! `atg`: command-line front end for average-time games.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "atg", version, about = "Average-time games on bounded timed automata")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Maximum number of boundary region graph vertices.
    #[arg(long, global = true, default_value_t = atg::brg::DEFAULT_VERTEX_CAP)]
    pub cap: usize,
    /// Seed for a generated instance, used when no input file is given.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Overrides the mean-payoff iteration horizon.
    #[arg(long, global = true)]
    pub horizon: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an automaton file for well-formedness.
    Validate { file: Option<PathBuf> },
    /// Value of the game from a state; with --bound, decide `value <= bound`.
    Solve {
        file: Option<PathBuf>,
        /// `loc` or `loc:c=1/2,d=0`; defaults to the file's initial state.
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Dump the boundary region graph.
    Brg {
        file: Option<PathBuf>,
        #[arg(long)]
        state: Option<String>,
    },
    /// Play the extracted strategies against each other.
    Simulate {
        file: Option<PathBuf>,
        /// State the game is solved from.
        #[arg(long)]
        state: Option<String>,
        /// Start of the play, if different from --state.
        #[arg(long)]
        start: Option<String>,
        /// Play ε-close strategies instead of exact boundary ones.
        #[arg(long)]
        eps: Option<String>,
        /// Which player plays ε-close when --eps is given.
        #[arg(long, value_enum, default_value_t = EpsPlayer::Both)]
        eps_player: EpsPlayer,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    #[command(subcommand)]
    Countdown(CountdownCommand),
    #[command(subcommand)]
    Mpg(MpgCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EpsPlayer {
    Min,
    Max,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum CountdownCommand {
    /// Winner of the countdown game by dynamic programming.
    Solve { file: Option<PathBuf> },
    /// The two-clock timed automaton encoding the game.
    Reduce {
        file: Option<PathBuf>,
        #[arg(long)]
        w: Option<u32>,
    },
    /// Solve the reduction and compare with the dynamic programme.
    CrossValidate {
        file: Option<PathBuf>,
        #[arg(long)]
        w: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MpgCommand {
    /// Values and optimal positional strategies.
    Solve { file: Option<PathBuf> },
    /// Values by enumerating every strategy pair.
    Brute { file: Option<PathBuf> },
    /// Check a solution file against the game.
    Verify {
        file: Option<PathBuf>,
        #[arg(long)]
        solution: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match commands::run(&cli) {
        Ok(text) => emit(&cli.global, &text),
        Err(CliError::Failed { output, message }) => {
            emit(&cli.global, &output).and(Err(CliError::Failed { output: String::new(), message }))
        }
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn emit(global: &Global, text: &str) -> Result<(), CliError> {
    match &global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
