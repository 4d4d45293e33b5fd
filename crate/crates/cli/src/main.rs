use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coalg_cli::commands::EXIT_INPUT;
use coalg_cli::{run, Command, Options};

/// Reachability, tree checks and unravelling for pointed coalgebras.
///
/// Exit status: 0 success or true verdict, 1 false verdict, 2 input error,
/// 3 search-space guard exceeded.
#[derive(Parser)]
#[command(name = "coalg", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a document
    Check(Args),
    /// Reachability levels and verdict
    Reachable(Args),
    /// Decide whether the coalgebra is a tree
    IsTree(Args),
    /// Tree unravelling with projection and copy counts
    Unravel(Args),
    /// Coalgebra of defined inputs of a partial automaton
    DfaInputs(Args),
    /// Coalgebra of rooted paths of a multigraph
    Paths(Args),
    /// Graphviz rendering
    Dot(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Input document; `-` or absent reads stdin
    file: Option<PathBuf>,
    /// Unravelling depth
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    /// Longest word or path to enumerate when the result is infinite
    #[arg(long)]
    maxlen: Option<usize>,
    /// Write the resulting document here
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Write a DOT rendering here
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Cross-check against brute-force definitional oracles
    #[arg(long)]
    oracle: bool,
}

fn read_input(file: &Option<PathBuf>) -> std::io::Result<String> {
    match file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Check(a) => (Command::Check, a),
        Cmd::Reachable(a) => (Command::Reachable, a),
        Cmd::IsTree(a) => (Command::IsTree, a),
        Cmd::Unravel(a) => (Command::Unravel, a),
        Cmd::DfaInputs(a) => (Command::DfaInputs, a),
        Cmd::Paths(a) => (Command::Paths, a),
        Cmd::Dot(a) => (Command::Dot, a),
    };
    let guard = match std::env::var("COALG_GUARD") {
        Ok(v) => match v.trim().parse::<u128>() {
            Ok(g) => Some(g),
            Err(_) => {
                eprintln!("error: COALG_GUARD must be a non-negative integer, got `{v}`");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        },
        Err(_) => None,
    };
    let text = match read_input(&args.file) {
        Ok(t) => t,
        Err(e) => {
            let name = args.file.as_ref().map_or("stdin".into(), |p| p.display().to_string());
            eprintln!("error: cannot read {name}: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let opts = Options {
        depth: args.depth.map(|d| d as usize),
        maxlen: args.maxlen,
        emit: args.emit,
        dot: args.dot,
        oracle: args.oracle,
        guard,
    };
    match run(command, &text, &opts) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
