use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Work with obligation automata in the HOApp format.
#[derive(Debug, Parser)]
#[command(name = "hoapp", version, about)]
struct Cli {
    /// Accept negative obligations (`x != t` after `$`) in input documents.
    #[arg(long, global = true)]
    ext_neg_obligations: bool,

    /// Write the result to FILE instead of standard output.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// Bounded search for an ultimately periodic accepted word.
    Lasso,
    /// Emit a VMT-LIB model for an external model checker.
    Vmt,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and type-check a document and print a summary.
    Validate { file: PathBuf },
    /// Lower a HOApp document to plain HOA v1.
    Lower { file: PathBuf },
    /// Lift a lowered HOA v1 document back to HOApp.
    Lift {
        file: PathBuf,
        /// Lower the result again and require that it lifts to the same automaton.
        #[arg(long)]
        check_roundtrip: bool,
    },
    /// Product of two automata (intersection of their languages).
    Product {
        left: PathBuf,
        right: PathBuf,
        /// Compose assume/guarantee formulas into each operand first.
        #[arg(long)]
        apply_ltl: bool,
    },
    /// Sum of two automata (union of their languages).
    Sum {
        left: PathBuf,
        right: PathBuf,
        /// Compose assume/guarantee formulas into each operand first.
        #[arg(long)]
        apply_ltl: bool,
    },
    /// Translate an LTL formula with predicates into an automaton.
    Ltl {
        formula: String,
        /// Variable declarations, one `name:type[:controllable]` per line.
        #[arg(long, value_name = "FILE")]
        types: PathBuf,
    },
    /// Check a word file against an automaton (finite prefix or lasso).
    Run {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        word: PathBuf,
    },
    /// Look for an accepted word, or emit a model for an external checker.
    Empty {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Lasso)]
        engine: Engine,
        /// Longest stem tried by the lasso engine.
        #[arg(long, default_value_t = 3)]
        stem: usize,
        /// Longest loop tried by the lasso engine.
        #[arg(long = "loop", default_value_t = 3)]
        loop_len: usize,
        /// At most 2^N disequality cases per solver call.
        #[arg(long, default_value_t = 12)]
        split_bits: u32,
        /// Branch-and-bound depth limit for integer variables.
        #[arg(long, default_value_t = 50)]
        bb_depth: usize,
    },
    /// Render an automaton as a GraphViz digraph.
    Dot { file: PathBuf },
}

/// A failed command: exit status and message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    /// Exit status by error kind; diagnostics are prefixed with `path`.
    pub fn from_error(path: &Path, e: hoapp::Error) -> Self {
        use hoapp::Error;
        let code = match &e {
            Error::Parse { .. } | Error::Alias(_) | Error::Lift(_) => 2,
            Error::Type(_) => 3,
            Error::Semantic(_) => 4,
        };
        let p = path.display();
        let message = e
            .to_string()
            .lines()
            .map(|l| format!("{p}:{l}"))
            .collect::<Vec<_>>()
            .join("\n");
        Failure { code, message }
    }
}

/// Output of a successful (or negative) run.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli);
    match result {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &out.text)
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(4)
                }
            }
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
