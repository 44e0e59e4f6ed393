use std::path::PathBuf;
use std::process;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use madplan::plan::Strategy;
use madplan_cli::commands::{self, CliError, ModelSource, EXIT_USAGE};

/// Epistemic action-language tooling: model checking, planning, initial
/// model generation, bundled puzzles, and DOT export.
#[derive(Parser)]
#[command(
    name = "madplan",
    version,
    after_help = "File arguments are tried as given, then relative to $MADPLAN_CORPUS.\n\
                  Exit codes: 0 true/found, 1 false/not-found, 2 undefined, \
                  64 usage error, 65 bad data."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a query (`formula after [action; ...]`) in an initial model.
    Check {
        /// Domain description (`.mad`).
        domain: PathBuf,
        /// The query, as one shell argument.
        query: String,
        /// Initial model as a structure document (`.mks`).
        #[arg(long, value_name = "FILE", conflicts_with = "gen")]
        model: Option<PathBuf>,
        /// Generate the initial model, searching structures with at most
        /// M states; the domain must pin down exactly one.
        #[arg(long, value_name = "M")]
        gen: Option<usize>,
    },
    /// Search for an action sequence that makes a goal formula true.
    Plan {
        /// Domain description (`.mad`).
        domain: PathBuf,
        /// Goal formula.
        #[arg(long)]
        goal: String,
        /// Longest plan considered.
        #[arg(long = "max-len", value_name = "N")]
        max_len: usize,
        /// Search strategy; `bfs` returns a shortest plan.
        #[arg(long, value_enum, default_value_t = StrategyArg::Bfs)]
        strategy: StrategyArg,
        /// Initial model as a structure document (`.mks`).
        #[arg(long, value_name = "FILE", conflicts_with = "gen")]
        model: Option<PathBuf>,
        /// Generate the initial model (see `check --gen`).
        #[arg(long, value_name = "M")]
        gen: Option<usize>,
    },
    /// Enumerate initial models of a domain as structure documents.
    Init {
        /// Domain description (`.mad`).
        domain: PathBuf,
        /// Largest number of states to search.
        #[arg(long, value_name = "M")]
        states: usize,
        /// How many models to emit at most.
        #[arg(long, value_name = "K", default_value_t = 1)]
        count: usize,
        /// Write models to this directory instead of standard output.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run a bundled knowledge puzzle.
    Puzzle {
        #[command(subcommand)]
        which: PuzzleCommand,
    },
    /// Render a structure document (`.mks`) as a DOT digraph.
    ExportDot {
        /// Structure document to render.
        structure: PathBuf,
    },
}

#[derive(Subcommand)]
enum PuzzleCommand {
    /// The sum-and-product dialogue; prints the surviving assignments.
    Sumproduct {
        /// Upper bound on the sum x + y.
        #[arg(long, default_value_t = 100)]
        max: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Dfs,
    Bfs,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Dfs => Strategy::Dfs,
            StrategyArg::Bfs => Strategy::Bfs,
        }
    }
}

/// Exactly one of `--model`/`--gen` picks the initial model.
fn model_source(model: Option<PathBuf>, gen: Option<usize>) -> Result<ModelSource, CliError> {
    match (model, gen) {
        (Some(path), None) => Ok(ModelSource::File(path)),
        (None, Some(m)) => Ok(ModelSource::Generate(m)),
        (None, None) => {
            Err(CliError::Usage("an initial model is required: pass --model or --gen".to_string()))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects --model with --gen"),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Check { domain, query, model, gen } => {
            commands::cmd_check(&domain, &query, &model_source(model, gen)?)
        }
        Command::Plan { domain, goal, max_len, strategy, model, gen } => commands::cmd_plan(
            &domain,
            &goal,
            max_len,
            strategy.into(),
            &model_source(model, gen)?,
        ),
        Command::Init { domain, states, count, out } => {
            commands::cmd_init(&domain, states, count, out.as_deref())
        }
        Command::Puzzle { which: PuzzleCommand::Sumproduct { max } } => {
            commands::cmd_puzzle_sumproduct(max)
        }
        Command::ExportDot { structure } => commands::cmd_export_dot(&structure),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.code());
        }
    }
}
