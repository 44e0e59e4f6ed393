//! Implementations behind the `madplan` subcommands.
//!
//! Each command returns a process exit code on success and a
//! [`CliError`] on failure. Verdict-style codes follow one convention
//! across commands: 0 for true/found, 1 for false/not-found, 2 for an
//! undefined update, 64 for usage errors, and 65 for unreadable or
//! unparseable data.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use madplan::initgen::{announcement_chain, generate_explicit, generate_partition, GenConfig, GenError};
use madplan::lang::{parse_domain, parse_query, Domain, UniverseSpec};
use madplan::model::{Formula, StateId};
use madplan::plan::{holds_after, plan, PlanRequest, PlanResult, QueryVerdict, Strategy};

use crate::doc;
use crate::dot;

use thiserror::Error;

/// Exit code for a truthful verdict, a found plan, or plain success.
pub const EXIT_TRUE: i32 = 0;
/// Exit code for a false verdict or an exhausted plan search.
pub const EXIT_FALSE: i32 = 1;
/// Exit code for an undefined action sequence.
pub const EXIT_UNDEFINED: i32 = 2;
/// Exit code for bad arguments, flags, or query text.
pub const EXIT_USAGE: i32 = 64;
/// Exit code for unreadable or unparseable files.
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

/// Where the initial pointed structure of `check`/`plan` comes from.
pub enum ModelSource {
    /// Read an explicit `.mks` document.
    File(PathBuf),
    /// Run the bounded generator and require exactly one model with at
    /// most this many states.
    Generate(usize),
}

/// Tries `path` as given, then relative to `$MADPLAN_CORPUS`.
fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if let Ok(root) = std::env::var("MADPLAN_CORPUS") {
        let candidate = Path::new(&root).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn read(path: &Path) -> Result<String, CliError> {
    let resolved = resolve(path);
    fs::read_to_string(&resolved)
        .map_err(|e| CliError::Data(format!("{}: {e}", resolved.display())))
}

fn load_domain(path: &Path) -> Result<Domain, CliError> {
    let text = read(path)?;
    let d =
        parse_domain(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    // Queries and planners resolve ground instances, so expand law
    // schemas over the declared agents up front.
    Ok(d.ground())
}

fn initial_model(
    d: &Domain,
    source: &ModelSource,
) -> Result<madplan::model::PointedStructure, CliError> {
    match source {
        ModelSource::File(path) => {
            let text = read(path)?;
            doc::parse_structure(&text)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
        ModelSource::Generate(max_states) => {
            if d.universe().is_some() {
                return Err(CliError::Data(
                    "universe domains have no pointed initial model; use `madplan puzzle`"
                        .to_string(),
                ));
            }
            let cfg = GenConfig { limit: Some(2), ..GenConfig::for_domain(d, *max_states) };
            let mut stream = generate_explicit(d, &cfg).map_err(gen_error)?;
            match (stream.next(), stream.next()) {
                (Some(p), None) => Ok(p),
                (None, _) => Err(CliError::Data(format!(
                    "no initial model with at most {max_states} states satisfies the domain"
                ))),
                (Some(_), Some(_)) => Err(CliError::Data(format!(
                    "more than one initial model with at most {max_states} states; \
                     supply one explicitly with --model"
                ))),
            }
        }
    }
}

fn gen_error(e: GenError) -> CliError {
    match e {
        GenError::ZeroStates | GenError::SearchSpaceTooLarge(_) => CliError::Usage(e.to_string()),
        other => CliError::Data(other.to_string()),
    }
}

/// `madplan check`: evaluate one query against the initial model.
pub fn cmd_check(domain: &Path, query: &str, source: &ModelSource) -> Result<i32, CliError> {
    let d = load_domain(domain)?;
    let q = parse_query(query, &d).map_err(|e| CliError::Usage(format!("query: {e}")))?;
    let p = initial_model(&d, source)?;
    let verdict = holds_after(&p, &q).map_err(|e| CliError::Data(e.to_string()))?;
    match verdict {
        QueryVerdict::Holds => {
            println!("true");
            Ok(EXIT_TRUE)
        }
        QueryVerdict::Fails => {
            println!("false");
            Ok(EXIT_FALSE)
        }
        QueryVerdict::Undefined(reason) => {
            println!("undefined({reason})");
            Ok(EXIT_UNDEFINED)
        }
    }
}

/// `madplan plan`: search for an action sequence reaching the goal.
pub fn cmd_plan(
    domain: &Path,
    goal: &str,
    max_len: usize,
    strategy: Strategy,
    source: &ModelSource,
) -> Result<i32, CliError> {
    let d = load_domain(domain)?;
    let goal = parse_query(&format!("{goal} after []"), &d)
        .map_err(|e| CliError::Usage(format!("goal: {e}")))?
        .goal;
    let initial = initial_model(&d, source)?;
    let request = PlanRequest { initial, domain: &d, goal, max_len, strategy };
    match plan(&request).map_err(|e| CliError::Data(e.to_string()))? {
        PlanResult::Found { plan, .. } => {
            for action in &plan {
                println!("{action}");
            }
            Ok(EXIT_TRUE)
        }
        PlanResult::NotFoundWithinBound => {
            println!("NOT-FOUND");
            Ok(EXIT_FALSE)
        }
    }
}

/// `madplan init`: enumerate initial models of a domain.
pub fn cmd_init(
    domain: &Path,
    states: usize,
    count: usize,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    if states == 0 {
        return Err(CliError::Usage("--states must be at least 1".to_string()));
    }
    let d = load_domain(domain)?;
    let cfg = GenConfig { limit: Some(count), ..GenConfig::for_domain(&d, states) };
    let stream = generate_explicit(&d, &cfg).map_err(gen_error)?;
    let mut found = 0usize;
    for (idx, model) in stream.enumerate() {
        let text = doc::print_structure(&model);
        match out {
            Some(dir) => {
                let path = dir.join(format!("model_{:04}.mks", idx + 1));
                fs::write(&path, text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            }
            None => {
                println!("% model {}", idx + 1);
                print!("{text}");
            }
        }
        found += 1;
    }
    println!("found {found}");
    Ok(EXIT_TRUE)
}

/// The sum-and-product dialogue over pairs `1 < x < y`, `x + y <= max`.
fn sum_product_domain(max: i64) -> Domain {
    parse_domain(&format!(
        "agent(s). agent(p). universe(x, 1..{max}). universe(y, 1..{max}). \
         constraint(1 < x & x < y & x + y <= {max}). \
         observes(s, x + y). observes(p, x * y)."
    ))
    .expect("the built-in puzzle domain parses")
}

/// The three announcements of the dialogue: the sum-knower denies that
/// the product-knower can know, the product-knower then knows, and
/// finally the sum-knower knows too.
fn sum_product_chain(d: &Domain) -> Vec<Formula> {
    ["k(s, ~(kv(p, x) & kv(p, y)))", "kv(p, x) & kv(p, y)", "kv(s, x) & kv(s, y)"]
        .iter()
        .map(|text| {
            parse_query(&format!("{text} after []"), d)
                .expect("the built-in announcements parse")
                .goal
        })
        .collect()
}

/// Renders a partition-generator state name like `s4_13` as variable
/// assignments in declaration order: `x=4 y=13`.
fn assignment_line(u: &UniverseSpec, state: &StateId) -> String {
    let values = state.as_str().trim_start_matches('s').split('_');
    u.vars
        .iter()
        .zip(values)
        .map(|((name, _, _), value)| format!("{name}={value}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// `madplan puzzle sumproduct`: run the dialogue and print the
/// surviving assignments.
pub fn cmd_puzzle_sumproduct(max: i64) -> Result<i32, CliError> {
    if max < 5 {
        return Err(CliError::Usage("--max must be at least 5".to_string()));
    }
    let started = Instant::now();
    let d = sum_product_domain(max);
    let u = d.universe().expect("the puzzle domain has a universe block");
    let m0 = generate_partition(u).map_err(|e| CliError::Data(e.to_string()))?;
    println!("initial states: {}", m0.state_count());
    let survivors = announcement_chain(&m0, &sum_product_chain(&d));
    for state in survivors.state_ids() {
        println!("{}", assignment_line(u, state));
    }
    eprintln!("elapsed: {:.2?}", started.elapsed());
    Ok(EXIT_TRUE)
}

/// `madplan export-dot`: print a structure document as a DOT digraph.
pub fn cmd_export_dot(structure: &Path) -> Result<i32, CliError> {
    let text = read(structure)?;
    let document = doc::parse_document(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", structure.display())))?;
    print!("{}", dot::to_dot(&document.structure, document.real.as_ref()));
    Ok(EXIT_TRUE)
}
