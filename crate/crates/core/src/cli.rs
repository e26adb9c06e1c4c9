//! The command-line surface: one subcommand per major operation, JSON on
//! standard output, and a three-way exit protocol. Success exits 0, any
//! input problem (bad flags, unreadable files, malformed documents,
//! violated preconditions) exits 2, and a blown enumeration budget exits 3
//! so scripts can tell "no" from "too big to answer".
//!
//! [`execute`] is the whole interface; the binary is a thin wrapper around
//! it, which keeps every code path reachable from tests without spawning
//! processes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::alien::{classify_boolean, solve_alien_auto, AlienError};
use crate::algebra::{compute_core, ppdef_check, AlgebraError};
use crate::equality::{
    classify_equality, eq_compute_c, neq_witness_search, EqClassifyOptions, EqError, EqLanguage,
    SearchBounds,
};
use crate::reductions::{
    equiv_via_impl, impl_via_redundant, redundant_via_equiv, ReductionError,
};
use crate::solvers::{solve_bruteforce, BruteForceOptions, SolveResult, SolverError};
use crate::structures::{Instance, ModelError, Structure};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Usage { message: String },
    #[error("{message}")]
    Input { message: String },
    #[error("{message}")]
    Budget { message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } | CliError::Input { .. } => 2,
            CliError::Budget { .. } => 3,
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError::Input {
            message: message.into(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => CliError::Budget {
                message: e.to_string(),
            },
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::SearchTooLarge { .. } => CliError::Budget {
                message: e.to_string(),
            },
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<EqError> for CliError {
    fn from(e: EqError) -> Self {
        match e {
            EqError::EnumerationTooLarge { .. } => CliError::Budget {
                message: e.to_string(),
            },
            EqError::Solver(inner) => inner.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<AlienError> for CliError {
    fn from(e: AlienError) -> Self {
        match e {
            AlienError::Solver(inner) => inner.into(),
            AlienError::Algebra(inner) => inner.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Solver(inner) => inner.into(),
            ReductionError::Algebra(inner) => inner.into(),
            ReductionError::Equality(inner) => inner.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "alien-csp",
    version,
    about = "Solvers, classifiers, and reductions for constraint problems with alien constraints"
)]
struct Cli {
    /// Output format; only JSON is implemented.
    #[arg(long, global = true, default_value = "json", value_parser = ["json"])]
    format: String,
    #[command(subcommand)]
    command: Command,
}

const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Subcommand)]
enum Command {
    /// Solve a finite-domain instance by exhaustive search.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Search-node budget before giving up.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget_nodes: u64,
    },
    /// Solve an instance picking a strategy from the closure classes of
    /// its languages.
    SolveAlien {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Classify a Boolean base/alien pair by parameterized complexity.
    ClassifyBoolean {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        alien: PathBuf,
    },
    /// Classify an equality-language base/alien pair.
    ClassifyEquality {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        alien: PathBuf,
        /// Largest alien budget to report on; defaults to the disequality
        /// clique size for the computed threshold.
        #[arg(long)]
        k: Option<usize>,
        /// Witness-search bound on instance variables.
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        /// Witness-search bound on instance constraints.
        #[arg(long, default_value_t = 3)]
        mmax: usize,
    },
    /// Compute the core of a structure.
    Core {
        #[arg(long)]
        base: PathBuf,
    },
    /// Decide whether one constraint is redundant in its instance.
    Redundant {
        #[arg(long)]
        instance: PathBuf,
        /// Position of the constraint in the instance's list.
        #[arg(long)]
        constraint: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget_nodes: u64,
    },
    /// Decide whether every solution of the first instance satisfies the
    /// second. Pass --instance twice, antecedent first.
    Implies {
        #[arg(long = "instance", required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget_nodes: u64,
    },
    /// Decide whether two instances have the same solution set. Pass
    /// --instance twice.
    Equiv {
        #[arg(long = "instance", required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget_nodes: u64,
    },
    /// Check which alien relations are pp-definable from the base.
    PpdefCheck {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        alien: PathBuf,
    },
    /// Compute the hardness threshold of an equality language.
    ComputeC {
        #[arg(long)]
        base: PathBuf,
    },
    /// Search for a bounded-budget definition of an all-distinct relation.
    WitnessSearch {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        alien: PathBuf,
        /// Alien-atom budget.
        #[arg(long)]
        k: usize,
        /// How many positions the definition must force apart.
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
    },
}

/// Runs one command line (including the program name) and returns the
/// output document. Errors carry the exit code; see [`CliError`].
pub fn execute(argv: impl IntoIterator<Item = String>) -> Result<String, CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Ok(e.to_string().trim_end().to_string())
                }
                _ => Err(CliError::Usage {
                    message: e.to_string().trim_end().to_string(),
                }),
            }
        }
    };
    match cli.command {
        Command::Solve {
            instance,
            budget_nodes,
        } => {
            let inst = load_instance(&instance)?;
            let options = BruteForceOptions {
                node_budget: budget_nodes,
            };
            let result = solve_bruteforce(&inst, &options)?;
            Ok(satisfiable_doc(&result, None))
        }
        Command::SolveAlien { instance } => {
            let inst = load_instance(&instance)?;
            let outcome = solve_alien_auto(&inst)?;
            Ok(satisfiable_doc(
                &outcome.result,
                Some(outcome.strategy.to_string()),
            ))
        }
        Command::ClassifyBoolean { base, alien } => {
            let base = load_structure(&base)?;
            let alien = load_structure(&alien)?;
            let classification = classify_boolean(&base, &alien)?;
            Ok(to_doc(&classification))
        }
        Command::ClassifyEquality {
            base,
            alien,
            k,
            nmax,
            mmax,
        } => {
            let base = load_language(&base)?;
            let alien = load_language(&alien)?;
            let options = EqClassifyOptions {
                k_max: k,
                bounds: SearchBounds {
                    max_variables: nmax,
                    max_constraints: mmax,
                },
            };
            let verdict = classify_equality(&base, &alien, &options)?;
            Ok(to_doc(&verdict))
        }
        Command::Core { base } => {
            let s = load_structure(&base)?;
            let report = compute_core(&s)?;
            let core: Json = serde_json::from_str(&report.core.serialize())
                .expect("structures serialize to valid JSON");
            Ok(to_doc(&json!({
                "core": core,
                "map": report.map,
                "range": report.range,
            })))
        }
        Command::Redundant {
            instance,
            constraint,
            budget_nodes,
        } => {
            let inst = load_instance(&instance)?;
            let options = BruteForceOptions {
                node_budget: budget_nodes,
            };
            let mut solve = |i: &Instance| solve_bruteforce(i, &options);
            let redundant = redundant_via_equiv(&inst, constraint, &mut solve)?;
            Ok(to_doc(&json!({ "redundant": redundant })))
        }
        Command::Implies {
            instances,
            budget_nodes,
        } => {
            let (a, b) = two_instances(&instances)?;
            let options = BruteForceOptions {
                node_budget: budget_nodes,
            };
            let mut solve = |i: &Instance| solve_bruteforce(i, &options);
            let implies = impl_via_redundant(&a, &b, &mut solve)?;
            Ok(to_doc(&json!({ "implies": implies })))
        }
        Command::Equiv {
            instances,
            budget_nodes,
        } => {
            let (a, b) = two_instances(&instances)?;
            let options = BruteForceOptions {
                node_budget: budget_nodes,
            };
            let mut solve = |i: &Instance| solve_bruteforce(i, &options);
            let equivalent = equiv_via_impl(&a, &b, &mut solve)?;
            Ok(to_doc(&json!({ "equivalent": equivalent })))
        }
        Command::PpdefCheck { base, alien } => {
            let base = load_structure(&base)?;
            let alien = load_structure(&alien)?;
            let mut relations = Map::new();
            let mut all = true;
            for (symbol, rel) in alien.relations() {
                let report = ppdef_check(&base, rel)?;
                all &= report.definable;
                let violating = report.violating.map(|op| {
                    json!({
                        "arity": op.arity(),
                        "domain": op.domain_size(),
                        "table": op.values(),
                    })
                });
                relations.insert(
                    symbol.to_string(),
                    json!({
                        "definable": report.definable,
                        "witness_arity": report.witness_arity,
                        "violating": violating,
                    }),
                );
            }
            Ok(to_doc(&json!({
                "definable": all,
                "relations": relations,
            })))
        }
        Command::ComputeC { base } => {
            let language = load_language(&base)?;
            let c = eq_compute_c(&language)?;
            Ok(to_doc(&json!({ "c": c })))
        }
        Command::WitnessSearch {
            base,
            alien,
            k,
            c,
            nmax,
            mmax,
        } => {
            let base = load_language(&base)?;
            let alien = load_language(&alien)?;
            let bounds = SearchBounds {
                max_variables: nmax,
                max_constraints: mmax,
            };
            let outcome = neq_witness_search(&base, &alien, k, c, &bounds)?;
            Ok(to_doc(&outcome))
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure, CliError> {
    Ok(Structure::parse(&read(path)?)?)
}

fn load_language(path: &Path) -> Result<EqLanguage, CliError> {
    Ok(EqLanguage::parse(&read(path)?)?)
}

/// Instances may name other files for their structures; references resolve
/// relative to the instance document's directory.
fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let doc = read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Instance::parse(&doc, |name| {
        let target = dir.join(name);
        fs::read_to_string(&target)
            .map_err(|e| ModelError::UnresolvedReference(format!("{}: {e}", target.display())))
    })?)
}

fn two_instances(paths: &[PathBuf]) -> Result<(Instance, Instance), CliError> {
    if paths.len() != 2 {
        return Err(CliError::input(format!(
            "expected exactly two --instance flags, got {}",
            paths.len()
        )));
    }
    Ok((load_instance(&paths[0])?, load_instance(&paths[1])?))
}

fn satisfiable_doc(result: &SolveResult, strategy: Option<String>) -> String {
    let mut map = Map::new();
    map.insert("satisfiable".to_string(), json!(result.is_sat()));
    if let Some(strategy) = strategy {
        map.insert("strategy".to_string(), json!(strategy));
    }
    if let Some(witness) = result.witness() {
        map.insert(
            "witness".to_string(),
            serde_json::to_value(witness).expect("witnesses serialize cleanly"),
        );
    }
    to_doc(&Json::Object(map))
}

fn to_doc<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("command outputs serialize cleanly")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn run(args: &[&str]) -> Result<String, CliError> {
        execute(
            std::iter::once("alien-csp".to_string()).chain(args.iter().map(|s| s.to_string())),
        )
    }

    fn file(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
        let path = dir.path().join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path.to_string_lossy().into_owned()
    }

    const TRIANGLE: &str = r#"{
        "base": {"domain": 2, "relations": {"neq": {"arity": 2, "tuples": [[0,1],[1,0]]}}},
        "variables": ["x", "y", "z"],
        "constraints": [
            {"rel": "neq", "args": ["x", "y"]},
            {"rel": "neq", "args": ["y", "z"]},
            {"rel": "neq", "args": ["x", "z"]}
        ]
    }"#;

    #[test]
    fn solve_reports_unsatisfiable_triangles() {
        let dir = tempfile::tempdir().unwrap();
        let path = file(&dir, "tri.json", TRIANGLE);
        let out = run(&["solve", "--instance", &path]).unwrap();
        assert_eq!(out, r#"{"satisfiable":false}"#);
    }

    #[test]
    fn solve_attaches_witnesses() {
        let dir = tempfile::tempdir().unwrap();
        let path = file(
            &dir,
            "edge.json",
            r#"{
                "base": {"domain": 2, "relations": {"neq": {"arity": 2, "tuples": [[0,1],[1,0]]}}},
                "variables": ["x", "y"],
                "constraints": [{"rel": "neq", "args": ["x", "y"]}]
            }"#,
        );
        let out = run(&["solve", "--instance", &path]).unwrap();
        assert_eq!(out, r#"{"satisfiable":true,"witness":{"x":0,"y":1}}"#);
    }

    #[test]
    fn exhausted_budgets_exit_three() {
        let dir = tempfile::tempdir().unwrap();
        let path = file(&dir, "tri.json", TRIANGLE);
        let err = run(&["solve", "--instance", &path, "--budget-nodes", "2"]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn usage_and_input_problems_exit_two() {
        let err = run(&["solve"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run(&["solve", "--instance", "/nonexistent/x.json"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run(&["no-such-command"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn implies_needs_exactly_two_instances() {
        let dir = tempfile::tempdir().unwrap();
        let path = file(&dir, "tri.json", TRIANGLE);
        let err = run(&["implies", "--instance", &path]).unwrap_err();
        assert!(matches!(err, CliError::Input { .. }));
    }

    #[test]
    fn compute_c_emits_plain_json() {
        let dir = tempfile::tempdir().unwrap();
        let link = file(
            &dir,
            "link.json",
            r#"{"link": {"arity": 3, "formula": "(x0=x1)|(x1=x2)"}}"#,
        );
        let out = run(&["compute-c", "--base", &link]).unwrap();
        assert_eq!(out, r#"{"c":2}"#);
        let horn = file(&dir, "neq.json", r#"{"neq": {"arity": 2, "formula": "x0!=x1"}}"#);
        let out = run(&["compute-c", "--base", &horn]).unwrap();
        assert_eq!(out, r#"{"c":null}"#);
    }

    #[test]
    fn help_renders_without_error() {
        let out = run(&["--help"]).unwrap();
        assert!(out.contains("witness-search"));
    }
}
