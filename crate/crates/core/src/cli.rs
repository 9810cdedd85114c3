//! Command-line front end. The binary only forwards `std::env::args` to
//! [`run`] and prints the result, so everything here is testable in-process.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fair::fair_check_with;
use crate::formula::{classify_fragment, parse_formula, Formula, FragmentClass};
use crate::lts::{self, Lts};
use crate::prob::{format_decimal, format_fraction, satisfaction_probability};
use crate::runs::{eval_bounded, LassoRun};
use crate::universal::{reverify, universal_check_with, weak_check, CheckOptions, Verdict};

#[derive(Debug, Parser)]
#[command(name = "promptcheck", version, about = "Prompt-LTL model checker for finite transition systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Universal,
    Fair,
    Weak,
    Prob,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a formula on a transition system.
    Check {
        #[arg(long, value_enum, default_value = "universal")]
        mode: CheckMode,
        #[arg(long)]
        lts: PathBuf,
        #[arg(long)]
        formula: String,
        /// Expected fragment; an error is raised when the formula is in another one.
        #[arg(long)]
        fragment: Option<String>,
        /// Decimal digits printed next to exact probabilities.
        #[arg(long)]
        precision: Option<usize>,
        /// Evaluate independent sub-problems on a thread pool.
        #[arg(long)]
        parallel: bool,
    },
    /// Evaluate a formula on a lasso run at a fixed bound.
    Eval {
        #[arg(long)]
        lts: PathBuf,
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        bound: u64,
    },
    /// Print a counterexample lasso for the given bound.
    Witness {
        #[arg(long)]
        lts: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        bound: u64,
    },
    /// Generate a random transition system.
    Random {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Print the SCC decomposition of a transition system.
    Info {
        #[arg(long)]
        lts: PathBuf,
    },
}

/// Exit status and standard output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub fn error_document(e: &Error) -> Value {
    json!({ "error": e.code(), "detail": e.to_string() })
}

fn render(doc: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(doc).expect("values always serialize")
    } else {
        doc.to_string()
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                };
            }
            let err = Error::Usage(e.kind().to_string());
            return Outcome {
                code: EXIT_ERROR,
                stdout: render(&json!({ "error": err.code(), "detail": e.to_string() }), false),
            };
        }
    };
    let pretty = cli.pretty;
    match execute(cli.command) {
        Ok((code, doc)) => Outcome {
            code,
            stdout: render(&doc, pretty),
        },
        Err(e) => Outcome {
            code: EXIT_ERROR,
            stdout: render(&error_document(&e), pretty),
        },
    }
}

fn read_lts(path: &Path) -> Result<Lts> {
    lts::parse_lts(&std::fs::read(path)?)
}

fn check_fragment(f: &Formula, expected: Option<&str>) -> Result<()> {
    let Some(name) = expected else { return Ok(()) };
    let want = FragmentClass::from_name(name).ok_or_else(|| Error::Usage(format!("unknown fragment `{name}`")))?;
    let found = classify_fragment(f);
    let within = found == want || (want == FragmentClass::PromptMuller && found == FragmentClass::PositivePromptMuller);
    if !within {
        return Err(Error::WrongFragment {
            expected: want.name().into(),
            found: found.name().into(),
        });
    }
    Ok(())
}

fn verdict_outcome(l: &Lts, v: &Verdict) -> (i32, Value) {
    (if v.holds { EXIT_OK } else { EXIT_VIOLATED }, v.to_json(l))
}

fn execute(cmd: Command) -> Result<(i32, Value)> {
    match cmd {
        Command::Check {
            mode,
            lts,
            formula,
            fragment,
            precision,
            parallel,
        } => {
            let l = read_lts(&lts)?;
            let f = parse_formula(&formula)?;
            check_fragment(&f, fragment.as_deref())?;
            let opts = CheckOptions { parallel };
            match mode {
                CheckMode::Universal => Ok(verdict_outcome(&l, &universal_check_with(&l, &f, opts)?)),
                CheckMode::Fair => Ok(verdict_outcome(&l, &fair_check_with(&l, &f, opts)?)),
                CheckMode::Weak => Ok(verdict_outcome(&l, &weak_check(&l, &f)?)),
                CheckMode::Prob => {
                    let p = satisfaction_probability(&l, &f)?;
                    let mut doc = json!({
                        "mode": "prob",
                        "fragment": classify_fragment(&f).name(),
                        "probability": format_fraction(&p),
                    });
                    if let Some(digits) = precision {
                        doc["decimal"] = json!(format_decimal(&p, digits));
                    }
                    Ok((EXIT_OK, doc))
                }
            }
        }
        Command::Eval { lts, run, formula, bound } => {
            let l = read_lts(&lts)?;
            let r = LassoRun::parse(&l, &std::fs::read(run)?)?;
            let f = parse_formula(&formula)?;
            Ok((EXIT_OK, json!(eval_bounded(&l, &r, bound, &f)?)))
        }
        Command::Witness { lts, formula, bound } => {
            if bound == 0 {
                return Err(Error::Usage("--bound must be at least 1".into()));
            }
            let l = read_lts(&lts)?;
            let f = parse_formula(&formula)?;
            let v = universal_check_with(&l, &f, CheckOptions::default())?;
            match &v.witness {
                None => Ok(verdict_outcome(&l, &v)),
                Some(w) => {
                    let cx = reverify(&l, &f, w, bound)?;
                    let doc = serde_json::to_value(cx.run.to_doc(&l))?;
                    Ok((EXIT_VIOLATED, doc))
                }
            }
        }
        Command::Random {
            states,
            density,
            atoms,
            seed,
        } => {
            let l = random_instance(states, density, atoms, seed)?;
            Ok((EXIT_OK, serde_json::to_value(l.to_doc())?))
        }
        Command::Info { lts } => {
            let l = read_lts(&lts)?;
            Ok((EXIT_OK, info_document(&l)))
        }
    }
}

pub fn info_document(l: &Lts) -> Value {
    let dec = lts::sccs(l);
    let comps: Vec<Value> = dec
        .components
        .iter()
        .map(|c| {
            json!({
                "states": l.names_of(&c.states),
                "bottom": c.bottom,
                "reachable": c.reachable,
                "trivial": c.trivial,
            })
        })
        .collect();
    let bottoms: Vec<Vec<String>> = dec.bottoms().map(|c| l.names_of(&c.states)).collect();
    json!({
        "states": l.len(),
        "init": l.name(l.init()),
        "sccs": comps,
        "bsccs": bottoms,
        "strongly_connected": lts::reachable_part_strongly_connected(l),
    })
}

/// Random total transition system over states `s0..` and atoms `p0..`.
///
/// Every ordered pair of states is a transition with probability `density`;
/// states left without successors get a self-loop. Each atom labels each
/// state with probability 1/2. The same seed always yields the same system.
pub fn random_instance(states: usize, density: f64, atoms: usize, seed: u64) -> Result<Lts> {
    if states == 0 {
        return Err(Error::Usage("--states must be at least 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Usage("--density must lie in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = |i: usize| format!("s{i}");
    let mut edges = Vec::new();
    for i in 0..states {
        let before = edges.len();
        for j in 0..states {
            if rng.gen_bool(density) {
                edges.push((name(i), name(j)));
            }
        }
        if edges.len() == before {
            edges.push((name(i), name(i)));
        }
    }
    let labelled: Vec<(String, Vec<String>)> = (0..states)
        .map(|i| {
            let labels = (0..atoms).filter(|_| rng.gen_bool(0.5)).map(|a| format!("p{a}")).collect();
            (name(i), labels)
        })
        .collect();
    Lts::new(&labelled, &name(0), &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_state_instance_loops() {
        let l = random_instance(1, 0.01, 0, 3).unwrap();
        assert_eq!(l.len(), 1);
        assert!(l.has_edge(0, 0));
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a = random_instance(6, 0.3, 2, 42).unwrap();
        let b = random_instance(6, 0.3, 2, 42).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = random_instance(6, 0.3, 2, 43).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(random_instance(0, 0.5, 1, 0).is_err());
        assert!(random_instance(3, 0.0, 1, 0).is_err());
        assert!(random_instance(3, 1.5, 1, 0).is_err());
    }

    #[test]
    fn usage_errors_are_documents() {
        let out = run(["promptcheck", "check", "--mode", "sideways"]);
        assert_eq!(out.code, EXIT_ERROR);
        let doc: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(doc["error"], "usage");
    }
}
