//! `rgb`: evaluate, compare, rewrite, translate and verify diagrams.
//!
//! Exit codes: 0 success, 1 not equal or no path found, 2 usage,
//! 3 parse or validation error, 4 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use trichromatic::dsl::{parse, print};
use trichromatic::functors::{quotient, translate_s, translate_t};
use trichromatic::interp::{diagrams_equal, eval_exact, eval_float, equal_up_to_scalar, DEFAULT_TOL};
use trichromatic::rules::{
    bounded_search, load_library, parse_script, run_script, DerivationScript, SearchLimits, SearchOutcome,
};
use trichromatic::verify::{run_suite, Suite, VerifyOptions};
use trichromatic::{Diagram, Flavour, PhaseGroup};

const NOT_EQUAL: u8 = 1;
const USAGE: u8 = 2;
const INVALID: u8 = 3;
const FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "rgb", version, about = "Graphical calculi of qubits: RG, RG+ and RGB diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the matrix of a diagram.
    Eval {
        file: PathBuf,
        /// Evaluate in floating point.
        #[arg(long)]
        float: bool,
    },
    /// Exit 0 iff two diagrams are equal up to a nonzero scalar.
    Equal {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long)]
        float: bool,
        /// Tolerance for float comparison.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Replay a derivation script and print the final diagram.
    Rewrite {
        file: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Check that every step preserves the interpretation.
        #[arg(long)]
        verify: bool,
        /// Diagram the script must end at (up to isomorphism).
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Apply T (rg/rgplus to rgb) or S (rgb to rgplus).
    Translate {
        file: PathBuf,
        #[arg(long)]
        to: Target,
    },
    /// Run verification suites and print a pass/fail table.
    Verify {
        /// Suite to run; repeat for several, omit for all.
        #[arg(long, value_enum)]
        suite: Vec<SuiteArg>,
        #[arg(long, value_enum)]
        flavour: Option<FlavourArg>,
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Breadth-first search for a rewrite path.
    Search {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Calculus to search in; diagrams are translated into it.
        #[arg(long, value_enum)]
        flavour: Option<FlavourArg>,
        /// Nodes allowed beyond the larger end diagram.
        #[arg(long, default_value_t = 2)]
        extra_nodes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Rgb,
    Rgplus,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavourArg {
    Rg,
    Rgplus,
    Rgb,
}

impl From<FlavourArg> for Flavour {
    fn from(f: FlavourArg) -> Flavour {
        match f {
            FlavourArg::Rg => Flavour::Rg,
            FlavourArg::Rgplus => Flavour::RgPlus,
            FlavourArg::Rgb => Flavour::Rgb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Axioms,
    Derived,
    Functors,
    Supplementarity,
    Euler,
    Group,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Axioms => Suite::Axioms,
            SuiteArg::Derived => Suite::Derived,
            SuiteArg::Functors => Suite::Functors,
            SuiteArg::Supplementarity => Suite::Supplementarity,
            SuiteArg::Euler => Suite::Euler,
            SuiteArg::Group => Suite::Group,
        }
    }
}

/// An error message with its exit code.
struct Fail(u8, String);

type Outcome = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(INVALID, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Diagram, Fail> {
    parse(&read(path)?).map_err(|e| Fail(INVALID, format!("{}: {e}", path.display())))
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail(INVALID, e.to_string())
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Eval { file, float } => {
            let d = load(&file)?;
            if float || d.phase_group() == PhaseGroup::U1 {
                print!("{}", eval_float(&d).map_err(invalid)?);
            } else {
                print!("{}", eval_exact(&d).map_err(invalid)?);
            }
            Ok(0)
        }
        Command::Equal { file1, file2, float, tol } => {
            let (a, b) = (load(&file1)?, load(&file2)?);
            let eq = if float {
                let (m, n) = (eval_float(&a).map_err(invalid)?, eval_float(&b).map_err(invalid)?);
                equal_up_to_scalar(&m, &n, tol)
            } else {
                diagrams_equal(&a, &b, tol)
            }
            .map_err(invalid)?;
            println!("{}", if eq { "equal" } else { "not equal" });
            Ok(if eq { 0 } else { NOT_EQUAL })
        }
        Command::Rewrite {
            file,
            script,
            verify,
            target,
        } => {
            let d = load(&file)?;
            let steps = parse_script(&read(&script)?).map_err(invalid)?;
            let lib = load_library(d.flavour()).map_err(|e| Fail(FAILED, e.to_string()))?;
            let mut s = DerivationScript::new(d, steps);
            if let Some(t) = target {
                s = s.with_target(load(&t)?);
            }
            let run = run_script(lib, &s, verify).map_err(|e| Fail(FAILED, e.to_string()))?;
            for (k, l) in run.log.iter().enumerate() {
                let v = if l.verified == Some(true) { ", verified" } else { "" };
                eprintln!("{:>3}. {}  ({} matches, {} nodes{v})", k + 1, l.step, l.matches, l.nodes);
            }
            print!("{}", print(&run.result));
            Ok(0)
        }
        Command::Translate { file, to } => {
            let d = load(&file)?;
            let out = match to {
                Target::Rgb => translate_t(&d),
                Target::Rgplus => translate_s(&d),
            }
            .map_err(invalid)?;
            print!("{}", print(&out));
            Ok(0)
        }
        Command::Verify {
            suite,
            flavour,
            max_arity,
        } => {
            let mut opts = VerifyOptions {
                flavour: flavour.map(Flavour::from),
                ..VerifyOptions::default()
            };
            if let Some(n) = max_arity {
                opts.max_arity = n;
            }
            let suites: Vec<Suite> = if suite.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suite.into_iter().map(Suite::from).collect()
            };
            let mut failed = 0;
            for s in suites {
                let rows = run_suite(s, &opts);
                let bad = rows.iter().filter(|r| !r.ok).count();
                println!("== {s}: {} checks, {bad} failed", rows.len());
                for r in &rows {
                    println!("{r}");
                }
                failed += bad;
            }
            Ok(if failed == 0 { 0 } else { FAILED })
        }
        Command::Search {
            file1,
            file2,
            depth,
            flavour,
            extra_nodes,
        } => {
            let (a, b) = (load(&file1)?, load(&file2)?);
            let fl = flavour.map(Flavour::from).unwrap_or(a.flavour());
            let (a, b) = (convert(a, fl)?, convert(b, fl)?);
            let lib = load_library(fl).map_err(|e| Fail(FAILED, e.to_string()))?;
            let limits = SearchLimits {
                extra_nodes,
                ..SearchLimits::depth(depth)
            };
            match bounded_search(lib, &a, &b, limits) {
                SearchOutcome::Found(steps) => {
                    println!("# found in {} steps", steps.len());
                    for s in steps {
                        println!("{s}");
                    }
                    Ok(0)
                }
                SearchOutcome::NotFound { explored, truncated } => {
                    let cap = if truncated { ", stopped at the state cap" } else { "" };
                    println!("not found within depth {depth} ({explored} states{cap})");
                    Ok(NOT_EQUAL)
                }
            }
        }
    }
}

/// Moves a diagram into `fl` along the quotient or T or S.
fn convert(d: Diagram, fl: Flavour) -> Result<Diagram, Fail> {
    let out = match (d.flavour(), fl) {
        (a, b) if a == b => return Ok(d),
        (Flavour::Rg, Flavour::RgPlus) => quotient(&d),
        (Flavour::Rg | Flavour::RgPlus, Flavour::Rgb) => translate_t(&d),
        (Flavour::Rgb, Flavour::RgPlus) => translate_s(&d),
        (from, to) => return Err(Fail(USAGE, format!("cannot move a {from} diagram into {to}"))),
    };
    out.map_err(invalid)
}
