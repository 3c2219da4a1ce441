//! Command-line front end. Every command reads one system file (a machine
//! or a quantizer spec, detected by shape) and prints pretty JSON.
//!
//! Exit codes: 0 on completion, 2 on input errors, 3 on internal
//! inconsistencies. Verdicts never change the exit code.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::automata::{enumerate_paths, Fsm, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::lcomplete::{approximate_system, is_l_complete};
use crate::quantizer::{compile, CompiledSystem, Mode, QuantizerSpec};
use crate::relations::{build_r0, build_rl, build_rx, reach_past_at, recent_past, Relation};
use crate::simcheck::{check_relation, similarity_report, SimFlavor};
use crate::windows::extract_windows;
use crate::word::Word;

pub const BUDGET_ENV: &str = "LCABS_NODE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "lcabs", version, about = "l-complete abstractions and simulation checks")]
pub struct Cli {
    /// Window overlap length l.
    #[arg(long = "l", global = true, default_value_t = 1)]
    pub l: usize,
    /// Override the time-scale mode of a quantizer spec.
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Machine or quantizer JSON file; `-` reads standard input.
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Initial and recurring windows of length l+1.
    Windows(Input),
    /// Strongest l-complete approximation.
    Approximate {
        #[command(flatten)]
        input: Input,
        /// Also write the machine as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// All similarity claims between the system and its approximation.
    Report(Input),
    /// Decide l-completeness of the system.
    CheckLcomplete(Input),
    /// States (and signal values) compatible with a recent past.
    Reach {
        #[command(flatten)]
        input: Input,
        /// Space separated symbols; `^` for the empty past.
        #[arg(long, allow_hyphen_values = true)]
        past: Word,
        /// Restrict to a single external step.
        #[arg(long)]
        at: Option<usize>,
    },
    /// The canonical relations R0, Rl and RX.
    Relations(Input),
    /// Check a relation file against a simulation flavor.
    CheckSim {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        relation: PathBuf,
        /// async, e-sync, sync or <k>-initial.
        #[arg(long)]
        flavor: SimFlavor,
        /// Right-hand machine: the approximation, the system itself, or a machine file.
        #[arg(long, default_value = "approx")]
        target: String,
        /// Swap the machines and invert the relation.
        #[arg(long)]
        inverse: bool,
    },
    /// Label sequences of all paths up to a depth.
    Paths {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        depth: usize,
    },
}

/// A loaded system, with its quantizer compilation when there is one.
#[derive(Debug, Clone)]
pub struct System {
    pub fsm: Fsm,
    pub compiled: Option<CompiledSystem>,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
    }
}

/// Parses machine or quantizer JSON. Quantizer specs are recognised by a
/// `domain` field and compiled; machines are trimmed.
pub fn load_system(text: &str, mode: Option<Mode>) -> Result<System> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("domain").is_some() {
        let mut spec: QuantizerSpec = serde_json::from_value(value)?;
        if let Some(m) = mode {
            spec.mode = m;
        }
        let cs = compile(&spec)?;
        Ok(System { fsm: cs.fsm.clone(), compiled: Some(cs) })
    } else {
        let fsm: Fsm = serde_json::from_value(value)?;
        Ok(System { fsm: fsm.trim()?, compiled: None })
    }
}

pub fn node_budget() -> Result<usize> {
    match std::env::var(BUDGET_ENV) {
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Invalid(format!("{BUDGET_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn concretized(rel: Relation, sys: &System) -> Relation {
    match &sys.compiled {
        Some(cs) => rel.with_concretization(cs),
        None => rel,
    }
}

/// Runs one command and returns its JSON result.
pub fn execute(cli: &Cli) -> Result<Value> {
    let l = cli.l;
    let load = |input: &Input| load_system(&read_input(&input.input)?, cli.mode);
    match &cli.command {
        Command::Windows(input) => to_json(&extract_windows(&load(input)?.fsm, l)),
        Command::Approximate { input, dot } => {
            let approx = approximate_system(&load(input)?.fsm, l)?;
            if let Some(path) = dot {
                std::fs::write(path, approx.fsm().to_dot())?;
            }
            to_json(&approx)
        }
        Command::Report(input) => {
            let sys = load(input)?;
            let report = similarity_report(&sys.fsm, l)?;
            let mut v = to_json(&report)?;
            if let Some(cs) = &sys.compiled {
                v["mode"] = to_json(&cs.mode)?;
                v["concretization"] = to_json(&cs.concretize)?;
            }
            Ok(v)
        }
        Command::CheckLcomplete(input) => to_json(&is_l_complete(&load(input)?.fsm, l)?),
        Command::Reach { input, past, at } => {
            let sys = load(input)?;
            let states = match at {
                Some(k) => reach_past_at(&sys.fsm, *k, past)?,
                None => recent_past(&sys.fsm, past)?,
            };
            let mut v = json!({ "past": past, "states": states });
            if let Some(k) = at {
                v["at"] = json!(k);
            }
            if let Some(cs) = &sys.compiled {
                let ix = sys.fsm.indices(states.iter().map(String::as_str))?;
                v["values"] = json!(cs.concretize_set(&ix).to_string());
            }
            Ok(v)
        }
        Command::Relations(input) => {
            let sys = load(input)?;
            let approx = approximate_system(&sys.fsm, l)?;
            Ok(json!({
                "l": l,
                "r0": concretized(build_r0(&sys.fsm, &approx)?, &sys),
                "rl": concretized(build_rl(&sys.fsm, &approx)?, &sys),
                "rx": concretized(build_rx(&sys.fsm, l), &sys),
            }))
        }
        Command::CheckSim { input, relation, flavor, target, inverse } => {
            let sys = load(input)?;
            let rel: Relation = serde_json::from_str(&read_input(relation)?)?;
            let right = match target.as_str() {
                "approx" => approximate_system(&sys.fsm, l)?.into_fsm(),
                "self" => sys.fsm.clone(),
                path => load_system(&read_input(Path::new(path))?, cli.mode)?.fsm,
            };
            let verdict = if *inverse {
                check_relation(&rel.inverse(), &right, &sys.fsm, *flavor)?
            } else {
                check_relation(&rel, &sys.fsm, &right, *flavor)?
            };
            to_json(&verdict)
        }
        Command::Paths { input, depth } => {
            let words = enumerate_paths(&load(input)?.fsm, *depth, node_budget()?)?;
            Ok(json!(words.iter().map(Word::to_string).collect::<Vec<_>>()))
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InternalInconsistency(_) => 3,
        _ => 2,
    }
}

/// Parses `args`, runs the command and writes its result. Returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = execute(&cli).and_then(|v| {
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
