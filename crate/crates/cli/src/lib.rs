//! The `cml` command: argument parsing, report assembly and exit codes.
//!
//! Reports are JSON objects with sorted keys. Every report carries the tool
//! version and the seed used for randomized checks, so a run is reproducible
//! from its own output.

mod commands;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cml_core::mincond::{StructuredCML, StructuredDescriptor};
use cml_core::{catalog, CayleyLoop, Error};
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit code for a mathematical property found violated.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit code for usage and input errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cml", version, about = "Finite and structured commutative Moufang loops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = cml_core::DEFAULT_SEED)]
    pub seed: u64,

    /// Size limit for materialized groups, subloop lists and truncations.
    #[arg(long, global = true)]
    pub cap: Option<usize>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Scan the four-variable associator identity exhaustively.
    #[arg(long, global = true)]
    pub exhaustive: bool,
}

/// Exactly one input source.
#[derive(Args, Debug, Clone, Default)]
#[group(multiple = false)]
pub struct Input {
    /// Catalog loop, e.g. `cml81` or `cyclic:9*cml81`.
    #[arg(long)]
    pub builtin: Option<String>,

    /// Cayley table file.
    #[arg(long)]
    pub file: Option<PathBuf>,

    /// Structured descriptor: a JSON file or an inline JSON object.
    #[arg(long)]
    pub structured: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that the input is a commutative Moufang loop.
    Validate(Input),
    /// Order, exponent, center, class and primary components.
    Info(Input),
    /// Run the associator identity suite.
    CheckIdentities(Input),
    /// The center Z(Q).
    Center(Input),
    /// Upper central series.
    Series(Input),
    /// Primary decomposition into p-components.
    Decompose(Input),
    /// Enumerate subloops and normal subloops.
    Subloops(Input),
    /// Normal closure of a set of elements.
    NormalClosure {
        #[command(flatten)]
        input: Input,
        /// Comma-separated element indices.
        #[arg(long, value_delimiter = ',')]
        gens: Vec<usize>,
    },
    /// Cogenerating subloop and its check.
    Cogenerators {
        #[command(flatten)]
        input: Input,
        /// Random normal subloops sampled for structured inputs.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Multiplication group report and center formula.
    Multgroup(Input),
    /// Structure report for D × C.
    Structured(Input),
    /// Finite truncation of D × C as a Cayley table.
    Truncate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
    /// Complement of the divisible part containing a given finite subloop.
    Complement {
        #[command(flatten)]
        input: Input,
        /// Subloop descriptor (JSON file or inline), default trivial.
        #[arg(long)]
        subloop: Option<String>,
    },
    /// Random strictly descending chains of subloops.
    ChainTest {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100)]
        chains: usize,
    },
    /// List built-in loops.
    Catalog,
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Info(_) => "info",
            Command::CheckIdentities(_) => "check-identities",
            Command::Center(_) => "center",
            Command::Series(_) => "series",
            Command::Decompose(_) => "decompose",
            Command::Subloops(_) => "subloops",
            Command::NormalClosure { .. } => "normal-closure",
            Command::Cogenerators { .. } => "cogenerators",
            Command::Multgroup(_) => "multgroup",
            Command::Structured(_) => "structured",
            Command::Truncate { .. } => "truncate",
            Command::Complement { .. } => "complement",
            Command::ChainTest { .. } => "chain-test",
            Command::Catalog => "catalog",
        }
    }
}

/// A loaded input.
pub enum Loaded {
    Finite(CayleyLoop),
    Structured(StructuredCML),
}

/// What went wrong before a report could be produced.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// The computation itself established a violated property.
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::SeriesStalled { .. }
            | Error::NotNormal(_)
            | Error::DecompositionFailure(_)
            | Error::NoComplementFound
            | Error::NotCentralFactor(_) => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Reads inline JSON or a file holding it; returns the text and the
/// directory relative paths inside it resolve against.
pub(crate) fn json_argument(arg: &str) -> Result<(String, PathBuf), Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok((arg.to_string(), PathBuf::from(".")));
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    Ok((text, base))
}

impl Input {
    pub fn describe(&self) -> Value {
        match (&self.builtin, &self.file, &self.structured) {
            (Some(b), _, _) => json!({ "builtin": b }),
            (_, Some(f), _) => json!({ "file": f.display().to_string() }),
            (_, _, Some(s)) => json!({ "structured": s }),
            _ => Value::Null,
        }
    }

    pub fn load(&self) -> Result<Loaded, Failure> {
        match (&self.builtin, &self.file, &self.structured) {
            (Some(b), _, _) => Ok(Loaded::Finite(catalog::builtin(b)?)),
            (_, Some(f), _) => {
                let text = std::fs::read_to_string(f)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", f.display())))?;
                Ok(Loaded::Finite(CayleyLoop::parse(&text)?))
            }
            (_, _, Some(s)) => {
                let (text, base) = json_argument(s)?;
                Ok(Loaded::Structured(StructuredDescriptor::from_json(&text)?.load(&base)?))
            }
            _ => Err(Failure::Usage(
                "an input is required: --builtin NAME, --file PATH or --structured DESCRIPTOR".into(),
            )),
        }
    }

    pub fn finite(&self) -> Result<CayleyLoop, Failure> {
        match self.load()? {
            Loaded::Finite(q) => Ok(q),
            Loaded::Structured(_) => Err(Failure::Usage("this command needs a finite loop (--builtin or --file)".into())),
        }
    }

    pub fn structured(&self) -> Result<StructuredCML, Failure> {
        match self.load()? {
            Loaded::Structured(q) => Ok(q),
            Loaded::Finite(_) => Err(Failure::Usage("this command needs --structured DESCRIPTOR".into())),
        }
    }
}

/// Result of a command: the report body and whether a property failed.
pub struct Outcome {
    pub result: Value,
    pub violated: bool,
    /// Plain-text rendering that replaces the generic one, if any.
    pub text: Option<String>,
}

impl Outcome {
    pub(crate) fn new(result: Value, violated: bool) -> Outcome {
        Outcome { result, violated, text: None }
    }
}

/// Runs a parsed command and returns the process exit code; the report goes
/// to `out`, diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    if let Some(n) = cli.threads {
        // a second initialization (e.g. in tests) keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = commands::dispatch(cli);
    let (outcome, code) = match outcome {
        Ok(o) => {
            let code = if o.violated { EXIT_VIOLATION } else { 0 };
            (o, code)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Violation(msg)) => {
            let _ = writeln!(err, "property violated: {msg}");
            (Outcome::new(json!({ "error": msg }), true), EXIT_VIOLATION)
        }
    };
    let report = json!({
        "command": cli.command.verb(),
        "version": VERSION,
        "seed": cli.seed,
        "input": input_of(&cli.command),
        "ok": code == 0,
        "result": outcome.result,
    });
    let rendered = if cli.json {
        serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
    } else if let Some(text) = outcome.text {
        text
    } else {
        render_text(&report)
    };
    let _ = out.write_all(rendered.as_bytes());
    code
}

fn input_of(command: &Command) -> Value {
    match command {
        Command::Validate(i)
        | Command::Info(i)
        | Command::CheckIdentities(i)
        | Command::Center(i)
        | Command::Series(i)
        | Command::Decompose(i)
        | Command::Subloops(i)
        | Command::Multgroup(i)
        | Command::Structured(i)
        | Command::NormalClosure { input: i, .. }
        | Command::Cogenerators { input: i, .. }
        | Command::Truncate { input: i, .. }
        | Command::Complement { input: i, .. }
        | Command::ChainTest { input: i, .. } => i.describe(),
        Command::Catalog => Value::Null,
    }
}

/// `key: value` lines, nested values as compact JSON.
fn render_text(report: &Value) -> String {
    let mut out = String::new();
    let header = |k: &str| report.get(k).map(|v| v.to_string()).unwrap_or_default();
    out.push_str(&format!(
        "cml {} {} (seed {})\n",
        report["command"].as_str().unwrap_or(""),
        header("input"),
        header("seed")
    ));
    match &report["result"] {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                    other => out.push_str(&format!("{k}: {other}\n")),
                }
            }
        }
        other => out.push_str(&format!("{other}\n")),
    }
    out
}
