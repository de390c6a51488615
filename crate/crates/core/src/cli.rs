//! Command-line front end.
//!
//! Exit codes: 0 proved / fixpoint reached / success, 1 failed, 2 diverged or
//! step budget exhausted, 3 input error, 4 the attention engine and the
//! symbolic oracle disagree.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::compiler::compile;
use crate::engine::{bottomup_fixpoint, topdown_derive_with};
use crate::error::Error;
use crate::generate::generate_program;
use crate::json::{CompiledJson, TraceJson};
use crate::linalg::Matrix;
use crate::oracle::{least_model_trace, symbolic_topdown_with};
use crate::program::{
    parse_program, parse_query, parse_query_atoms, query_symbols, validate_and_complete, Atom,
    SDProgram,
};
use crate::trace::{DerivationTrace, DeriveOptions, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Attention,
    Symbolic,
    Both,
}

#[derive(Debug, Parser)]
#[command(
    name = "attnlp",
    version,
    about = "Run propositional SD-programs as hardmax self-attention"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Maximum number of derivation steps
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[arg(long, global = true, value_enum, default_value_t = Engine::Both)]
    pub engine: Engine,

    /// Print every derivation step
    #[arg(long, global = true)]
    pub trace: bool,

    /// Keep deriving after `false` appears, until a state repeats
    #[arg(long, global = true)]
    pub full_trace: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the head, body and program matrices
    Compile { file: PathBuf },
    /// Top-down derivation of a query
    Prove {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Least model by bottom-up derivation
    Model { file: PathBuf },
    /// Emit a random SD-program
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        symbols: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(&cfg, out, err) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Disagreement(msg)) => {
            let _ = writeln!(err, "internal error: engines disagree: {msg}");
            EXIT_DISAGREEMENT
        }
    }
}

enum Failure {
    Input(String),
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_source(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn execute(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let max_steps = cfg.max_steps as usize;
    match &cfg.command {
        Command::Compile { file } => cmd_compile(&read_source(file)?, cfg.format, out),
        Command::Prove { file, query } => {
            let opts = DeriveOptions {
                max_steps,
                stop_on_failure: !cfg.full_trace,
            };
            cmd_prove(&read_source(file)?, query, cfg, opts, out, err)
        }
        Command::Model { file } => cmd_model(&read_source(file)?, cfg, max_steps, out),
        Command::Gen { symbols, seed } => {
            let seed = seed.unwrap_or_else(rand::random);
            out.write_all(generate_program(*symbols as usize, seed).as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

fn write_matrix(
    out: &mut dyn Write,
    name: &str,
    labels: &[String],
    m: &Matrix,
) -> std::io::Result<()> {
    let cells: Vec<Vec<String>> = m
        .row_iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();
    let width = cells
        .iter()
        .flatten()
        .chain(labels)
        .map(|c| c.chars().count())
        .max()
        .unwrap_or(1);
    writeln!(out, "{name} ({}x{}):", m.rows(), m.cols())?;
    let header: Vec<String> = labels.iter().map(|l| format!("{l:>width$}")).collect();
    writeln!(out, "  {:>width$}  {}", "", header.join(" "))?;
    for (label, row) in labels.iter().zip(&cells) {
        let row: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(out, "  {label:>width$}  {}", row.join(" "))?;
    }
    Ok(())
}

fn cmd_compile(source: &str, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let program = validate_and_complete(&parse_program(source)?, std::iter::empty())?;
    let cp = compile(&program);
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &CompiledJson::from(&cp))?;
            writeln!(out)?;
        }
        Format::Text => {
            let mut labels: Vec<String> = cp
                .table()
                .symbols()
                .iter()
                .map(ToString::to_string)
                .collect();
            writeln!(out, "symbols: {}", labels.join(" "))?;
            write_matrix(out, "M", &labels, cp.program_matrix())?;
            labels.push("true".into());
            labels.push("false".into());
            write_matrix(out, "H", &labels, cp.head_matrix())?;
            write_matrix(out, "B", &labels, cp.body_matrix())?;
        }
    }
    Ok(EXIT_OK)
}

fn load_with_query(
    source: &str,
    query: &str,
) -> Result<(SDProgram, crate::program::Query), Failure> {
    let draft = parse_program(source)?;
    let raw = parse_query_atoms(query)?;
    let program = validate_and_complete(&draft, query_symbols(&raw))?;
    let query = parse_query(query, program.table())?;
    Ok((program, query))
}

/// First point where two top-down traces differ, if any.
pub fn compare_topdown(attention: &DerivationTrace, symbolic: &DerivationTrace) -> Option<String> {
    let a: Vec<BTreeSet<&Atom>> = attention.states().map(|s| s.iter().collect()).collect();
    let s: Vec<BTreeSet<&Atom>> = symbolic.states().map(|s| s.iter().collect()).collect();
    for (k, (x, y)) in a.iter().zip(&s).enumerate() {
        if x != y {
            return Some(format!(
                "step {k}: attention gives {}, symbolic gives {}",
                render_atoms(x.iter().copied()),
                render_atoms(y.iter().copied())
            ));
        }
    }
    if a.len() != s.len() {
        return Some(format!(
            "attention ran {} steps, symbolic ran {}",
            a.len() - 1,
            s.len() - 1
        ));
    }
    if attention.status != symbolic.status {
        return Some(format!(
            "attention status {:?}, symbolic status {:?}",
            attention.status, symbolic.status
        ));
    }
    None
}

fn render_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    let parts: Vec<String> = atoms.into_iter().map(ToString::to_string).collect();
    if parts.is_empty() {
        "{}".into()
    } else {
        parts.join(" & ")
    }
}

fn describe(status: Status, steps: usize) -> String {
    let plural = if steps == 1 { "" } else { "s" };
    match status {
        Status::Proved => format!("proved in {steps} step{plural}"),
        Status::Failed => format!("failed after {steps} step{plural}"),
        Status::Diverged {
            cycle_start: Some(k),
        } => format!("diverged after {steps} step{plural} (cycle back to step {k})"),
        Status::Diverged { cycle_start: None } => {
            format!("diverged (step limit reached after {steps} step{plural})")
        }
        Status::FixpointReached => format!("fixpoint reached after {steps} step{plural}"),
    }
}

fn write_trace_text(out: &mut dyn Write, trace: &DerivationTrace) -> std::io::Result<()> {
    writeln!(out, "  0: {}", render_atoms(&trace.initial.decoded))?;
    for (k, step) in trace.steps.iter().enumerate() {
        match &step.pre {
            Some(pre) => {
                let pre: Vec<String> = pre.iter().map(ToString::to_string).collect();
                writeln!(
                    out,
                    "  {}: {}    a = ({})",
                    k + 1,
                    render_atoms(&step.decoded),
                    pre.join(", ")
                )?;
            }
            None => writeln!(out, "  {}: {}", k + 1, render_atoms(&step.decoded))?,
        }
    }
    Ok(())
}

fn status_exit(status: Status) -> i32 {
    match status {
        Status::Proved | Status::FixpointReached => EXIT_OK,
        Status::Failed => EXIT_FAILED,
        Status::Diverged { .. } => EXIT_DIVERGED,
    }
}

fn cmd_prove(
    source: &str,
    query: &str,
    cfg: &RunConfig,
    opts: DeriveOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let (program, query) = load_with_query(source, query)?;
    let attention = match cfg.engine {
        Engine::Symbolic => None,
        _ => Some(topdown_derive_with(&query, &compile(&program), opts)?),
    };
    let symbolic = match cfg.engine {
        Engine::Attention => None,
        _ => Some(symbolic_topdown_with(&query, &program, opts)?),
    };
    if let (Some(a), Some(s)) = (&attention, &symbolic) {
        if let Some(diff) = compare_topdown(a, s) {
            return Err(Failure::Disagreement(diff));
        }
    }
    let trace = attention.or(symbolic).expect("one engine always runs");

    match cfg.format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &TraceJson::from(&trace))?;
            writeln!(out)?;
        }
        Format::Text => {
            writeln!(out, "{}", describe(trace.status, trace.step_count))?;
            if cfg.trace || cfg.full_trace {
                write_trace_text(out, &trace)?;
            }
        }
    }
    if cfg.engine == Engine::Both {
        let _ = writeln!(err, "attention and symbolic engines agree");
    }
    Ok(status_exit(trace.status))
}

fn model_names(trace: &DerivationTrace) -> Vec<String> {
    let mut names: Vec<String> = trace
        .final_state()
        .iter()
        .map(ToString::to_string)
        .collect();
    names.sort();
    names
}

fn cmd_model(
    source: &str,
    cfg: &RunConfig,
    max_steps: usize,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let program = validate_and_complete(&parse_program(source)?, std::iter::empty())?;
    let trace = match cfg.engine {
        Engine::Symbolic => least_model_trace(&program, max_steps),
        Engine::Attention => bottomup_fixpoint(&compile(&program), max_steps)?,
        Engine::Both => {
            let engine = bottomup_fixpoint(&compile(&program), max_steps)?;
            if engine.status == Status::FixpointReached {
                check_model(&engine, &program, max_steps)?;
            }
            engine
        }
    };

    let model = model_names(&trace);
    match cfg.format {
        Format::Json => {
            let mut j = TraceJson::from(&trace);
            if trace.status == Status::FixpointReached {
                j.model = Some(model);
            }
            serde_json::to_writer(&mut *out, &j)?;
            writeln!(out)?;
        }
        Format::Text => {
            if trace.status == Status::FixpointReached {
                writeln!(out, "{}", model.join(" "))?;
            } else {
                writeln!(out, "{}", describe(trace.status, trace.step_count))?;
            }
            if cfg.trace {
                write_trace_text(out, &trace)?;
            }
        }
    }
    Ok(status_exit(trace.status))
}

/// Compares a converged bottom-up trace against the least model. The oracle
/// gets `N + 1` iterations at least, enough for any program.
fn check_model(
    engine: &DerivationTrace,
    program: &SDProgram,
    max_steps: usize,
) -> Result<(), Failure> {
    let budget = max_steps.max(program.table().len() + 1);
    let oracle = least_model_trace(program, budget);
    let a: BTreeSet<&Atom> = engine.final_state().iter().collect();
    let s: BTreeSet<&Atom> = oracle.final_state().iter().collect();
    if a != s {
        return Err(Failure::Disagreement(format!(
            "attention model {{{}}}, least model {{{}}}",
            render_atoms(a),
            render_atoms(s)
        )));
    }
    Ok(())
}
