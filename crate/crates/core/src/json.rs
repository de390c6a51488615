//! JSON forms of compiled programs and traces.
//!
//! Compiled program:
//!
//! ```json
//! {"symbols": ["p", ...], "H": [[1, 0, ...], ...], "B": [[0, 1, ...], ...],
//!  "M": [["0", "1/2", ...], ...]}
//! ```
//!
//! `H` and `B` are `(N+2)×(N+2)` 0/1 integer matrices whose last two
//! rows/columns are ⊤ and ⊥; `M` is `N×N` with rationals as `"num/den"`
//! strings (integers print without a denominator). All matrices are
//! row-major in symbol-table order.
//!
//! Trace:
//!
//! ```json
//! {"mode": "topdown", "status": "proved", "step_count": 4,
//!  "initial": {"post": [1, 0, ...], "decoded": ["p"]},
//!  "steps": [{"pre": ["0", "1", ...], "post": [0, 1, ...], "decoded": ["q", "r"]}, ...],
//!  "cycle_start": 0, "model": ["p", ...]}
//! ```
//!
//! `mode` is `topdown`, `bottomup` or `symbolic`; `status` is `proved`,
//! `failed`, `diverged` or `fixpoint_reached`. `cycle_start` appears only for
//! a diverged derivation that revisited a state, and `model` only in the
//! output of the `model` command. Symbolic steps carry `decoded` alone. ⊤ and ⊥ decode as
//! `"true"` and `"false"`.

use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::compiler::CompiledProgram;
use crate::error::{Error, Location, Result};
use crate::linalg::{Matrix, Rational};
use crate::program::{Atom, Symbol};
use crate::trace::{DerivationTrace, Mode, Status, TraceStep};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledJson {
    pub symbols: Vec<String>,
    #[serde(rename = "H")]
    pub head: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    pub body: Vec<Vec<i64>>,
    #[serde(rename = "M")]
    pub program: Vec<Vec<String>>,
}

fn integer_rows(m: &Matrix) -> Vec<Vec<i64>> {
    m.row_iter()
        .map(|row| row.iter().map(|x| x.to_integer()).collect())
        .collect()
}

impl From<&CompiledProgram> for CompiledJson {
    fn from(cp: &CompiledProgram) -> Self {
        Self {
            symbols: cp
                .table()
                .symbols()
                .iter()
                .map(ToString::to_string)
                .collect(),
            head: integer_rows(cp.head_matrix()),
            body: integer_rows(cp.body_matrix()),
            program: cp
                .program_matrix()
                .row_iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

impl CompiledJson {
    /// The program matrix as rationals.
    pub fn program_matrix(&self) -> Result<Matrix> {
        let rows = self
            .program
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<Vec<u8>>,
    pub decoded: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub mode: String,
    pub status: String,
    pub step_count: usize,
    pub initial: StepJson,
    pub steps: Vec<StepJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<String>>,
}

fn step_json(step: &TraceStep) -> StepJson {
    StepJson {
        pre: step
            .pre
            .as_ref()
            .map(|v| v.iter().map(ToString::to_string).collect()),
        post: step
            .post
            .as_ref()
            .map(|v| v.iter().map(|&b| u8::from(b)).collect()),
        decoded: step.decoded.iter().map(ToString::to_string).collect(),
    }
}

impl From<&DerivationTrace> for TraceJson {
    fn from(t: &DerivationTrace) -> Self {
        Self {
            mode: t.mode.as_str().to_string(),
            status: t.status.name().to_string(),
            step_count: t.step_count,
            initial: step_json(&t.initial),
            steps: t.steps.iter().map(step_json).collect(),
            cycle_start: t.status.cycle_start(),
            model: None,
        }
    }
}

fn schema_error(message: String) -> Error {
    Error::Syntax {
        location: Location::default(),
        message,
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let r = Rational::from_str(s.trim())
        .map_err(|_| schema_error(format!("`{s}` is not a rational")))?;
    if r.denom().is_zero() {
        return Err(schema_error(format!("`{s}` has a zero denominator")));
    }
    Ok(r)
}

fn parse_atom(s: &str) -> Result<Atom> {
    Ok(match s {
        "true" => Atom::Top,
        "false" => Atom::Bottom,
        name => Atom::Prop(Symbol::new(name)?),
    })
}

fn parse_step(s: &StepJson) -> Result<TraceStep> {
    let pre = s
        .pre
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|x| parse_rational(x))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let post = s
        .post
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|&x| match x {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(schema_error(format!("post entry {other} is not 0/1"))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let decoded = s
        .decoded
        .iter()
        .map(|a| parse_atom(a))
        .collect::<Result<_>>()?;
    Ok(TraceStep { pre, post, decoded })
}

impl TryFrom<&TraceJson> for DerivationTrace {
    type Error = Error;

    fn try_from(j: &TraceJson) -> Result<Self> {
        let mode = match j.mode.as_str() {
            "topdown" => Mode::TopDown,
            "bottomup" => Mode::BottomUp,
            "symbolic" => Mode::Symbolic,
            other => return Err(schema_error(format!("unknown mode `{other}`"))),
        };
        let status = match j.status.as_str() {
            "proved" => Status::Proved,
            "failed" => Status::Failed,
            "diverged" => Status::Diverged {
                cycle_start: j.cycle_start,
            },
            "fixpoint_reached" => Status::FixpointReached,
            other => return Err(schema_error(format!("unknown status `{other}`"))),
        };
        Ok(DerivationTrace {
            mode,
            initial: parse_step(&j.initial)?,
            steps: j.steps.iter().map(parse_step).collect::<Result<_>>()?,
            status,
            step_count: j.step_count,
        })
    }
}
