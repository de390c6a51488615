//! Derivation traces shared by the attention engine and the symbolic oracle.

use std::fmt;

use crate::linalg::Rational;
use crate::program::{Atom, Query};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    TopDown,
    BottomUp,
    Symbolic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::TopDown => "topdown",
            Mode::BottomUp => "bottomup",
            Mode::Symbolic => "symbolic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// The query reduced to exactly `{⊤}`.
    Proved,
    /// ⊥ entered the query.
    Failed,
    /// A state repeated (`cycle_start` is the step index of its first
    /// occurrence, 0 being the initial state) or the step budget ran out
    /// (`cycle_start` is `None`).
    Diverged {
        cycle_start: Option<usize>,
    },
    FixpointReached,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Failed => "failed",
            Status::Diverged { .. } => "diverged",
            Status::FixpointReached => "fixpoint_reached",
        }
    }

    pub fn cycle_start(self) -> Option<usize> {
        match self {
            Status::Diverged { cycle_start } => cycle_start,
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One layer of a derivation. Symbolic traces carry no vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// Attention output before the feed-forward activation.
    pub pre: Option<Vec<Rational>>,
    /// 0/1 state after the feed-forward activation.
    pub post: Option<Vec<bool>>,
    /// Decoded atoms, in symbol-table order.
    pub decoded: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub mode: Mode,
    /// The starting state (`pre` is always `None`).
    pub initial: TraceStep,
    pub steps: Vec<TraceStep>,
    pub status: Status,
    /// Top-down: number of layers applied. Bottom-up: index of the first
    /// interpretation that maps to itself.
    pub step_count: usize,
}

impl DerivationTrace {
    /// Decoded states starting with the initial one.
    pub fn states(&self) -> impl Iterator<Item = &[Atom]> {
        std::iter::once(self.initial.decoded.as_slice())
            .chain(self.steps.iter().map(|s| s.decoded.as_slice()))
    }

    /// Decoded top-down states as queries.
    pub fn queries(&self) -> Vec<Query> {
        self.states()
            .map(|atoms| Query::new(atoms.iter().cloned()).expect("top-down states are nonempty"))
            .collect()
    }

    pub fn final_state(&self) -> &[Atom] {
        self.steps
            .last()
            .map_or(self.initial.decoded.as_slice(), |s| s.decoded.as_slice())
    }
}

/// Options for top-down derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeriveOptions {
    pub max_steps: usize,
    /// Stop as soon as ⊥ appears. When off, derivation continues until a
    /// state repeats or the budget runs out; the status stays `Failed`.
    pub stop_on_failure: bool,
}

impl DeriveOptions {
    pub fn new(max_steps: usize) -> Self {
        Self {
            max_steps,
            stop_on_failure: true,
        }
    }

    pub fn full(max_steps: usize) -> Self {
        Self {
            max_steps,
            stop_on_failure: false,
        }
    }
}

impl Default for DeriveOptions {
    fn default() -> Self {
        Self::new(1000)
    }
}
