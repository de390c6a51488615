//! Set-based reference semantics: one-step top-down derivation, the T_P
//! operator, and the least model. Nothing here touches vectors; the
//! attention engine is tested against these functions.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::program::{Atom, Body, Query, SDProgram, Symbol};
use crate::trace::{DerivationTrace, DeriveOptions, Mode, Status, TraceStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolicStatus {
    Proved,
    Failed,
    Diverged,
}

impl From<Status> for SymbolicStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Proved => SymbolicStatus::Proved,
            Status::Failed => SymbolicStatus::Failed,
            Status::Diverged { .. } | Status::FixpointReached => SymbolicStatus::Diverged,
        }
    }
}

/// Replaces every atom by the body of its defining clause and merges the
/// results. ⊤ and ⊥ rewrite to themselves.
pub fn symbolic_topdown_step(query: &Query, program: &SDProgram) -> Result<Query> {
    let mut out = BTreeSet::new();
    for atom in query.iter() {
        match atom {
            Atom::Top => {
                out.insert(Atom::Top);
            }
            Atom::Bottom => {
                out.insert(Atom::Bottom);
            }
            Atom::Prop(s) => {
                let clause = program
                    .clause_for(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
                match &clause.body {
                    Body::Top => {
                        out.insert(Atom::Top);
                    }
                    Body::Bottom => {
                        out.insert(Atom::Bottom);
                    }
                    Body::Conj(symbols) => out.extend(symbols.iter().cloned().map(Atom::Prop)),
                }
            }
        }
    }
    Query::new(out)
}

fn state(query: &Query, program: &SDProgram) -> TraceStep {
    TraceStep {
        pre: None,
        post: None,
        decoded: program.table().ordered_atoms(query),
    }
}

/// Iterated [`symbolic_topdown_step`] with the same stopping rules as the
/// attention engine.
pub fn symbolic_topdown_with(
    q0: &Query,
    program: &SDProgram,
    opts: DeriveOptions,
) -> Result<DerivationTrace> {
    if opts.max_steps == 0 {
        return Err(Error::ZeroSteps);
    }
    for atom in q0.iter() {
        if let Atom::Prop(s) = atom {
            if program.clause_for(s).is_none() {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
        }
    }

    let mut trace = DerivationTrace {
        mode: Mode::Symbolic,
        initial: state(q0, program),
        steps: Vec::new(),
        status: Status::Diverged { cycle_start: None },
        step_count: 0,
    };
    if q0.is_proved() {
        trace.status = Status::Proved;
        return Ok(trace);
    }
    let mut failed = q0.is_failed();
    if failed && opts.stop_on_failure {
        trace.status = Status::Failed;
        return Ok(trace);
    }

    let mut seen: HashMap<Query, usize> = HashMap::from([(q0.clone(), 0)]);
    let mut current = q0.clone();
    for k in 1..=opts.max_steps {
        let next = symbolic_topdown_step(&current, program)?;
        trace.steps.push(state(&next, program));
        trace.step_count = k;
        if next.is_proved() {
            trace.status = Status::Proved;
            return Ok(trace);
        }
        if next.is_failed() {
            failed = true;
            if opts.stop_on_failure {
                trace.status = Status::Failed;
                return Ok(trace);
            }
        }
        if let Some(&first) = seen.get(&next) {
            trace.status = if failed {
                Status::Failed
            } else {
                Status::Diverged {
                    cycle_start: Some(first),
                }
            };
            return Ok(trace);
        }
        seen.insert(next.clone(), k);
        current = next;
    }
    if failed {
        trace.status = Status::Failed;
    }
    Ok(trace)
}

/// Status and the sequence of queries, starting with `q0`.
pub fn symbolic_topdown(
    q0: &Query,
    program: &SDProgram,
    max_steps: usize,
) -> Result<(SymbolicStatus, Vec<Query>)> {
    let trace = symbolic_topdown_with(q0, program, DeriveOptions::new(max_steps))?;
    Ok((trace.status.into(), trace.queries()))
}

/// The immediate consequence operator: heads of facts and of clauses whose
/// whole body lies in `interp`.
pub fn symbolic_tp(interp: &BTreeSet<Symbol>, program: &SDProgram) -> BTreeSet<Symbol> {
    program
        .clauses()
        .iter()
        .filter(|c| match &c.body {
            Body::Top => true,
            Body::Bottom => false,
            Body::Conj(symbols) => symbols.iter().all(|s| interp.contains(s)),
        })
        .map(|c| c.head.clone())
        .collect()
}

/// Iterates T_P from the empty set until it stops changing. `step_count`
/// is the number of iterations that changed the set.
pub fn least_model_trace(program: &SDProgram, max_steps: usize) -> DerivationTrace {
    let to_state = |set: &BTreeSet<Symbol>| TraceStep {
        pre: None,
        post: None,
        decoded: program
            .table()
            .ordered_symbols(set)
            .into_iter()
            .map(Atom::Prop)
            .collect(),
    };
    let mut current = BTreeSet::new();
    let mut trace = DerivationTrace {
        mode: Mode::Symbolic,
        initial: to_state(&current),
        steps: Vec::new(),
        status: Status::Diverged { cycle_start: None },
        step_count: max_steps,
    };
    for k in 1..=max_steps {
        let next = symbolic_tp(&current, program);
        trace.steps.push(to_state(&next));
        if next == current {
            trace.status = Status::FixpointReached;
            trace.step_count = k - 1;
            break;
        }
        current = next;
    }
    trace
}

/// The least model, or the last iterate if `max_steps` ran out first.
pub fn least_model(program: &SDProgram, max_steps: usize) -> BTreeSet<Symbol> {
    least_model_trace(program, max_steps)
        .final_state()
        .iter()
        .filter_map(|a| match a {
            Atom::Prop(s) => Some(s.clone()),
            _ => None,
        })
        .collect()
}
