//! Inference as attention.
//!
//! A top-down layer scores the query against the head matrix, selects the
//! matching clauses with hardmax, mixes their body rows, and binarizes the
//! result with a dimension-wise Heaviside function. A bottom-up layer scores
//! an interpretation against the program matrix with the identity activation
//! and keeps the heads whose score reaches 1.
//!
//! All arithmetic is exact; there is no tolerance anywhere in this module.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::compiler::{vectorize_query, CompiledProgram, Interpretation, QueryVector};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix, Rational};
use crate::program::{Atom, Query};
use crate::trace::{DerivationTrace, DeriveOptions, Mode, Status, TraceStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Hardmax,
    Identity,
}

/// Hardmax output: `1/M` on each of the `M` maximal positions, 0 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttentionWeights(Vec<Rational>);

impl AttentionWeights {
    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.0
    }
}

pub fn hardmax(x: &[Rational]) -> Result<AttentionWeights> {
    let max = *x.iter().max().ok_or(Error::EmptyInput)?;
    let count = x.iter().filter(|&&v| v == max).count();
    let w = Rational::new(1, count as i64);
    Ok(AttentionWeights(
        x.iter()
            .map(|&v| if v == max { w } else { Rational::zero() })
            .collect(),
    ))
}

/// `act(q·Kᵀ)·V` without any scaling.
pub fn attention(
    query: &[Rational],
    keys: &Matrix,
    values: &Matrix,
    activation: Activation,
) -> Result<Vec<Rational>> {
    if query.len() != keys.cols() {
        return Err(Error::DimensionMismatch {
            expected: keys.cols(),
            found: query.len(),
        });
    }
    if keys.rows() != values.rows() {
        return Err(Error::DimensionMismatch {
            expected: keys.rows(),
            found: values.rows(),
        });
    }

    let scores: Vec<Rational> = keys.row_iter().map(|k| dot(query, k)).collect();
    let weights = match activation {
        Activation::Hardmax => hardmax(&scores)?.into_vec(),
        Activation::Identity => scores,
    };

    let mut out = vec![Rational::zero(); values.cols()];
    for (w, v) in weights.iter().zip(values.row_iter()) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o += w * x;
            }
        }
    }
    Ok(out)
}

/// Entrywise `x > 0 → 1`, else 0.
pub fn heaviside(v: &[Rational]) -> Vec<Rational> {
    v.iter()
        .map(|x| {
            if x.is_positive() {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// Entrywise `x ≥ 1 → 1`, else 0.
pub fn threshold_at_one(v: &[Rational]) -> Vec<Rational> {
    let one = Rational::one();
    v.iter()
        .map(|x| if *x >= one { one } else { Rational::zero() })
        .collect()
}

fn topdown_layer(q: &QueryVector, cp: &CompiledProgram) -> Result<(Vec<Rational>, QueryVector)> {
    let pre = attention(
        &q.to_rationals(),
        cp.head_matrix(),
        cp.body_matrix(),
        Activation::Hardmax,
    )?;
    let post = QueryVector::from_rationals(&heaviside(&pre))?;
    Ok((pre, post))
}

/// One top-down derivation step on a query vector.
pub fn topdown_step(q: &QueryVector, cp: &CompiledProgram) -> Result<QueryVector> {
    if q.len() != cp.table().dim() {
        return Err(Error::DimensionMismatch {
            expected: cp.table().dim(),
            found: q.len(),
        });
    }
    topdown_layer(q, cp).map(|(_, post)| post)
}

fn query_step(
    q: &QueryVector,
    pre: Option<Vec<Rational>>,
    cp: &CompiledProgram,
) -> (TraceStep, Query) {
    let decoded = q.decode(cp.table());
    let step = TraceStep {
        pre,
        post: Some(q.bits().to_vec()),
        decoded: cp.table().ordered_atoms(&decoded),
    };
    (step, decoded)
}

pub fn topdown_derive(
    q0: &Query,
    cp: &CompiledProgram,
    max_steps: usize,
) -> Result<DerivationTrace> {
    topdown_derive_with(q0, cp, DeriveOptions::new(max_steps))
}

/// Repeats [`topdown_step`] until the query is `{⊤}`, contains ⊥, revisits
/// an earlier state, or `max_steps` layers have been applied.
pub fn topdown_derive_with(
    q0: &Query,
    cp: &CompiledProgram,
    opts: DeriveOptions,
) -> Result<DerivationTrace> {
    if opts.max_steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let mut current = vectorize_query(q0, cp.table())?;
    let (initial, decoded) = query_step(&current, None, cp);

    let mut trace = DerivationTrace {
        mode: Mode::TopDown,
        initial,
        steps: Vec::new(),
        status: Status::Diverged { cycle_start: None },
        step_count: 0,
    };

    let mut failed = decoded.is_failed();
    if decoded.is_proved() {
        trace.status = Status::Proved;
        return Ok(trace);
    }
    if failed && opts.stop_on_failure {
        trace.status = Status::Failed;
        return Ok(trace);
    }

    let mut visited: HashMap<QueryVector, usize> = HashMap::from([(current.clone(), 0)]);
    for k in 1..=opts.max_steps {
        let (pre, post) = topdown_layer(&current, cp)?;
        let (step, decoded) = query_step(&post, Some(pre), cp);
        trace.steps.push(step);
        trace.step_count = k;

        if decoded.is_proved() {
            trace.status = Status::Proved;
            return Ok(trace);
        }
        if decoded.is_failed() {
            failed = true;
            if opts.stop_on_failure {
                trace.status = Status::Failed;
                return Ok(trace);
            }
        }
        if let Some(&first) = visited.get(&post) {
            trace.status = if failed {
                Status::Failed
            } else {
                Status::Diverged {
                    cycle_start: Some(first),
                }
            };
            return Ok(trace);
        }
        visited.insert(post.clone(), k);
        current = post;
    }

    trace.status = if failed {
        Status::Failed
    } else {
        Status::Diverged { cycle_start: None }
    };
    Ok(trace)
}

fn bottomup_layer(
    i: &Interpretation,
    cp: &CompiledProgram,
) -> Result<(Vec<Rational>, Interpretation)> {
    let pre = attention(
        &i.to_rationals(),
        cp.program_matrix(),
        cp.bottomup_values(),
        Activation::Identity,
    )?;
    let post = Interpretation::from_rationals(&threshold_at_one(&pre))?;
    Ok((pre, post))
}

/// One bottom-up step: head `j` becomes true iff its program row scores at
/// least 1 against `i`.
pub fn bottomup_step(i: &Interpretation, cp: &CompiledProgram) -> Result<Interpretation> {
    if i.len() != cp.table().len() {
        return Err(Error::DimensionMismatch {
            expected: cp.table().len(),
            found: i.len(),
        });
    }
    bottomup_layer(i, cp).map(|(_, post)| post)
}

fn interpretation_step(
    i: &Interpretation,
    pre: Option<Vec<Rational>>,
    cp: &CompiledProgram,
) -> TraceStep {
    TraceStep {
        pre,
        post: Some(i.bits().to_vec()),
        decoded: cp
            .table()
            .ordered_symbols(&i.decode(cp.table()))
            .into_iter()
            .map(Atom::Prop)
            .collect(),
    }
}

/// Iterates `I ↦ bottomup_step(I) ∪ F` from the fact heads `F` until the
/// interpretation stops changing.
pub fn bottomup_fixpoint(cp: &CompiledProgram, max_steps: usize) -> Result<DerivationTrace> {
    if max_steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let n = cp.table().len();
    let facts = Interpretation::from_indices(n, cp.fact_heads().iter().copied());
    let mut current = facts.clone();

    let mut trace = DerivationTrace {
        mode: Mode::BottomUp,
        initial: interpretation_step(&current, None, cp),
        steps: Vec::new(),
        status: Status::Diverged { cycle_start: None },
        step_count: max_steps,
    };

    for k in 1..=max_steps {
        let (pre, stepped) = bottomup_layer(&current, cp)?;
        let next = stepped.union(&facts);
        trace.steps.push(interpretation_step(&next, Some(pre), cp));
        if next == current {
            trace.status = Status::FixpointReached;
            trace.step_count = k - 1;
            return Ok(trace);
        }
        current = next;
    }
    Ok(trace)
}

/// Final interpretation of a bottom-up trace.
pub fn final_interpretation(trace: &DerivationTrace) -> Vec<Atom> {
    trace.final_state().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile;
    use crate::fixtures::EXAMPLE_PROGRAM;
    use crate::linalg::from_bits;
    use crate::program::{load_program, parse_query, Symbol};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    fn example() -> CompiledProgram {
        compile(&load_program(EXAMPLE_PROGRAM).unwrap())
    }

    fn qv(cp: &CompiledProgram, text: &str) -> QueryVector {
        vectorize_query(&parse_query(text, cp.table()).unwrap(), cp.table()).unwrap()
    }

    fn interp(cp: &CompiledProgram, names: &[&str]) -> Interpretation {
        let syms: Vec<Symbol> = names.iter().map(|n| Symbol::new(n).unwrap()).collect();
        Interpretation::from_symbols(cp.table(), &syms).unwrap()
    }

    #[test]
    fn hardmax_single_maximum() {
        let w = hardmax(&ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(w.as_slice(), ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0]).as_slice());
    }

    #[test]
    fn hardmax_ties_split_evenly() {
        let w = hardmax(&ints(&[0, 1, 1, 0, 0, 0, 0, 0, 0])).unwrap();
        let z = r(0, 1);
        let h = r(1, 2);
        assert_eq!(w.as_slice(), &[z, h, h, z, z, z, z, z, z]);
        let w = hardmax(&ints(&[0, 0, 0])).unwrap();
        assert_eq!(w.as_slice(), &[r(1, 3); 3]);
    }

    #[test]
    fn hardmax_rejects_empty() {
        assert_eq!(hardmax(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn hardmax_compares_exactly() {
        let w = hardmax(&[r(1, 3), r(2, 6), r(333, 1000)]).unwrap();
        assert_eq!(w.as_slice(), &[r(1, 2), r(1, 2), r(0, 1)]);
    }

    #[test]
    fn attention_first_two_layers() {
        let cp = example();
        let a1 = attention(
            &qv(&cp, "p").to_rationals(),
            cp.head_matrix(),
            cp.body_matrix(),
            Activation::Hardmax,
        )
        .unwrap();
        assert_eq!(a1, ints(&[0, 1, 1, 0, 0, 0, 0, 0, 0]));

        let a2 = attention(&a1, cp.head_matrix(), cp.body_matrix(), Activation::Hardmax).unwrap();
        let z = r(0, 1);
        assert_eq!(a2, vec![z, z, z, r(1, 1), r(1, 2), z, z, z, z]);
    }

    #[test]
    fn attention_top_is_fixed() {
        let cp = example();
        let top = qv(&cp, "true").to_rationals();
        let a = attention(
            &top,
            cp.head_matrix(),
            cp.body_matrix(),
            Activation::Hardmax,
        )
        .unwrap();
        assert_eq!(a, top);
    }

    #[test]
    fn attention_identity_is_unnormalized() {
        let keys = Matrix::from_rows(vec![ints(&[1, 1]), ints(&[2, 0])]).unwrap();
        let values = Matrix::identity(2);
        let out = attention(&ints(&[1, 1]), &keys, &values, Activation::Identity).unwrap();
        assert_eq!(out, ints(&[2, 2]));
    }

    #[test]
    fn attention_checks_dimensions() {
        let cp = example();
        assert_eq!(
            attention(
                &ints(&[1, 0]),
                cp.head_matrix(),
                cp.body_matrix(),
                Activation::Hardmax
            )
            .unwrap_err(),
            Error::DimensionMismatch {
                expected: 9,
                found: 2
            }
        );
        let keys = Matrix::identity(3);
        let values = Matrix::identity(2);
        assert!(attention(&ints(&[1, 0, 0]), &keys, &values, Activation::Identity).is_err());
    }

    #[test]
    fn heaviside_examples() {
        let z = r(0, 1);
        let h = r(1, 2);
        assert_eq!(
            heaviside(&[z, z, z, r(1, 1), h, z, z, z, z]),
            ints(&[0, 0, 0, 1, 1, 0, 0, 0, 0])
        );
        assert_eq!(heaviside(&ints(&[0, 0, 0])), ints(&[0, 0, 0]));
        assert_eq!(
            heaviside(&[z, z, z, z, z, h, z, h, z]),
            ints(&[0, 0, 0, 0, 0, 1, 0, 1, 0])
        );
        assert_eq!(heaviside(&[r(-1, 2)]), ints(&[0]));
    }

    #[test]
    fn threshold_is_inclusive_at_one() {
        assert_eq!(
            threshold_at_one(&[r(1, 2), r(1, 1), r(3, 2), r(0, 1), r(999, 1000)]),
            ints(&[0, 1, 1, 0, 0])
        );
    }

    #[test]
    fn topdown_steps() {
        let cp = example();
        assert_eq!(topdown_step(&qv(&cp, "p"), &cp).unwrap(), qv(&cp, "q & r"));
        assert_eq!(
            topdown_step(&qv(&cp, "s & t"), &cp).unwrap(),
            qv(&cp, "u & true")
        );
        assert_eq!(
            topdown_step(&qv(&cp, "true"), &cp).unwrap(),
            qv(&cp, "true")
        );
        assert_eq!(topdown_step(&qv(&cp, "w"), &cp).unwrap(), qv(&cp, "false"));
    }

    #[test]
    fn topdown_step_checks_dimension() {
        let cp = example();
        let short = QueryVector::from_bits(vec![true, false]).unwrap();
        assert!(matches!(
            topdown_step(&short, &cp),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn proves_p_in_four_steps() {
        let cp = example();
        let q = parse_query("p", cp.table()).unwrap();
        let trace = topdown_derive(&q, &cp, 100).unwrap();
        assert_eq!(trace.status, Status::Proved);
        assert_eq!(trace.step_count, 4);
        let expected: Vec<Query> = ["p", "q & r", "s & t", "u & true", "true"]
            .iter()
            .map(|t| parse_query(t, cp.table()).unwrap())
            .collect();
        assert_eq!(trace.queries(), expected);
        let posts: Vec<&[bool]> = trace
            .steps
            .iter()
            .map(|s| s.post.as_deref().unwrap())
            .collect();
        assert_eq!(posts[3], qv(&cp, "true").bits());
        let z = r(0, 1);
        assert_eq!(
            trace.steps[1].pre.as_deref().unwrap(),
            &[z, z, z, r(1, 1), r(1, 2), z, z, z, z]
        );
    }

    #[test]
    fn w_fails_at_first_step() {
        let cp = example();
        let q = parse_query("w", cp.table()).unwrap();
        let trace = topdown_derive(&q, &cp, 100).unwrap();
        assert_eq!(trace.status, Status::Failed);
        assert_eq!(trace.step_count, 1);
        assert_eq!(trace.final_state(), &[Atom::Bottom]);
    }

    #[test]
    fn full_trace_continues_after_failure() {
        let cp = compile(&load_program("p <- q & w.\nq <- true.\nw <- false.").unwrap());
        let q = parse_query("p", cp.table()).unwrap();
        let short = topdown_derive(&q, &cp, 100).unwrap();
        assert_eq!(short.status, Status::Failed);
        assert_eq!(short.step_count, 2);
        let full = topdown_derive_with(&q, &cp, DeriveOptions::full(100)).unwrap();
        assert_eq!(full.status, Status::Failed);
        // {p} → {q,w} → {⊤,⊥} → {⊤,⊥} repeats.
        assert_eq!(full.step_count, 3);
        assert_eq!(full.steps[..2], short.steps[..]);
    }

    #[test]
    fn self_loop_diverges_at_start() {
        let cp = compile(&load_program("p <- p.").unwrap());
        let q = parse_query("p", cp.table()).unwrap();
        let trace = topdown_derive(&q, &cp, 100).unwrap();
        assert_eq!(
            trace.status,
            Status::Diverged {
                cycle_start: Some(0)
            }
        );
        assert_eq!(trace.step_count, 1);
    }

    #[test]
    fn step_budget_exhaustion_diverges_without_cycle() {
        let cp = compile(&load_program("a <- b.\nb <- c.\nc <- true.").unwrap());
        let q = parse_query("a", cp.table()).unwrap();
        let trace = topdown_derive(&q, &cp, 2).unwrap();
        assert_eq!(trace.status, Status::Diverged { cycle_start: None });
        assert_eq!(topdown_derive(&q, &cp, 3).unwrap().status, Status::Proved);
        assert_eq!(topdown_derive(&q, &cp, 0).unwrap_err(), Error::ZeroSteps);
    }

    #[test]
    fn initial_constants_terminate_immediately() {
        let cp = example();
        let t = topdown_derive(&Query::top(), &cp, 10).unwrap();
        assert_eq!((t.status, t.step_count), (Status::Proved, 0));
        let q = parse_query("p & false", cp.table()).unwrap();
        let t = topdown_derive(&q, &cp, 10).unwrap();
        assert_eq!((t.status, t.step_count), (Status::Failed, 0));
    }

    #[test]
    fn bottomup_from_s_and_t() {
        let cp = example();
        let out = bottomup_step(&interp(&cp, &["s", "t"]), &cp).unwrap();
        assert_eq!(out, interp(&cp, &["q", "r", "t"]));
    }

    #[test]
    fn bottomup_half_satisfied_body_stays_false() {
        let cp = example();
        let i = interp(&cp, &["s"]);
        let pre = attention(
            &i.to_rationals(),
            cp.program_matrix(),
            cp.bottomup_values(),
            Activation::Identity,
        )
        .unwrap();
        assert_eq!(pre[2], r(1, 2));
        assert_eq!(bottomup_step(&i, &cp).unwrap(), interp(&cp, &["q"]));
    }

    #[test]
    fn bottomup_empty_stays_empty() {
        let cp = example();
        let empty = Interpretation::empty(7);
        assert_eq!(bottomup_step(&empty, &cp).unwrap(), empty);
        assert!(matches!(
            bottomup_step(&Interpretation::empty(3), &cp),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bottomup_fixpoint_of_example() {
        let cp = example();
        let trace = bottomup_fixpoint(&cp, 100).unwrap();
        assert_eq!(trace.status, Status::FixpointReached);
        assert_eq!(trace.step_count, 3);
        let states: Vec<Vec<String>> = trace
            .states()
            .map(|s| s.iter().map(ToString::to_string).collect())
            .collect();
        assert_eq!(
            states,
            [
                vec!["t", "u"],
                vec!["s", "t", "u"],
                vec!["q", "r", "s", "t", "u"],
                vec!["p", "q", "r", "s", "t", "u"],
                vec!["p", "q", "r", "s", "t", "u"],
            ]
        );
    }

    #[test]
    fn bottomup_fixpoint_edge_cases() {
        let cp = compile(&load_program("a <- b.\nb <- a.").unwrap());
        let t = bottomup_fixpoint(&cp, 10).unwrap();
        assert_eq!((t.status, t.step_count), (Status::FixpointReached, 0));
        assert!(t.final_state().is_empty());

        let cp = compile(&load_program("p <- true.").unwrap());
        let t = bottomup_fixpoint(&cp, 10).unwrap();
        assert_eq!((t.status, t.step_count), (Status::FixpointReached, 0));
        assert_eq!(
            final_interpretation(&t),
            [Atom::Prop(Symbol::new("p").unwrap())]
        );

        let t = bottomup_fixpoint(&example(), 3).unwrap();
        assert_eq!(t.status, Status::Diverged { cycle_start: None });
        assert_eq!(
            bottomup_fixpoint(&example(), 0).unwrap_err(),
            Error::ZeroSteps
        );
    }

    #[test]
    fn bit_vectors_survive_lifting() {
        let bits = vec![true, false, true];
        assert_eq!(
            Interpretation::from_rationals(&from_bits(&bits))
                .unwrap()
                .bits(),
            bits.as_slice()
        );
    }
}
