//! Propositional SD-programs compiled into hardmax self-attention.
//!
//! A program is parsed and completed ([`program`]), compiled into head, body
//! and program matrices ([`compiler`]), and executed as stacked attention
//! layers ([`engine`]): hardmax attention followed by a Heaviside
//! feed-forward step derives queries top-down, and identity attention
//! followed by a threshold at 1 computes the least model bottom-up. The
//! [`oracle`] module gives the same semantics over plain sets.

pub mod cli;
pub mod compiler;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod json;
pub mod linalg;
pub mod oracle;
pub mod program;
pub mod trace;

pub use compiler::{compile, CompiledProgram, Interpretation, QueryVector};
pub use error::{Error, Result};
pub use linalg::{Matrix, Rational};
pub use program::{load_program, Atom, Query, SDProgram, Symbol, SymbolTable};
pub use trace::{DerivationTrace, DeriveOptions, Mode, Status};
