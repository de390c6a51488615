//! Seeded random SD-programs for testing.
//!
//! Symbols are named `p1 … pN` and each gets exactly one clause, so the
//! output never needs completion. Each body is `true` with probability 0.2,
//! `false` with probability 0.1, and otherwise a uniformly sized, uniformly
//! chosen nonempty subset of the symbols.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::program::{Body, DefiniteClause, Symbol};

pub const TOP_PROBABILITY: f64 = 0.2;
pub const BOTTOM_PROBABILITY: f64 = 0.1;

pub fn symbol_name(i: usize) -> String {
    format!("p{}", i + 1)
}

/// Clauses for symbols `p1 … pN`, clause `i` defining `p{i+1}`.
pub fn random_clauses<R: Rng>(rng: &mut R, n_symbols: usize) -> Vec<DefiniteClause> {
    let symbols: Vec<Symbol> = (0..n_symbols)
        .map(|i| Symbol::new(&symbol_name(i)).expect("generated names are identifiers"))
        .collect();
    symbols
        .iter()
        .map(|head| {
            let roll: f64 = rng.gen();
            let body = if roll < TOP_PROBABILITY {
                Body::Top
            } else if roll < TOP_PROBABILITY + BOTTOM_PROBABILITY {
                Body::Bottom
            } else {
                let size = rng.gen_range(1..=n_symbols);
                let mut picked = index::sample(rng, n_symbols, size).into_vec();
                picked.sort_unstable();
                Body::Conj(picked.into_iter().map(|j| symbols[j].clone()).collect())
            };
            DefiniteClause::new(head.clone(), body)
        })
        .collect()
}

/// Program text for `n_symbols` symbols; identical for identical seeds.
pub fn generate_program(n_symbols: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = format!("% generated: symbols={n_symbols} seed={seed}\n");
    for clause in random_clauses(&mut rng, n_symbols) {
        out.push_str(&clause.to_string());
        out.push('\n');
    }
    out
}
