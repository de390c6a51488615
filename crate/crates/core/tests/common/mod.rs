#![allow(dead_code)]

use proptest::prelude::*;

/// Program text over `s0 … s{n-1}`, one clause per symbol. `kind` 0 is a
/// fact, 1 a failure clause, anything else a conjunction over the bits of
/// `mask` (an empty mask falls back to the clause's own head).
pub fn program_text(bodies: &[(u8, u16)]) -> String {
    let n = bodies.len();
    let mut out = String::new();
    for (i, &(kind, mask)) in bodies.iter().enumerate() {
        let body = match kind {
            0 => "true".to_string(),
            1 => "false".to_string(),
            _ => {
                let mut picked: Vec<String> = (0..n)
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| format!("s{j}"))
                    .collect();
                if picked.is_empty() {
                    picked.push(format!("s{i}"));
                }
                picked.join(" & ")
            }
        };
        out.push_str(&format!("s{i} <- {body}.\n"));
    }
    out
}

/// Random total programs with 1..=10 symbols.
pub fn arb_program() -> impl Strategy<Value = String> {
    (1usize..=10)
        .prop_flat_map(|n| prop::collection::vec((0u8..6, 0u16..(1 << n)), n))
        .prop_map(|bodies| program_text(&bodies))
}
