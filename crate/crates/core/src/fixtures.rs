//! Sample programs shared by the tests and the documentation.

/// Seven symbols `p q r s t u w`; `p` has a four-step proof and `w` fails.
pub const EXAMPLE_PROGRAM: &str = include_str!("../data/example.lp");
