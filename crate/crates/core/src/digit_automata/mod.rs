//! Automata over base-b digit tuples, read most significant digit first.
//!
//! The canonical representation of 0 is the empty word. Automata that take
//! part in synchronized products are expected to ignore leading zeros, i.e.
//! the all-zero symbol loops on the initial state.

mod alphabet;
mod dfa;
pub mod json;
mod minimize;
mod nfa;
mod regex;

use thiserror::Error;

pub use alphabet::{digits_msd, DigitAlphabet};
pub use dfa::{Dfa, Dfao};
pub use minimize::{isomorphic, minimize_dfa, minimize_dfao};
pub use nfa::{determinize, Edge, Nfa, DEFAULT_STATE_CAP};
pub use regex::compile_pattern;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("pattern error at offset {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("state cap of {cap} exceeded")]
    StateCap { cap: usize },
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("malformed automaton JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Output of `d` on the canonical digits of `n`.
pub fn eval_dfao(d: &Dfao, n: u64) -> i64 {
    d.eval(n)
}
