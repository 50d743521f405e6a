//! JSON interchange for automata.
//!
//! ```json
//! {"base": 2, "arity": 1, "initial": 0,
//!  "transitions": [[0, [0], 0], [0, [1], 1], ...],
//!  "outputs": {"0": 0, "1": 3, ...}}
//! ```
//!
//! Acceptors carry `"accepting": [q, ...]` instead of `"outputs"`. A
//! single-track symbol may be written as a bare digit. Unknown keys are
//! ignored, so data files may carry a version and a description.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::alphabet::DigitAlphabet;
use super::dfa::{Dfa, Dfao};
use super::AutomatonError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SymbolRepr {
    Digit(u32),
    Tuple(Vec<u32>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub base: u32,
    pub arity: usize,
    pub initial: usize,
    transitions: Vec<(usize, SymbolRepr, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<BTreeMap<usize, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accepting: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_roles: Option<Vec<String>>,
}

impl AutomatonFile {
    fn table(alphabet: &DigitAlphabet, delta: &[usize]) -> Vec<(usize, SymbolRepr, usize)> {
        let k = alphabet.size();
        delta.iter().enumerate().map(|(i, &t)| (i / k, SymbolRepr::Tuple(alphabet.decode(i % k)), t)).collect()
    }

    pub fn from_dfa(d: &Dfa) -> Self {
        let a = d.alphabet();
        Self {
            base: a.base(),
            arity: a.arity(),
            initial: d.initial(),
            transitions: Self::table(&a, d.transitions()),
            outputs: None,
            accepting: Some((0..d.num_states()).filter(|&q| d.is_accepting(q)).collect()),
            track_roles: None,
        }
    }

    pub fn from_dfao(d: &Dfao) -> Self {
        let a = d.alphabet();
        Self {
            base: a.base(),
            arity: a.arity(),
            initial: d.initial(),
            transitions: Self::table(&a, d.transitions()),
            outputs: Some(d.outputs().iter().copied().enumerate().collect()),
            accepting: None,
            track_roles: None,
        }
    }

    fn alphabet(&self) -> Result<DigitAlphabet, AutomatonError> {
        if self.base < 2 || self.arity < 1 || self.arity > 16 {
            return Err(AutomatonError::Invalid(format!("unsupported base {} / arity {}", self.base, self.arity)));
        }
        Ok(DigitAlphabet::new(self.base, self.arity))
    }

    /// Dense transition table; every (state, symbol) pair must appear exactly once.
    fn delta(&self, alphabet: &DigitAlphabet) -> Result<(usize, Vec<usize>), AutomatonError> {
        let k = alphabet.size();
        let mut num_states = self.initial + 1;
        for (q, _, t) in &self.transitions {
            num_states = num_states.max(q + 1).max(t + 1);
        }
        if let Some(out) = &self.outputs {
            num_states = num_states.max(out.keys().next_back().map_or(0, |q| q + 1));
        }
        if let Some(acc) = &self.accepting {
            num_states = num_states.max(acc.iter().max().map_or(0, |q| q + 1));
        }
        let mut delta = vec![usize::MAX; num_states * k];
        for (q, sym, t) in &self.transitions {
            let digits = match sym {
                SymbolRepr::Digit(d) => vec![*d],
                SymbolRepr::Tuple(ds) => ds.clone(),
            };
            let s =
                alphabet.encode(&digits).ok_or_else(|| AutomatonError::Invalid(format!("bad symbol {digits:?}")))?;
            let slot = &mut delta[q * k + s];
            if *slot != usize::MAX {
                return Err(AutomatonError::Invalid(format!("duplicate transition ({q}, {digits:?})")));
            }
            *slot = *t;
        }
        if let Some(i) = delta.iter().position(|&t| t == usize::MAX) {
            return Err(AutomatonError::Invalid(format!(
                "missing transition ({}, {:?})",
                i / k,
                alphabet.decode(i % k)
            )));
        }
        Ok((num_states, delta))
    }

    pub fn into_dfao(self) -> Result<Dfao, AutomatonError> {
        let alphabet = self.alphabet()?;
        let (n, delta) = self.delta(&alphabet)?;
        let outputs = match (&self.outputs, &self.accepting) {
            (Some(out), None) => (0..n)
                .map(|q| {
                    out.get(&q).copied().ok_or_else(|| AutomatonError::Invalid(format!("state {q} has no output")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            (None, Some(acc)) => {
                let mut o = vec![0; n];
                acc.iter().for_each(|&q| o[q] = 1);
                o
            }
            _ => return Err(AutomatonError::Invalid("need exactly one of \"outputs\" or \"accepting\"".into())),
        };
        Dfao::new(alphabet, self.initial, delta, outputs)
    }

    pub fn into_dfa(self) -> Result<Dfa, AutomatonError> {
        if self.outputs.is_some() {
            return Err(AutomatonError::Invalid("expected an acceptor, found outputs".into()));
        }
        let alphabet = self.alphabet()?;
        let (n, delta) = self.delta(&alphabet)?;
        let mut accepting = vec![false; n];
        for &q in self.accepting.as_deref().unwrap_or(&[]) {
            accepting[q] = true;
        }
        Dfa::new(alphabet, self.initial, delta, accepting)
    }
}

pub fn dfao_from_json(text: &str) -> Result<Dfao, AutomatonError> {
    serde_json::from_str::<AutomatonFile>(text)?.into_dfao()
}

pub fn dfa_from_json(text: &str) -> Result<Dfa, AutomatonError> {
    serde_json::from_str::<AutomatonFile>(text)?.into_dfa()
}

pub fn dfao_to_json(d: &Dfao) -> String {
    serde_json::to_string_pretty(&AutomatonFile::from_dfao(d)).expect("automaton serializes")
}

pub fn dfa_to_json(d: &Dfa) -> String {
    serde_json::to_string_pretty(&AutomatonFile::from_dfa(d)).expect("automaton serializes")
}
