use std::collections::VecDeque;

use super::alphabet::{digits_msd, DigitAlphabet};
use super::nfa::{Edge, Nfa};
use super::AutomatonError;

fn check_table(
    alphabet: &DigitAlphabet,
    initial: usize,
    delta: &[usize],
    num_states: usize,
) -> Result<(), AutomatonError> {
    if num_states == 0 || initial >= num_states {
        return Err(AutomatonError::Invalid(format!("initial state {initial} out of range for {num_states} states")));
    }
    if delta.len() != num_states * alphabet.size() {
        return Err(AutomatonError::Invalid(format!(
            "transition table has {} entries, expected {}",
            delta.len(),
            num_states * alphabet.size()
        )));
    }
    if let Some(bad) = delta.iter().find(|&&t| t >= num_states) {
        return Err(AutomatonError::Invalid(format!("transition target {bad} out of range")));
    }
    Ok(())
}

/// Total deterministic automaton over a digit alphabet, read most significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: DigitAlphabet,
    initial: usize,
    delta: Vec<usize>,
    accepting: Vec<bool>,
}

impl Dfa {
    /// `delta[q * |alphabet| + symbol]` is the successor of `q` on `symbol`.
    pub fn new(
        alphabet: DigitAlphabet,
        initial: usize,
        delta: Vec<usize>,
        accepting: Vec<bool>,
    ) -> Result<Self, AutomatonError> {
        check_table(&alphabet, initial, &delta, accepting.len())?;
        Ok(Self { alphabet, initial, delta, accepting })
    }

    /// Single-state automaton accepting every word (or none).
    pub fn universal(alphabet: DigitAlphabet, accept: bool) -> Self {
        Self { alphabet, initial: 0, delta: vec![0; alphabet.size()], accepting: vec![accept] }
    }

    pub fn alphabet(&self) -> DigitAlphabet {
        self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn next(&self, state: usize, symbol: usize) -> usize {
        self.delta[state * self.alphabet.size() + symbol]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn transitions(&self) -> &[usize] {
        &self.delta
    }

    pub fn run(&self, symbols: &[usize]) -> usize {
        symbols.iter().fold(self.initial, |q, &s| self.next(q, s))
    }

    pub fn accepts(&self, symbols: &[usize]) -> bool {
        self.accepting[self.run(symbols)]
    }

    /// Acceptance of the canonical base-b representation of `n` (single track only).
    pub fn accepts_number(&self, n: u64) -> bool {
        debug_assert_eq!(self.alphabet.arity(), 1);
        let digits: Vec<usize> = digits_msd(n, self.alphabet.base()).into_iter().map(|d| d as usize).collect();
        self.accepts(&digits)
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        out.accepting.iter_mut().for_each(|a| *a = !*a);
        out
    }

    /// True when reading the all-zero symbol from the initial state stays put.
    pub fn is_leading_zero_invariant(&self) -> bool {
        self.next(self.initial, 0) == self.initial
    }

    /// Automaton for the reversed language. Each edge keeps multiplicity one.
    pub fn reverse(&self) -> Nfa {
        let k = self.alphabet.size();
        let mut edges = vec![Vec::new(); self.num_states()];
        for q in 0..self.num_states() {
            for s in 0..k {
                let t = self.next(q, s);
                edges[t].push(Edge { symbol: s, target: q, multiplicity: 1 });
            }
        }
        let initial = (0..self.num_states()).filter(|&q| self.accepting[q]).collect();
        let mut accepting = vec![false; self.num_states()];
        accepting[self.initial] = true;
        Nfa::from_parts(self.alphabet, initial, edges, accepting)
    }

    pub fn to_dfao(&self) -> Dfao {
        Dfao {
            alphabet: self.alphabet,
            initial: self.initial,
            delta: self.delta.clone(),
            outputs: self.accepting.iter().map(|&a| a as i64).collect(),
        }
    }

    pub(crate) fn from_dfao_unchecked(d: Dfao) -> Self {
        Self {
            alphabet: d.alphabet,
            initial: d.initial,
            delta: d.delta,
            accepting: d.outputs.into_iter().map(|o| o != 0).collect(),
        }
    }
}

/// Deterministic automaton with an integer output on every state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    alphabet: DigitAlphabet,
    initial: usize,
    delta: Vec<usize>,
    outputs: Vec<i64>,
}

impl Dfao {
    pub fn new(
        alphabet: DigitAlphabet,
        initial: usize,
        delta: Vec<usize>,
        outputs: Vec<i64>,
    ) -> Result<Self, AutomatonError> {
        check_table(&alphabet, initial, &delta, outputs.len())?;
        Ok(Self { alphabet, initial, delta, outputs })
    }

    pub fn alphabet(&self) -> DigitAlphabet {
        self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn next(&self, state: usize, symbol: usize) -> usize {
        self.delta[state * self.alphabet.size() + symbol]
    }

    pub fn output(&self, state: usize) -> i64 {
        self.outputs[state]
    }

    pub fn outputs(&self) -> &[i64] {
        &self.outputs
    }

    pub fn transitions(&self) -> &[usize] {
        &self.delta
    }

    pub fn run(&self, symbols: &[usize]) -> usize {
        symbols.iter().fold(self.initial, |q, &s| self.next(q, s))
    }

    pub fn eval_symbols(&self, symbols: &[usize]) -> i64 {
        self.outputs[self.run(symbols)]
    }

    /// Output after reading the canonical msd-first digits of `n`.
    pub fn eval(&self, n: u64) -> i64 {
        let base = self.alphabet.base() as u64;
        let mut stack = [0usize; 64];
        let mut len = 0;
        let mut rest = n;
        while rest > 0 {
            stack[len] = (rest % base) as usize;
            rest /= base;
            len += 1;
        }
        let q = stack[..len].iter().rev().fold(self.initial, |q, &d| self.next(q, d));
        self.outputs[q]
    }

    /// Outputs for `0..=upto`, sharing the work of common most-significant prefixes.
    pub fn eval_range(&self, upto: u64) -> Vec<i64> {
        debug_assert_eq!(self.alphabet.arity(), 1);
        let base = self.alphabet.base();
        let mut out = Vec::with_capacity(upto as usize + 1);
        out.push(self.outputs[self.initial]);
        // digits[i] and states[i + 1] describe the current canonical representation.
        let mut digits: Vec<u32> = Vec::new();
        let mut states: Vec<usize> = vec![self.initial];
        for _ in 1..=upto {
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    digits.insert(0, 1);
                    break;
                }
                pos -= 1;
                if digits[pos] + 1 < base {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
            }
            states.truncate(pos + 1);
            let mut q = states[pos];
            for &d in &digits[pos..] {
                q = self.next(q, d as usize);
                states.push(q);
            }
            out.push(self.outputs[*states.last().unwrap()]);
        }
        out
    }

    /// Renumbers reachable states in breadth-first order (symbols increasing) and drops the rest.
    pub fn canonical(&self) -> Self {
        let k = self.alphabet.size();
        let mut index = vec![usize::MAX; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        index[self.initial] = 0;
        order.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for s in 0..k {
                let t = self.next(q, s);
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut delta = Vec::with_capacity(order.len() * k);
        for &q in &order {
            for s in 0..k {
                delta.push(index[self.next(q, s)]);
            }
        }
        let outputs = order.iter().map(|&q| self.outputs[q]).collect();
        Self { alphabet: self.alphabet, initial: 0, delta, outputs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> Dfao {
        // Number of ones mod 2.
        Dfao::new(DigitAlphabet::unary(2), 0, vec![0, 1, 1, 0], vec![0, 1]).unwrap()
    }

    #[test]
    fn rejects_malformed_tables() {
        let a = DigitAlphabet::unary(2);
        assert!(Dfa::new(a, 0, vec![0, 1, 1], vec![true, false]).is_err());
        assert!(Dfa::new(a, 2, vec![0, 1, 1, 0], vec![true, false]).is_err());
        assert!(Dfa::new(a, 0, vec![0, 5, 1, 0], vec![true, false]).is_err());
    }

    #[test]
    fn eval_range_matches_pointwise() {
        let d = parity();
        let all = d.eval_range(300);
        for (n, &v) in all.iter().enumerate() {
            assert_eq!(v, d.eval(n as u64));
            assert_eq!(v, (n as u64).count_ones() as i64 % 2);
        }
        let ternary = Dfao::new(DigitAlphabet::unary(3), 0, vec![0, 1, 2, 1, 2, 0, 2, 0, 1], vec![0, 1, 2]).unwrap();
        let all = ternary.eval_range(500);
        for (n, &v) in all.iter().enumerate() {
            assert_eq!(v, ternary.eval(n as u64));
        }
    }

    #[test]
    fn canonical_drops_unreachable() {
        let a = DigitAlphabet::unary(2);
        let d = Dfao::new(a, 1, vec![0, 0, 1, 2, 2, 1], vec![7, 8, 9]).unwrap();
        let c = d.canonical();
        assert_eq!(c.num_states(), 2);
        assert_eq!(c.outputs(), &[8, 9]);
        assert_eq!(c.initial(), 0);
    }
}
