use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::alphabet::DigitAlphabet;
use super::dfa::Dfa;
use super::AutomatonError;

/// Default bound on the number of subset states built by [`determinize`].
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub symbol: usize,
    pub target: usize,
    pub multiplicity: u64,
}

/// Nondeterministic automaton whose edges carry multiplicities.
///
/// Parallel edges are kept as a multiplicity so that accepting-path counts
/// survive projection; acceptance ignores them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: DigitAlphabet,
    initial: Vec<usize>,
    edges: Vec<Vec<Edge>>,
    accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(
        alphabet: DigitAlphabet,
        initial: Vec<usize>,
        edges: Vec<Vec<Edge>>,
        accepting: Vec<bool>,
    ) -> Result<Self, AutomatonError> {
        let n = accepting.len();
        if edges.len() != n {
            return Err(AutomatonError::Invalid("edge list length differs from state count".into()));
        }
        if initial.iter().any(|&q| q >= n) {
            return Err(AutomatonError::Invalid("initial state out of range".into()));
        }
        for e in edges.iter().flatten() {
            if e.target >= n || e.symbol >= alphabet.size() {
                return Err(AutomatonError::Invalid(format!("bad edge {e:?}")));
            }
        }
        Ok(Self::from_parts(alphabet, initial, edges, accepting))
    }

    /// Merges parallel edges and sorts everything; inputs must already be in range.
    pub(crate) fn from_parts(
        alphabet: DigitAlphabet,
        mut initial: Vec<usize>,
        edges: Vec<Vec<Edge>>,
        accepting: Vec<bool>,
    ) -> Self {
        initial.sort_unstable();
        initial.dedup();
        let edges = edges
            .into_iter()
            .map(|list| {
                let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
                for e in list {
                    *merged.entry((e.symbol, e.target)).or_default() += e.multiplicity;
                }
                merged
                    .into_iter()
                    .filter(|&(_, m)| m > 0)
                    .map(|((symbol, target), multiplicity)| Edge { symbol, target, multiplicity })
                    .collect()
            })
            .collect();
        Self { alphabet, initial, edges, accepting }
    }

    pub fn alphabet(&self) -> DigitAlphabet {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn edges(&self, state: usize) -> &[Edge] {
        &self.edges[state]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepts(&self, symbols: &[usize]) -> bool {
        let mut current = vec![false; self.num_states()];
        for &q in &self.initial {
            current[q] = true;
        }
        for &s in symbols {
            let mut next = vec![false; self.num_states()];
            for q in (0..self.num_states()).filter(|&q| current[q]) {
                for e in self.edges[q].iter().filter(|e| e.symbol == s) {
                    next[e.target] = true;
                }
            }
            current = next;
        }
        (0..self.num_states()).any(|q| current[q] && self.accepting[q])
    }

    /// Number of accepting paths labelled by `symbols`, counting multiplicities.
    pub fn count_paths(&self, symbols: &[usize]) -> BigUint {
        let mut current = vec![BigUint::zero(); self.num_states()];
        for &q in &self.initial {
            current[q] = BigUint::one();
        }
        for &s in symbols {
            let mut next = vec![BigUint::zero(); self.num_states()];
            for (q, count) in current.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for e in self.edges[q].iter().filter(|e| e.symbol == s) {
                    next[e.target] += count * e.multiplicity;
                }
            }
            current = next;
        }
        current.into_iter().enumerate().filter(|&(q, _)| self.accepting[q]).map(|(_, c)| c).sum()
    }

    /// Keeps only states that are reachable and can reach an accepting state.
    ///
    /// Path counts are unchanged. An automaton with an empty language comes
    /// back as a single non-accepting initial state.
    pub fn trim(&self) -> Self {
        let n = self.num_states();
        let mut reach = vec![false; n];
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        for &q in &self.initial {
            reach[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for e in &self.edges[q] {
                if !reach[e.target] {
                    reach[e.target] = true;
                    queue.push_back(e.target);
                }
            }
        }
        let mut reverse = vec![Vec::new(); n];
        for q in 0..n {
            for e in &self.edges[q] {
                reverse[e.target].push(q);
            }
        }
        let mut coreach = self.accepting.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&q| self.accepting[q]).collect();
        while let Some(q) = queue.pop_front() {
            for &p in &reverse[q] {
                if !coreach[p] {
                    coreach[p] = true;
                    queue.push_back(p);
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&q| reach[q] && coreach[q]).collect();
        if keep.is_empty() {
            return Self::from_parts(self.alphabet, vec![0], vec![Vec::new()], vec![false]);
        }
        let mut index = vec![usize::MAX; n];
        for (i, &q) in keep.iter().enumerate() {
            index[q] = i;
        }
        let initial = self.initial.iter().filter(|&&q| index[q] != usize::MAX).map(|&q| index[q]).collect();
        let edges = keep
            .iter()
            .map(|&q| {
                self.edges[q]
                    .iter()
                    .filter(|e| index[e.target] != usize::MAX)
                    .map(|e| Edge { target: index[e.target], ..*e })
                    .collect()
            })
            .collect();
        let accepting = keep.iter().map(|&q| self.accepting[q]).collect();
        Self::from_parts(self.alphabet, initial, edges, accepting)
    }
}

/// Subset construction. Multiplicities are dropped, the language is preserved.
///
/// The empty subset becomes an explicit rejecting sink so the result is total.
pub fn determinize(nfa: &Nfa, cap: usize) -> Result<Dfa, AutomatonError> {
    let k = nfa.alphabet().size();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let start = nfa.initial().to_vec();
    index.insert(start.clone(), 0);
    subsets.push(start);
    let mut delta = Vec::new();
    let mut cursor = 0;
    while cursor < subsets.len() {
        let mut successors: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &q in &subsets[cursor] {
            for e in nfa.edges(q) {
                successors[e.symbol].push(e.target);
            }
        }
        for mut next in successors {
            next.sort_unstable();
            next.dedup();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= cap {
                        return Err(AutomatonError::StateCap { cap });
                    }
                    let id = subsets.len();
                    index.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            delta.push(id);
        }
        cursor += 1;
    }
    let accepting = subsets.iter().map(|set| set.iter().any(|&q| nfa.is_accepting(q))).collect();
    Dfa::new(nfa.alphabet(), 0, delta, accepting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit_automata::{minimize_dfa, DigitAlphabet};

    fn edge(symbol: usize, target: usize) -> Edge {
        Edge { symbol, target, multiplicity: 1 }
    }

    /// 1(0|1)*1 over binary.
    fn starts_and_ends_with_one() -> Nfa {
        Nfa::new(
            DigitAlphabet::unary(2),
            vec![0],
            vec![vec![edge(1, 1)], vec![edge(0, 1), edge(1, 1), edge(1, 2)], vec![]],
            vec![false, false, true],
        )
        .unwrap()
    }

    fn all_words(len: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..k).map(move |s| {
                        let mut w = w.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn subset_construction_textbook() {
        let nfa = starts_and_ends_with_one();
        let dfa = determinize(&nfa, DEFAULT_STATE_CAP).unwrap();
        for len in 0..=10 {
            for w in all_words(len, 2) {
                let expected = w.len() >= 2 && w[0] == 1 && w[w.len() - 1] == 1;
                assert_eq!(dfa.accepts(&w), expected, "{w:?}");
                assert_eq!(nfa.accepts(&w), expected);
            }
        }
    }

    #[test]
    fn no_accepting_states_collapses() {
        let nfa = Nfa::new(
            DigitAlphabet::unary(2),
            vec![0],
            vec![vec![edge(0, 1), edge(1, 0)], vec![edge(1, 1)]],
            vec![false, false],
        )
        .unwrap();
        let dfa = minimize_dfa(&determinize(&nfa, DEFAULT_STATE_CAP).unwrap());
        assert_eq!(dfa.num_states(), 1);
        assert!(!dfa.is_accepting(0));
    }

    #[test]
    fn cap_is_enforced() {
        let nfa = starts_and_ends_with_one();
        assert!(matches!(determinize(&nfa, 2), Err(AutomatonError::StateCap { cap: 2 })));
    }

    #[test]
    fn multiplicities_count_paths() {
        let nfa = Nfa::new(
            DigitAlphabet::unary(2),
            vec![0],
            vec![vec![edge(0, 0), Edge { symbol: 1, target: 1, multiplicity: 3 }], vec![edge(1, 1), edge(1, 1)]],
            vec![false, true],
        )
        .unwrap();
        assert_eq!(nfa.edges(1), &[Edge { symbol: 1, target: 1, multiplicity: 2 }]);
        assert_eq!(nfa.count_paths(&[0, 1, 1, 1]), BigUint::from(12u32));
        assert_eq!(nfa.count_paths(&[0]), BigUint::zero());
        let t = nfa.trim();
        assert_eq!(t.count_paths(&[0, 1, 1, 1]), BigUint::from(12u32));
    }

    #[test]
    fn reverse_determinize_matches_reversed_language() {
        let pow2 = crate::digit_automata::compile_pattern("0*10*", DigitAlphabet::unary(2)).unwrap();
        let rev = minimize_dfa(&determinize(&pow2.reverse(), DEFAULT_STATE_CAP).unwrap());
        for len in 0..=12 {
            for w in all_words(len, 2) {
                let mut r = w.clone();
                r.reverse();
                assert_eq!(rev.accepts(&w), pow2.accepts(&r), "{w:?}");
            }
        }
    }
}
