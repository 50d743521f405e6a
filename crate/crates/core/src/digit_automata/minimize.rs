use std::collections::{HashMap, VecDeque};

use super::dfa::{Dfa, Dfao};

/// Moore partition refinement. Returns the block index of every state.
///
/// `seed` gives the initial partition (equal values share a block); blocks are
/// split until all members of a block agree on the block of every successor.
fn refine(num_states: usize, k: usize, delta: &[usize], seed: &[i64]) -> Vec<usize> {
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut block: Vec<usize> = seed
        .iter()
        .map(|v| {
            let next = ids.len();
            *ids.entry(*v).or_insert(next)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut signatures: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next_block = Vec::with_capacity(num_states);
        for q in 0..num_states {
            let mut sig = Vec::with_capacity(k + 1);
            sig.push(block[q]);
            sig.extend((0..k).map(|s| block[delta[q * k + s]]));
            let fresh = signatures.len();
            next_block.push(*signatures.entry(sig).or_insert(fresh));
        }
        let next_count = signatures.len();
        block = next_block;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

/// Minimal DFAO with the same output on every input, states in breadth-first order.
pub fn minimize_dfao(d: &Dfao) -> Dfao {
    let d = d.canonical();
    let k = d.alphabet().size();
    let block = refine(d.num_states(), k, d.transitions(), d.outputs());
    let num_blocks = block.iter().max().map_or(0, |m| m + 1);
    let mut delta = vec![0; num_blocks * k];
    let mut outputs = vec![0; num_blocks];
    for q in 0..d.num_states() {
        let b = block[q];
        outputs[b] = d.output(q);
        for s in 0..k {
            delta[b * k + s] = block[d.next(q, s)];
        }
    }
    Dfao::new(d.alphabet(), block[d.initial()], delta, outputs)
        .expect("quotient of a valid automaton is valid")
        .canonical()
}

/// Minimal DFA for the same language, states in breadth-first order.
pub fn minimize_dfa(d: &Dfa) -> Dfa {
    Dfa::from_dfao_unchecked(minimize_dfao(&d.to_dfao()))
}

/// Whether the reachable parts of `a` and `b` are identical up to renaming states.
pub fn isomorphic(a: &Dfao, b: &Dfao) -> bool {
    if a.alphabet() != b.alphabet() {
        return false;
    }
    let k = a.alphabet().size();
    let mut forward: HashMap<usize, usize> = HashMap::new();
    let mut backward: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([(a.initial(), b.initial())]);
    forward.insert(a.initial(), b.initial());
    backward.insert(b.initial(), a.initial());
    while let Some((p, q)) = queue.pop_front() {
        if a.output(p) != b.output(q) {
            return false;
        }
        for s in 0..k {
            let (np, nq) = (a.next(p, s), b.next(q, s));
            match (forward.get(&np), backward.get(&nq)) {
                (None, None) => {
                    forward.insert(np, nq);
                    backward.insert(nq, np);
                    queue.push_back((np, nq));
                }
                (Some(&x), Some(&y)) if x == nq && y == np => {}
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit_automata::DigitAlphabet;
    use proptest::prelude::*;

    #[test]
    fn interchangeable_accepting_sinks_merge() {
        // 0 --0--> 1, 0 --1--> 2; 1 and 2 are accepting sinks.
        let a = DigitAlphabet::unary(2);
        let d = Dfa::new(a, 0, vec![1, 2, 1, 1, 2, 2], vec![false, true, true]).unwrap();
        let m = minimize_dfa(&d);
        assert_eq!(m.num_states(), 2);
        for w in [vec![], vec![0], vec![1, 0, 1]] {
            assert_eq!(m.accepts(&w), d.accepts(&w));
        }
    }

    #[test]
    fn isomorphism_detects_relabeling_and_output_change() {
        let a = DigitAlphabet::unary(2);
        let d = Dfao::new(a, 0, vec![1, 2, 2, 0, 0, 1], vec![5, 6, 7]).unwrap();
        // swap states 1 and 2
        let p = Dfao::new(a, 0, vec![2, 1, 0, 2, 1, 0], vec![5, 7, 6]).unwrap();
        assert!(isomorphic(&d, &p));
        let q = Dfao::new(a, 0, vec![2, 1, 0, 2, 1, 0], vec![5, 7, 7]).unwrap();
        assert!(!isomorphic(&d, &q));
    }

    fn arb_dfao() -> impl Strategy<Value = Dfao> {
        (1usize..12, 2u32..4).prop_flat_map(|(n, base)| {
            let k = base as usize;
            (Just(n), Just(base), prop::collection::vec(0..n, n * k), prop::collection::vec(-2i64..3, n), 0..n)
                .prop_map(|(_, base, delta, outputs, init)| {
                    Dfao::new(DigitAlphabet::unary(base), init, delta, outputs).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn minimization_preserves_outputs_and_is_idempotent(d in arb_dfao()) {
            let m = minimize_dfao(&d);
            prop_assert!(m.num_states() <= d.num_states());
            let upto = 1u64 << 12;
            prop_assert_eq!(m.eval_range(upto), d.eval_range(upto));
            let mm = minimize_dfao(&m);
            prop_assert_eq!(mm.num_states(), m.num_states());
            prop_assert_eq!(&mm, &m);
            let reachable = d.canonical();
            if m.num_states() == reachable.num_states() {
                prop_assert!(isomorphic(&m, &reachable));
            }
        }

        #[test]
        fn relabeled_copy_is_isomorphic(d in arb_dfao(), seed in any::<u64>()) {
            let n = d.num_states();
            let k = d.alphabet().size();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut x = seed;
            for i in (1..n).rev() {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (x >> 33) as usize % (i + 1));
            }
            let mut delta = vec![0; n * k];
            let mut outputs = vec![0; n];
            for q in 0..n {
                outputs[perm[q]] = d.output(q);
                for s in 0..k {
                    delta[perm[q] * k + s] = perm[d.next(q, s)];
                }
            }
            let p = Dfao::new(d.alphabet(), perm[d.initial()], delta, outputs).unwrap();
            prop_assert!(isomorphic(&d, &p));
        }
    }
}
