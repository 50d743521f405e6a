use num_traits::Zero;
use proptest::prelude::*;

use super::json::{linrep_from_json, linrep_to_json};
use super::*;
use crate::digit_automata::{compile_pattern, DigitAlphabet, Edge};
use crate::relations::{leq_relation, project_to_n};

const PUBLISHED: &str = include_str!("../../data/e_linrep_rank10.json");

fn published() -> LinearRepresentation {
    linrep_from_json(PUBLISHED).unwrap()
}

fn allowed() -> Dfa {
    compile_pattern("0*(11)1*", DigitAlphabet::unary(2)).unwrap().complement()
}

#[test]
fn published_representation_values() {
    let lr = published();
    assert_eq!(lr.rank(), 10);
    assert_eq!(lr.eval(0), rational(0));
    assert_eq!(lr.eval(1), rational(3));
    // e(6) = d(6) − 7 + 3·2 = 6 and e(10) = 12 − 11 + 9 = 10
    assert_eq!(lr.eval(6), rational(6));
    assert_eq!(lr.eval(10), rational(10));
    assert!(lr.is_leading_zero_invariant());
    assert_eq!(lr.eval_digits(&[0, 0, 1, 1, 0]), lr.eval(6));
}

#[test]
fn range_evaluation_matches_pointwise() {
    let lr = published();
    for (n, value) in lr.eval_range(2000).iter().enumerate() {
        assert_eq!(*value, lr.eval(n as u64), "n = {n}");
    }
}

#[test]
fn combine_trivial_cases() {
    let a = published();
    let zero = combine(&a, &a, &rational(1), &rational(-1)).unwrap();
    assert_eq!(zero.rank(), 20);
    assert!(zero.eval_range(300).iter().all(Zero::is_zero));
    let same = combine(&a, &LinearRepresentation::zero(2), &rational(1), &rational(1)).unwrap();
    assert_eq!(same.eval_range(300), a.eval_range(300));
    let ternary = LinearRepresentation::constant(3, rational(1));
    assert!(matches!(combine(&a, &ternary, &rational(1), &rational(1)), Err(LinrepError::BaseMismatch(2, 3))));
}

#[test]
fn minimizing_zero_sequences() {
    let a = published();
    let zero = combine(&a, &a, &rational(1), &rational(-1)).unwrap();
    let m = minimize_linrep(&zero);
    assert_eq!(m.rank(), 0);
    assert_eq!(m.eval(12345), rational(0));
    assert_eq!(minimize_linrep(&LinearRepresentation::zero(2)).rank(), 0);
}

#[test]
fn minimizing_published_representation_is_a_fixed_point() {
    let lr = published();
    let m = minimize_linrep(&lr);
    assert_eq!(m.rank(), 10);
    assert_eq!(m.eval_range(4096), lr.eval_range(4096));
    // Both are breadth-first bases from v over the same words.
    assert_eq!(m, lr);
}

#[test]
fn leq_counting() {
    let lr = counting_linrep(&project_to_n(&leq_relation(2))).unwrap();
    assert!(lr.is_leading_zero_invariant());
    for n in 0..300u64 {
        assert_eq!(lr.eval(n), rational(n as i64 + 1));
    }
    let m = minimize_linrep(&lr);
    assert_eq!(m.rank(), 2);
    assert_eq!(m.eval_range(1000), lr.eval_range(1000));
}

#[test]
fn empty_language_counts_zero() {
    let nfa = Nfa::new(
        DigitAlphabet::unary(2),
        vec![0],
        vec![vec![Edge { symbol: 1, target: 0, multiplicity: 2 }]],
        vec![false],
    )
    .unwrap();
    let lr = counting_linrep(&nfa).unwrap();
    assert!(lr.eval_range(100).iter().all(Zero::is_zero));
}

#[test]
fn unbounded_padding_is_rejected() {
    // Every 0 doubles the count: leading zeros change the value forever.
    let nfa = Nfa::new(
        DigitAlphabet::unary(2),
        vec![0],
        vec![vec![Edge { symbol: 0, target: 0, multiplicity: 2 }, Edge { symbol: 1, target: 0, multiplicity: 1 }]],
        vec![true],
    )
    .unwrap();
    assert!(matches!(counting_linrep(&nfa), Err(LinrepError::UnboundedPadding)));
}

#[test]
fn triple_sum_and_shift() {
    let f = allowed();
    let r3 = composition_count_linrep(3, 0, &f).unwrap();
    let shifted = shift_by_one_linrep(3, &f).unwrap();
    assert!(r3.is_leading_zero_invariant());
    assert!(shifted.is_leading_zero_invariant());
    assert_eq!(r3.eval(10), rational(39));
    assert_eq!(r3.eval(14), rational(72));
    assert_eq!(shifted.eval(15), rational(72));
    assert_eq!(shifted.eval(0), rational(0));
    let table = [1, 3, 6, 7, 9, 12, 19, 21, 24, 27, 39, 45, 52, 57, 72, 79, 87, 93];
    for (n, &r) in table.iter().enumerate() {
        assert_eq!(r3.eval(n as u64), rational(r));
        assert_eq!(shifted.eval(n as u64 + 1), rational(r));
    }
}

#[test]
fn json_round_trip() {
    let lr = published();
    assert_eq!(linrep_from_json(&linrep_to_json(&lr)).unwrap(), lr);
    let zero = LinearRepresentation::zero(2);
    assert_eq!(linrep_from_json(&linrep_to_json(&zero)).unwrap(), zero);
    let bad_rank = PUBLISHED.replace("\"rank\": 10", "\"rank\": 9");
    assert!(linrep_from_json(&bad_rank).is_err());
    let bad_entry = PUBLISHED.replacen("\"14/14\"", "\"14/0\"", 1);
    assert!(linrep_from_json(&bad_entry).is_err());
}

fn arb_linrep() -> impl Strategy<Value = LinearRepresentation> {
    (1usize..5).prop_flat_map(|r| {
        let entry = -2i64..3;
        (
            prop::collection::vec(entry.clone(), r),
            prop::collection::vec(entry.clone(), r * r),
            prop::collection::vec(entry.clone(), r * r),
            prop::collection::vec(entry, r),
        )
            .prop_map(move |(v, g0, g1, w)| {
                let mat = |xs: Vec<i64>| {
                    RationalMatrix::from_rows(xs.chunks(r).map(|c| c.iter().map(|&x| rational(x)).collect()).collect())
                        .unwrap()
                };
                let v: Vec<Rational> = v.into_iter().map(rational).collect();
                LinearRepresentation::new(2, v, vec![mat(g0), mat(g1)], w.into_iter().map(rational).collect()).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimization_preserves_values(lr in arb_linrep()) {
        let m = minimize_linrep(&lr);
        prop_assert!(m.rank() <= lr.rank());
        let words: Vec<Vec<u32>> = (0..64u32).map(|i| (0..6).map(|b| (i >> b) & 1).collect()).collect();
        for z in &words {
            prop_assert_eq!(m.eval_digits(z), lr.eval_digits(z));
        }
        prop_assert_eq!(minimize_linrep(&m).rank(), m.rank());
    }
}
