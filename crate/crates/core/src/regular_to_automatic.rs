//! The semigroup trick: a regular sequence with finitely many values is
//! automatic, with the distinct vectors v·γ(z) as states.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::digit_automata::{AutomatonError, Dfao, DigitAlphabet};
use crate::linrep::{dot, format_rational, vec_mul, LinearRepresentation, Rational};

pub const DEFAULT_VECTOR_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum TrickError {
    #[error("more than {cap} distinct vectors; the sequence may not be automatic")]
    Divergence { cap: usize },
    #[error("non-integer value {value} after digits {prefix:?}")]
    NonInteger { prefix: String, value: String },
    #[error("value {value} after digits {prefix:?} does not fit in i64")]
    OutputRange { prefix: String, value: String },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// Distinct vectors in discovery order together with the transition table
/// between them.
#[derive(Debug, Clone)]
pub struct VectorStateSpace {
    pub vectors: Vec<Vec<Rational>>,
    pub transitions: Vec<usize>,
    pub outputs: Vec<i64>,
}

fn prefix_string(parents: &[Option<(usize, u32)>], mut state: usize) -> String {
    let mut digits = Vec::new();
    while let Some((p, d)) = parents[state] {
        digits.push(std::char::from_digit(d, 36).unwrap_or('?'));
        state = p;
    }
    digits.iter().rev().collect()
}

/// Breadth-first closure of {v} under right multiplication by γ(0), γ(1), ...
pub fn vector_state_space(lr: &LinearRepresentation, cap: usize) -> Result<VectorStateSpace, TrickError> {
    let base = lr.base() as usize;
    let mut index: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut vectors = vec![lr.v().to_vec()];
    let mut parents: Vec<Option<(usize, u32)>> = vec![None];
    index.insert(lr.v().to_vec(), 0);
    let mut transitions = Vec::new();
    let mut outputs = Vec::new();
    let mut cursor = 0;
    while cursor < vectors.len() {
        let value = dot(&vectors[cursor], lr.w());
        if !value.is_integer() {
            return Err(TrickError::NonInteger {
                prefix: prefix_string(&parents, cursor),
                value: format_rational(&value),
            });
        }
        let out = value.to_integer().to_i64().ok_or_else(|| TrickError::OutputRange {
            prefix: prefix_string(&parents, cursor),
            value: format_rational(&value),
        })?;
        outputs.push(out);
        for d in 0..base {
            let image = vec_mul(&vectors[cursor], &lr.gamma()[d]);
            let target = match index.get(&image) {
                Some(&t) => t,
                None => {
                    if vectors.len() == cap {
                        return Err(TrickError::Divergence { cap });
                    }
                    index.insert(image.clone(), vectors.len());
                    vectors.push(image);
                    parents.push(Some((cursor, d as u32)));
                    vectors.len() - 1
                }
            };
            transitions.push(target);
        }
        cursor += 1;
    }
    Ok(VectorStateSpace { vectors, transitions, outputs })
}

/// DFAO with state i the i-th discovered vector u, δ(u, d) = u·γ(d) and
/// output u·w.
pub fn semigroup_trick(lr: &LinearRepresentation, cap: usize) -> Result<Dfao, TrickError> {
    let space = vector_state_space(lr, cap)?;
    Ok(Dfao::new(DigitAlphabet::unary(lr.base()), 0, space.transitions, space.outputs)?)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::digit_automata::json::dfao_from_json;
    use crate::digit_automata::{isomorphic, minimize_dfao};
    use crate::linrep::json::linrep_from_json;
    use crate::linrep::{counting_linrep, rational, RationalMatrix};
    use crate::relations::{leq_relation, project_to_n};

    fn table2() -> Dfao {
        dfao_from_json(include_str!("../data/e_dfao_table2.json")).unwrap()
    }

    fn published() -> LinearRepresentation {
        linrep_from_json(include_str!("../data/e_linrep_rank10.json")).unwrap()
    }

    #[test]
    fn published_representation_gives_table2() {
        let lr = published();
        let raw = semigroup_trick(&lr, DEFAULT_VECTOR_CAP).unwrap();
        // The pre-minimization count depends on the basis of the input.
        assert!(raw.num_states() >= 28);
        let min = minimize_dfao(&raw);
        assert_eq!(min.num_states(), 28);
        assert!(isomorphic(&min, &table2()));
        let values = lr.eval_range(1 << 12);
        for (n, v) in values.iter().enumerate() {
            assert_eq!(*v, rational(raw.eval(n as u64)), "n = {n}");
        }
        let outputs: BTreeSet<i64> = raw.outputs().iter().copied().collect();
        let allowed: BTreeSet<i64> = [-3, -1, 0, 2, 3, 6, 9, 10, 12, 13, 15].into();
        assert!(outputs.is_subset(&allowed), "{outputs:?}");
    }

    #[test]
    fn least_significant_digit_first_reading() {
        let lr = published().reversed();
        let d = semigroup_trick(&lr, DEFAULT_VECTOR_CAP).unwrap();
        assert_eq!(d.num_states(), 33);
        let forward = published();
        for n in 0..2000u64 {
            let mut digits: Vec<usize> =
                crate::digit_automata::digits_msd(n, 2).into_iter().map(|x| x as usize).collect();
            digits.reverse();
            assert_eq!(rational(d.eval_symbols(&digits)), forward.eval(n));
        }
    }

    #[test]
    fn deterministic() {
        let a = semigroup_trick(&published(), DEFAULT_VECTOR_CAP).unwrap();
        let b = semigroup_trick(&published(), DEFAULT_VECTOR_CAP).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_sequence() {
        let d = semigroup_trick(&LinearRepresentation::constant(2, rational(5)), 10).unwrap();
        assert_eq!(d.num_states(), 1);
        assert_eq!(d.output(0), 5);
    }

    #[test]
    fn unbounded_sequence_diverges() {
        let lr = counting_linrep(&project_to_n(&leq_relation(2))).unwrap();
        assert!(matches!(semigroup_trick(&lr, 500), Err(TrickError::Divergence { cap: 500 })));
    }

    #[test]
    fn fractional_output_names_prefix() {
        // x(n) = (number of 1 digits) / 2
        let g0 = RationalMatrix::identity(2);
        let g1 =
            RationalMatrix::from_rows(vec![vec![rational(1), rational(1)], vec![rational(0), rational(1)]]).unwrap();
        let half = Rational::new(1.into(), 2.into());
        let lr = LinearRepresentation::new(2, vec![rational(1), rational(0)], vec![g0, g1], vec![rational(0), half])
            .unwrap();
        match semigroup_trick(&lr, 100) {
            Err(TrickError::NonInteger { prefix, value }) => {
                assert_eq!(prefix, "1");
                assert_eq!(value, "1/2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
