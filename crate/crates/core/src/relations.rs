//! Synchronized multi-track automata for the arithmetic relations behind the
//! counting step: x₁ + ⋯ + x_m + c = n, x ≤ n + c, and per-track membership.
//!
//! Track 0 is always `n`. Every track is padded with leading zeros to a common
//! length; counting uses n's canonical digits with one extra leading zero, which
//! is enough room for every witness since witnesses never exceed n + c.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::digit_automata::json::AutomatonFile;
use crate::digit_automata::{
    determinize, digits_msd, minimize_dfa, AutomatonError, Dfa, DigitAlphabet, Edge, Nfa, DEFAULT_STATE_CAP,
};

#[derive(Debug, Error)]
pub enum RelationError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("constant {constant} exceeds the supported bound {bound}")]
    ConstantTooLarge { constant: u64, bound: u64 },
    #[error("base mismatch: relation has base {relation}, constraint has base {constraint}")]
    BaseMismatch { relation: u32, constraint: u32 },
    #[error("constraint automaton must have a single track")]
    NotSingleTrack,
    #[error("constraint automaton does not ignore leading zeros")]
    NotLeadingZeroInvariant,
    #[error("track {track} out of range for arity {arity}")]
    NoSuchTrack { track: usize, arity: usize },
    #[error("relation JSON lacks track roles")]
    MissingRoles,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedRelation {
    dfa: Dfa,
    track_roles: Vec<String>,
}

impl TrackedRelation {
    pub fn new(dfa: Dfa, track_roles: Vec<String>) -> Result<Self, RelationError> {
        let arity = dfa.alphabet().arity();
        if track_roles.len() != arity {
            return Err(RelationError::NoSuchTrack { track: track_roles.len(), arity });
        }
        Ok(Self { dfa, track_roles })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn track_roles(&self) -> &[String] {
        &self.track_roles
    }

    pub fn base(&self) -> u32 {
        self.dfa.alphabet().base()
    }

    pub fn arity(&self) -> usize {
        self.dfa.alphabet().arity()
    }

    /// Whether the tuple of numbers (n, x₁, ...) is in the relation.
    pub fn accepts_tuple(&self, values: &[u64]) -> bool {
        let alphabet = self.dfa.alphabet();
        let tracks: Vec<Vec<u32>> = values.iter().map(|&v| digits_msd(v, alphabet.base())).collect();
        let len = tracks.iter().map(Vec::len).max().unwrap_or(0) + 1;
        let word: Vec<usize> = (0..len)
            .map(|i| {
                let digits: Vec<u32> =
                    tracks.iter().map(|t| if i + t.len() < len { 0 } else { t[i + t.len() - len] }).collect();
                alphabet.encode(&digits).expect("digits below base")
            })
            .collect();
        self.dfa.accepts(&word)
    }

    pub fn to_json(&self) -> String {
        let mut file = AutomatonFile::from_dfa(&self.dfa);
        file.track_roles = Some(self.track_roles.clone());
        serde_json::to_string_pretty(&file).expect("automaton serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RelationError> {
        let file: AutomatonFile = serde_json::from_str(text).map_err(AutomatonError::from)?;
        let roles = file.track_roles.clone().ok_or(RelationError::MissingRoles)?;
        Self::new(file.into_dfa()?, roles)
    }
}

fn addend_roles(m: usize) -> Vec<String> {
    let mut roles = vec!["n".to_string()];
    if m <= 3 {
        roles.extend(["x", "y", "z"].iter().take(m).map(|s| s.to_string()));
    } else {
        roles.extend((1..=m).map(|i| format!("x{i}")));
    }
    roles
}

/// Builds an lsd-first automaton whose states are integer registers, then
/// reverses and determinizes it into a minimal msd-first DFA.
///
/// `step` maps (register, symbol) to the next register, or `None` to reject.
fn from_lsd_register_machine(
    alphabet: DigitAlphabet,
    start: i64,
    step: impl Fn(i64, &[u32]) -> Option<i64>,
    accept: impl Fn(i64) -> bool,
) -> Result<Dfa, RelationError> {
    let k = alphabet.size();
    let symbols: Vec<Vec<u32>> = alphabet.symbols().map(|s| alphabet.decode(s)).collect();
    let mut index: HashMap<i64, usize> = HashMap::from([(start, 0)]);
    let mut registers = vec![start];
    // Last state is the rejecting sink; its index is fixed once exploration ends.
    let mut raw: Vec<Vec<Option<usize>>> = Vec::new();
    let mut cursor = 0;
    while cursor < registers.len() {
        let r = registers[cursor];
        let row = symbols
            .iter()
            .map(|digits| {
                step(r, digits).map(|next| {
                    *index.entry(next).or_insert_with(|| {
                        registers.push(next);
                        registers.len() - 1
                    })
                })
            })
            .collect();
        raw.push(row);
        cursor += 1;
        if registers.len() > DEFAULT_STATE_CAP {
            return Err(AutomatonError::StateCap { cap: DEFAULT_STATE_CAP }.into());
        }
    }
    let sink = registers.len();
    let mut delta = Vec::with_capacity((sink + 1) * k);
    for row in &raw {
        delta.extend(row.iter().map(|t| t.unwrap_or(sink)));
    }
    delta.extend(std::iter::repeat_n(sink, k));
    let mut accepting: Vec<bool> = registers.iter().map(|&r| accept(r)).collect();
    accepting.push(false);
    let lsd = Dfa::new(alphabet, 0, delta, accepting)?;
    Ok(minimize_dfa(&determinize(&lsd.reverse(), DEFAULT_STATE_CAP)?))
}

/// (n; x₁..x_m) with x₁ + ⋯ + x_m + c = n.
///
/// The constant is the initial carry of the least-significant-first adder.
pub fn addition_relation(m: usize, c: u64, base: u32) -> Result<TrackedRelation, RelationError> {
    assert!(m >= 1, "need at least one addend");
    let bound = (base as u64).pow(4);
    if c > bound {
        return Err(RelationError::ConstantTooLarge { constant: c, bound });
    }
    let b = base as i64;
    let dfa = from_lsd_register_machine(
        DigitAlphabet::new(base, m + 1),
        c as i64,
        |carry, digits| {
            let total = carry + digits[1..].iter().map(|&d| d as i64).sum::<i64>();
            (total % b == digits[0] as i64).then_some(total / b)
        },
        |carry| carry == 0,
    )?;
    TrackedRelation::new(dfa, addend_roles(m))
}

/// (n; x) with x ≤ n: equal-so-far, already-less, already-greater.
pub fn leq_relation(base: u32) -> TrackedRelation {
    const EQUAL: usize = 0;
    const LESS: usize = 1;
    const GREATER: usize = 2;
    let alphabet = DigitAlphabet::new(base, 2);
    let mut delta = Vec::with_capacity(3 * alphabet.size());
    for q in [EQUAL, LESS, GREATER] {
        for s in alphabet.symbols() {
            let (n, x) = (alphabet.digit(s, 0), alphabet.digit(s, 1));
            delta.push(match q {
                EQUAL if x < n => LESS,
                EQUAL if x > n => GREATER,
                other => other,
            });
        }
    }
    let dfa = Dfa::new(alphabet, EQUAL, delta, vec![true, true, false]).expect("static table");
    TrackedRelation::new(dfa, vec!["n".into(), "x".into()]).expect("two roles")
}

/// (n; x) with x ≤ n + c, via the borrow register of n + c − x.
pub fn leq_offset_relation(c: u64, base: u32) -> Result<TrackedRelation, RelationError> {
    let bound = (base as u64).pow(4);
    if c > bound {
        return Err(RelationError::ConstantTooLarge { constant: c, bound });
    }
    let b = base as i64;
    let dfa = from_lsd_register_machine(
        DigitAlphabet::new(base, 2),
        c as i64,
        |borrow, digits| Some((borrow + digits[0] as i64 - digits[1] as i64).div_euclid(b)),
        |borrow| borrow >= 0,
    )?;
    TrackedRelation::new(dfa, vec!["n".into(), "x".into()])
}

/// Restricts one track to the language of a single-track membership automaton
/// (or its complement when `negate` is set).
pub fn constrain_track(
    r: &TrackedRelation,
    track: usize,
    m: &Dfa,
    negate: bool,
) -> Result<TrackedRelation, RelationError> {
    let alphabet = r.dfa.alphabet();
    if track >= alphabet.arity() {
        return Err(RelationError::NoSuchTrack { track, arity: alphabet.arity() });
    }
    if m.alphabet().arity() != 1 {
        return Err(RelationError::NotSingleTrack);
    }
    if m.alphabet().base() != alphabet.base() {
        return Err(RelationError::BaseMismatch { relation: alphabet.base(), constraint: m.alphabet().base() });
    }
    if !m.is_leading_zero_invariant() {
        return Err(RelationError::NotLeadingZeroInvariant);
    }
    let k = alphabet.size();
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([((r.dfa.initial(), m.initial()), 0)]);
    let mut pairs = vec![(r.dfa.initial(), m.initial())];
    let mut delta = Vec::new();
    let mut cursor = 0;
    while cursor < pairs.len() {
        let (p, q) = pairs[cursor];
        for s in 0..k {
            let next = (r.dfa.next(p, s), m.next(q, alphabet.digit(s, track) as usize));
            let id = *index.entry(next).or_insert_with(|| {
                pairs.push(next);
                pairs.len() - 1
            });
            delta.push(id);
        }
        cursor += 1;
    }
    let accepting = pairs.iter().map(|&(p, q)| r.dfa.is_accepting(p) && (m.is_accepting(q) != negate)).collect();
    let product = Dfa::new(alphabet, 0, delta, accepting)?;
    TrackedRelation::new(minimize_dfa(&product), r.track_roles.clone())
}

/// Forgets every track but `n`, keeping one path per witness tuple.
///
/// The result reads n's digits; its accepting-path count on a padded
/// representation of n is the number of witnesses. States that cannot lead
/// to acceptance are trimmed.
pub fn project_to_n(r: &TrackedRelation) -> Nfa {
    let alphabet = r.dfa.alphabet();
    let edges: Vec<Vec<Edge>> = (0..r.dfa.num_states())
        .map(|q| {
            alphabet
                .symbols()
                .map(|s| Edge { symbol: alphabet.digit(s, 0) as usize, target: r.dfa.next(q, s), multiplicity: 1 })
                .collect()
        })
        .collect();
    Nfa::new(DigitAlphabet::unary(alphabet.base()), vec![r.dfa.initial()], edges, r.dfa.accepting().to_vec())
        .expect("projection of a valid automaton")
        .trim()
}

/// n's canonical digits with `zeros` leading zeros prepended, as symbols.
pub fn padded_digits(n: u64, base: u32, zeros: usize) -> Vec<usize> {
    std::iter::repeat_n(0, zeros).chain(digits_msd(n, base).into_iter().map(|d| d as usize)).collect()
}

/// Number of witness tuples for `n`, counted on the projection.
pub fn count_witnesses(projection: &Nfa, n: u64) -> BigUint {
    projection.count_paths(&padded_digits(n, projection.alphabet().base(), 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit_automata::compile_pattern;

    fn forbidden() -> Dfa {
        compile_pattern("0*(11)1*", DigitAlphabet::unary(2)).unwrap()
    }

    fn in_forbidden(x: u64) -> bool {
        x >= 3 && (x + 1).is_power_of_two()
    }

    fn triple_sum_in_a(c: u64) -> TrackedRelation {
        let f = forbidden();
        let mut r = addition_relation(3, c, 2).unwrap();
        for t in 1..=3 {
            r = constrain_track(&r, t, &f, true).unwrap();
        }
        r
    }

    #[test]
    fn addition_examples() {
        let r = addition_relation(3, 0, 2).unwrap();
        assert!(r.accepts_tuple(&[6, 1, 2, 3]));
        assert!(!r.accepts_tuple(&[6, 1, 2, 4]));
        assert_eq!(r.track_roles(), &["n", "x", "y", "z"]);
        let r1 = addition_relation(3, 1, 2).unwrap();
        assert!(r1.accepts_tuple(&[7, 1, 2, 3]));
        assert!(!r1.accepts_tuple(&[6, 1, 2, 3]));
    }

    #[test]
    fn single_addend_is_equality() {
        let r = addition_relation(1, 0, 2).unwrap();
        // equality over (n; x): one live state looping on [0,0] and [1,1], plus a sink
        assert_eq!(r.dfa().num_states(), 2);
        for n in 0..64 {
            for x in 0..64 {
                assert_eq!(r.accepts_tuple(&[n, x]), n == x);
            }
        }
        let p = project_to_n(&r);
        for n in 0..200 {
            assert_eq!(count_witnesses(&p, n), BigUint::from(1u32));
        }
    }

    #[test]
    fn addition_agrees_with_arithmetic_in_other_bases() {
        for base in [2u32, 3, 10] {
            let r = addition_relation(2, 2, base).unwrap();
            for n in 0..60 {
                for x in 0..30 {
                    for y in 0..30 {
                        assert_eq!(r.accepts_tuple(&[n, x, y]), x + y + 2 == n, "base {base}: {n} {x} {y}");
                    }
                }
            }
        }
        assert!(matches!(addition_relation(2, 17, 2), Err(RelationError::ConstantTooLarge { .. })));
    }

    #[test]
    fn leq_examples() {
        let r = leq_relation(2);
        assert!(r.accepts_tuple(&[9, 5]));
        assert!(!r.accepts_tuple(&[5, 9]));
        assert!(r.accepts_tuple(&[13, 13]));
        let p = project_to_n(&r);
        assert_eq!(count_witnesses(&p, 10), BigUint::from(11u32));
        let general = leq_offset_relation(0, 2).unwrap();
        let shifted = leq_offset_relation(1, 2).unwrap();
        for n in 0..70 {
            for x in 0..70 {
                assert_eq!(general.accepts_tuple(&[n, x]), x <= n);
                assert_eq!(shifted.accepts_tuple(&[n, x]), x <= n + 1);
            }
        }
        assert_eq!(minimize_dfa(general.dfa()), minimize_dfa(r.dfa()));
    }

    #[test]
    fn constrained_triple_sums() {
        let r = triple_sum_in_a(0);
        // 3 is forbidden, so 1 + 2 + 3 is not a representation over A.
        assert!(!r.accepts_tuple(&[6, 1, 2, 3]));
        assert!(r.accepts_tuple(&[7, 1, 2, 4]));
        assert!(!r.accepts_tuple(&[9, 3, 3, 3]));
        for n in 0..40u64 {
            for x in 0..=n {
                for y in 0..=n - x {
                    let z = n - x - y;
                    let expected = !in_forbidden(x) && !in_forbidden(y) && !in_forbidden(z);
                    assert_eq!(r.accepts_tuple(&[n, x, y, z]), expected, "{n} = {x}+{y}+{z}");
                }
            }
        }
        let p = project_to_n(&r);
        assert_eq!(count_witnesses(&p, 10), BigUint::from(39u32));
        let p1 = project_to_n(&triple_sum_in_a(1));
        assert_eq!(count_witnesses(&p1, 15), BigUint::from(72u32));
        assert_eq!(count_witnesses(&p1, 0), BigUint::from(0u32));
    }

    #[test]
    fn log_counter() {
        let power2 = compile_pattern("0*10*", DigitAlphabet::unary(2)).unwrap();
        let above_one = compile_pattern("0*1(0|1)(0|1)*", DigitAlphabet::unary(2)).unwrap();
        let r = constrain_track(&leq_relation(2), 1, &power2, false).unwrap();
        let r = constrain_track(&r, 1, &above_one, false).unwrap();
        let p = project_to_n(&r);
        for n in 1..300u64 {
            assert_eq!(count_witnesses(&p, n), BigUint::from(n.ilog2()), "n = {n}");
        }
        let r = constrain_track(&leq_offset_relation(1, 2).unwrap(), 1, &power2, false).unwrap();
        let p = project_to_n(&constrain_track(&r, 1, &above_one, false).unwrap());
        for n in 0..300u64 {
            assert_eq!(count_witnesses(&p, n), BigUint::from((n + 1).ilog2()), "n = {n}");
            assert_eq!(p.count_paths(&padded_digits(n, 2, 3)), BigUint::from((n + 1).ilog2()));
        }
    }

    #[test]
    fn constraint_validation() {
        let r = addition_relation(2, 0, 2).unwrap();
        let universal = Dfa::universal(DigitAlphabet::unary(2), true);
        assert_eq!(constrain_track(&r, 1, &universal, false).unwrap().dfa(), r.dfa());
        let ternary = compile_pattern("0*1", DigitAlphabet::unary(3)).unwrap();
        assert!(matches!(constrain_track(&r, 1, &ternary, false), Err(RelationError::BaseMismatch { .. })));
        let no_zeros = compile_pattern("1*", DigitAlphabet::unary(2)).unwrap();
        assert!(matches!(constrain_track(&r, 1, &no_zeros, false), Err(RelationError::NotLeadingZeroInvariant)));
        assert!(matches!(constrain_track(&r, 5, &universal, false), Err(RelationError::NoSuchTrack { .. })));
        let pair = Dfa::universal(DigitAlphabet::new(2, 2), true);
        assert!(matches!(constrain_track(&r, 1, &pair, false), Err(RelationError::NotSingleTrack)));
    }

    #[test]
    fn json_keeps_roles() {
        let r = addition_relation(3, 1, 2).unwrap();
        let back = TrackedRelation::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(matches!(
            TrackedRelation::from_json(&crate::digit_automata::json::dfa_to_json(r.dfa())),
            Err(RelationError::MissingRoles)
        ));
    }
}
