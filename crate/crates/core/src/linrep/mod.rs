//! Linear representations (v, γ, w) of b-regular sequences over ℚ.
//!
//! The value at n is v·γ(z₁)⋯γ(z_t)·w for the msd-first digits z of n. Every
//! representation built here satisfies v·γ(0) = v, so leading zeros never
//! change a value.

mod eval;
pub mod json;
mod matrix;
mod minimize;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::digit_automata::{digits_msd, Dfa, Nfa};
use crate::relations::{self, RelationError};

pub use eval::RangeEvaluator;
pub use matrix::{dot, format_rational, parse_rational, rational, vec_mul, Rational, RationalMatrix};
pub use minimize::minimize_linrep;

#[derive(Debug, Error)]
pub enum LinrepError {
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("malformed representation: {0}")]
    Shape(String),
    #[error("accepting-path counts do not stabilize under leading zeros")]
    UnboundedPadding,
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("malformed representation JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRepresentation {
    base: u32,
    v: Vec<Rational>,
    gamma: Vec<RationalMatrix>,
    w: Vec<Rational>,
}

impl LinearRepresentation {
    pub fn new(base: u32, v: Vec<Rational>, gamma: Vec<RationalMatrix>, w: Vec<Rational>) -> Result<Self, LinrepError> {
        let r = v.len();
        if base < 2 || gamma.len() != base as usize {
            return Err(LinrepError::Shape(format!("need {base} digit matrices, got {}", gamma.len())));
        }
        if w.len() != r {
            return Err(LinrepError::Shape(format!("v has length {r}, w has length {}", w.len())));
        }
        if let Some((d, g)) = gamma.iter().enumerate().find(|(_, g)| g.rows() != r || g.cols() != r) {
            return Err(LinrepError::Shape(format!("γ({d}) is {}×{}, expected {r}×{r}", g.rows(), g.cols())));
        }
        Ok(Self { base, v, gamma, w })
    }

    /// The representation of the zero sequence, of rank 0.
    pub fn zero(base: u32) -> Self {
        Self { base, v: vec![], gamma: vec![RationalMatrix::zeros(0, 0); base as usize], w: vec![] }
    }

    /// Rank-one representation of a constant sequence.
    pub fn constant(base: u32, value: Rational) -> Self {
        let one = RationalMatrix::identity(1);
        Self { base, v: vec![Rational::one()], gamma: vec![one; base as usize], w: vec![value] }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn rank(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    pub fn gamma(&self) -> &[RationalMatrix] {
        &self.gamma
    }

    pub fn w(&self) -> &[Rational] {
        &self.w
    }

    /// v·γ(0) = v.
    pub fn is_leading_zero_invariant(&self) -> bool {
        self.rank() == 0 || vec_mul(&self.v, &self.gamma[0]) == self.v
    }

    pub fn eval_digits(&self, digits: &[u32]) -> Rational {
        let u = digits.iter().fold(self.v.clone(), |u, &d| vec_mul(&u, &self.gamma[d as usize]));
        dot(&u, &self.w)
    }

    pub fn eval(&self, n: u64) -> Rational {
        self.eval_digits(&digits_msd(n, self.base))
    }

    pub fn eval_range(&self, upto: u64) -> Vec<Rational> {
        RangeEvaluator::new(self).eval_range(upto)
    }

    /// (wᵀ, γᵀ, vᵀ): the same sequence with digits read least significant first.
    pub fn reversed(&self) -> Self {
        minimize::transpose(self)
    }
}

pub fn eval_linrep(lr: &LinearRepresentation, n: u64) -> Rational {
    lr.eval(n)
}

/// Path-counting representation of a projected relation automaton.
///
/// γ(d) holds the edge multiplicities on digit d and w marks accepting
/// states. The initial vector is the initial indicator pushed through
/// leading zeros until it stops changing, which builds the mandatory padding
/// zero into v and makes v·γ(0) = v hold exactly.
pub fn counting_linrep(nfa: &Nfa) -> Result<LinearRepresentation, LinrepError> {
    let base = nfa.alphabet().base();
    let n = nfa.num_states();
    let mut gamma = vec![RationalMatrix::zeros(n, n); base as usize];
    for p in 0..n {
        for e in nfa.edges(p) {
            let cell = gamma[e.symbol].get(p, e.target) + rational(e.multiplicity as i64);
            gamma[e.symbol].set(p, e.target, cell);
        }
    }
    let mut v = vec![Rational::zero(); n];
    for &q in nfa.initial() {
        v[q] = Rational::one();
    }
    let mut stable = false;
    for _ in 0..=n + 1 {
        let next = vec_mul(&v, &gamma[0]);
        if next == v {
            stable = true;
            break;
        }
        v = next;
    }
    if !stable {
        return Err(LinrepError::UnboundedPadding);
    }
    let w = (0..n).map(|q| if nfa.is_accepting(q) { Rational::one() } else { Rational::zero() }).collect();
    LinearRepresentation::new(base, v, gamma, w)
}

/// ca·a + cb·b by the block-diagonal construction; the rank is the sum of ranks.
pub fn combine(
    a: &LinearRepresentation,
    b: &LinearRepresentation,
    ca: &Rational,
    cb: &Rational,
) -> Result<LinearRepresentation, LinrepError> {
    if a.base != b.base {
        return Err(LinrepError::BaseMismatch(a.base, b.base));
    }
    let v = a.v.iter().map(|x| x * ca).chain(b.v.iter().map(|x| x * cb)).collect();
    let gamma = a.gamma.iter().zip(&b.gamma).map(|(x, y)| x.block_diag(y)).collect();
    let w = a.w.iter().chain(&b.w).cloned().collect();
    LinearRepresentation::new(a.base, v, gamma, w)
}

/// Σ cᵢ·xᵢ over several representations.
pub fn linear_combination(terms: &[(&LinearRepresentation, Rational)]) -> Result<LinearRepresentation, LinrepError> {
    let Some((first, rest)) = terms.split_first() else {
        return Err(LinrepError::Shape("empty combination".into()));
    };
    let mut acc = combine(first.0, &LinearRepresentation::zero(first.0.base), &first.1, &Rational::one())?;
    for (lr, c) in rest {
        acc = combine(&acc, lr, &Rational::one(), c)?;
    }
    Ok(acc)
}

/// Counts k-compositions x₁ + ⋯ + x_k + offset = n with every part accepted by `allowed`.
pub fn composition_count_linrep(k: usize, offset: u64, allowed: &Dfa) -> Result<LinearRepresentation, LinrepError> {
    let mut relation = relations::addition_relation(k, offset, allowed.alphabet().base())?;
    for track in 1..=k {
        relation = relations::constrain_track(&relation, track, allowed, false)?;
    }
    counting_linrep(&relations::project_to_n(&relation))
}

/// x(n − 1) with x(−1) = 0 for the composition count, built from the
/// relation with constant offset 1.
pub fn shift_by_one_linrep(k: usize, allowed: &Dfa) -> Result<LinearRepresentation, LinrepError> {
    composition_count_linrep(k, 1, allowed)
}

#[cfg(test)]
mod tests;
