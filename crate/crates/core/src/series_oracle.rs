//! Ground truth by truncated power series.
//!
//! A set A ⊆ ℕ is handled through its characteristic sequence up to a finite
//! horizon N. Since Σ r(k,A,n) Xⁿ = A(X)ᵏ, the representation counts are k−1
//! convolutions away. Every table carries the horizon up to which its
//! coefficients are exact; combining tables truncates to the smaller one.

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::digit_automata::{json::AutomatonFile, Dfao};

/// Largest horizon any set description will be expanded to.
pub const MAX_HORIZON: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("cannot parse set description {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("unsupported set description: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Named generator for an infinite set, enumerated in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// 2^(m+offset) − 1 for m ≥ 0. With offset 2 this is {3, 7, 15, 31, ...}.
    Pow2Minus1 {
        offset: u32,
    },
    PowersOfTwo,
    Squares,
    Odd,
}

impl Rule {
    fn members(&self, horizon: u64) -> Result<Vec<u64>, SeriesError> {
        let out = match self {
            Rule::Pow2Minus1 { offset } => {
                if *offset > 62 {
                    return Err(SeriesError::Unsupported(format!("pow2minus1 offset {offset} overflows")));
                }
                (*offset..63).map(|e| (1u64 << e) - 1).take_while(|&x| x <= horizon).collect()
            }
            Rule::PowersOfTwo => (0..63).map(|e| 1u64 << e).take_while(|&x| x <= horizon).collect(),
            Rule::Squares => (0u64..).map(|i| i * i).take_while(|&x| x <= horizon).collect(),
            Rule::Odd => (1..=horizon).step_by(2).collect(),
        };
        Ok(out)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Pow2Minus1 { offset: 2 } => write!(f, "pow2minus1"),
            Rule::Pow2Minus1 { offset } => write!(f, "pow2minus1(offset={offset})"),
            Rule::PowersOfTwo => write!(f, "pow2"),
            Rule::Squares => write!(f, "squares"),
            Rule::Odd => write!(f, "odd"),
        }
    }
}

/// Description of a subset of ℕ.
///
/// Text forms: `list:0,1,2,4`, `rule:pow2minus1`, `rule:pow2minus1(offset=3)`,
/// `rule:pow2`, `rule:squares`, `rule:odd`, `complement:<spec>` and
/// `automaton:<path>` (a single-track automaton JSON file; a state with
/// nonzero output, or an accepting state, means membership).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    List(Vec<u64>),
    Complement(Box<SetSpec>),
    Rule(Rule),
    Automaton(Dfao),
}

impl SetSpec {
    /// The forbidden set {2^(m+2) − 1 : m ≥ 0}.
    pub fn forbidden() -> Self {
        SetSpec::Rule(Rule::Pow2Minus1 { offset: 2 })
    }

    pub fn complement(self) -> Self {
        SetSpec::Complement(Box::new(self))
    }

    pub fn list(members: Vec<u64>) -> Result<Self, SeriesError> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SeriesError::Parse {
                input: format!("{members:?}"),
                reason: "list must be strictly increasing".into(),
            });
        }
        Ok(SetSpec::List(members))
    }
}

fn parse_rule(input: &str, body: &str) -> Result<Rule, SeriesError> {
    let err = |reason: &str| SeriesError::Parse { input: input.to_string(), reason: reason.to_string() };
    let (name, args) = match body.split_once('(') {
        Some((name, rest)) => {
            let args = rest.strip_suffix(')').ok_or_else(|| err("missing ')'"))?;
            (name.trim(), Some(args))
        }
        None => (body.trim(), None),
    };
    match (name, args) {
        ("pow2minus1", None) => Ok(Rule::Pow2Minus1 { offset: 2 }),
        ("pow2minus1", Some(args)) => {
            let value = args
                .trim()
                .strip_prefix("offset")
                .and_then(|r| r.trim_start().strip_prefix('='))
                .ok_or_else(|| err("expected offset=<n>"))?;
            let offset = value.trim().parse().map_err(|_| err("offset must be a natural number"))?;
            Ok(Rule::Pow2Minus1 { offset })
        }
        ("pow2", None) => Ok(Rule::PowersOfTwo),
        ("squares", None) => Ok(Rule::Squares),
        ("odd", None) => Ok(Rule::Odd),
        (_, Some(_)) => Err(err("this rule takes no parameters")),
        _ => Err(SeriesError::Unsupported(format!("unknown rule {name:?}"))),
    }
}

impl FromStr for SetSpec {
    type Err = SeriesError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let input = input.trim();
        let err = |reason: &str| SeriesError::Parse { input: input.to_string(), reason: reason.to_string() };
        let (kind, body) = input.split_once(':').ok_or_else(|| err("expected <kind>:<payload>"))?;
        match kind.trim() {
            "list" => {
                let members = body
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<u64>().map_err(|_| err("list entries must be natural numbers")))
                    .collect::<Result<Vec<_>, _>>()?;
                SetSpec::list(members).map_err(|_| err("list must be strictly increasing"))
            }
            "complement" => Ok(body.parse::<SetSpec>()?.complement()),
            "rule" => Ok(SetSpec::Rule(parse_rule(input, body)?)),
            "automaton" => {
                let path = PathBuf::from(body.trim());
                let text =
                    std::fs::read_to_string(&path).map_err(|source| SeriesError::Io { path: path.clone(), source })?;
                let file: AutomatonFile = serde_json::from_str(&text).map_err(|e| err(&e.to_string()))?;
                let dfao = file.into_dfao().map_err(|e| err(&e.to_string()))?;
                if dfao.alphabet().arity() != 1 {
                    return Err(SeriesError::Unsupported("membership automaton must have a single track".into()));
                }
                Ok(SetSpec::Automaton(dfao))
            }
            other => Err(SeriesError::Unsupported(format!("unknown set kind {other:?}"))),
        }
    }
}

/// Characteristic sequence of a set on 0..=horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicSeries {
    bits: Vec<bool>,
}

impl CharacteristicSeries {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "a series covers at least index 0");
        Self { bits }
    }

    pub fn horizon(&self) -> usize {
        self.bits.len() - 1
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, n: usize) -> bool {
        self.bits[n]
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn truncate(&self, horizon: usize) -> Self {
        Self { bits: self.bits[..=horizon.min(self.horizon())].to_vec() }
    }
}

pub fn characteristic_series(spec: &SetSpec, horizon: u64) -> Result<CharacteristicSeries, SeriesError> {
    if horizon > MAX_HORIZON {
        return Err(SeriesError::Unsupported(format!("horizon {horizon} exceeds {MAX_HORIZON}")));
    }
    let len = horizon as usize + 1;
    let bits = match spec {
        SetSpec::List(members) => {
            let mut bits = vec![false; len];
            members.iter().filter(|&&m| m <= horizon).for_each(|&m| bits[m as usize] = true);
            bits
        }
        SetSpec::Rule(rule) => {
            let mut bits = vec![false; len];
            rule.members(horizon)?.into_iter().for_each(|m| bits[m as usize] = true);
            bits
        }
        SetSpec::Complement(inner) => characteristic_series(inner, horizon)?.complement().bits,
        SetSpec::Automaton(dfao) => dfao.eval_range(horizon).into_iter().map(|o| o != 0).collect(),
    };
    Ok(CharacteristicSeries { bits })
}

/// Product of a truncated series with a 0/1 series, truncated to the shorter horizon.
///
/// Works from whichever of the set or its complement is sparser:
/// (c·a)[n] = Σ_{m∈A} c[n−m] = Σ_{i≤n} c[i] − Σ_{m∉A} c[n−m].
pub fn convolve(c: &[BigInt], a: &CharacteristicSeries) -> Vec<BigInt> {
    let len = c.len().min(a.bits.len());
    let a = &a.bits[..len];
    let members: Vec<usize> = (0..len).filter(|&i| a[i]).collect();
    if members.len() * 2 <= len {
        (0..len).map(|n| members.iter().take_while(|&&m| m <= n).map(|&m| &c[n - m]).sum()).collect()
    } else {
        let holes: Vec<usize> = (0..len).filter(|&i| !a[i]).collect();
        let mut prefix = BigInt::zero();
        (0..len)
            .map(|n| {
                prefix += &c[n];
                let missing: BigInt = holes.iter().take_while(|&&m| m <= n).map(|&m| &c[n - m]).sum();
                &prefix - missing
            })
            .collect()
    }
}

/// r(k, A, n) for n up to a horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    k: usize,
    counts: Vec<BigInt>,
}

impl CountTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn horizon(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.counts
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,count")?;
        for (n, c) in self.counts.iter().enumerate() {
            writeln!(out, "{n},{c}")?;
        }
        Ok(())
    }
}

pub fn rep_count_table(k: usize, a: &CharacteristicSeries) -> CountTable {
    assert!(k >= 1, "arity must be at least 1");
    let mut counts: Vec<BigInt> = a.bits.iter().map(|&b| BigInt::from(b as u8)).collect();
    for _ in 1..k {
        counts = convolve(&counts, a);
    }
    CountTable { k, counts }
}

/// First differences with the convention that the entry at −1 is zero.
pub fn differences(values: &[BigInt]) -> Vec<BigInt> {
    let mut prev = BigInt::zero();
    values
        .iter()
        .map(|v| {
            let d = v - &prev;
            prev = v.clone();
            d
        })
        .collect()
}

/// d(n) = r(k,A,n) − r(k,A,n−1), with r(k,A,−1) = 0.
pub fn difference_table(t: &CountTable) -> Vec<BigInt> {
    differences(&t.counts)
}

/// g(n) = [Xⁿ]F(X)² and h(n) = [Xⁿ]F(X)³: ordered pairs and triples from F summing to n.
pub fn gh_tables(f: &CharacteristicSeries) -> (Vec<BigInt>, Vec<BigInt>) {
    let g = rep_count_table(2, f).counts;
    let h = convolve(&g, f);
    (g, h)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn prefix_sums(values: &mut [BigInt]) {
    let mut acc = BigInt::zero();
    for v in values.iter_mut() {
        acc += &*v;
        *v = acc.clone();
    }
}

/// Outcome of comparing (1−X)A(X)ᵏ with its expansion in powers of F(X).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub k: usize,
    pub horizon: usize,
    pub first_mismatch: Option<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub n: usize,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Coefficients of the right-hand side
/// 1/(1−X)^{k−1} + Σ_{1≤i≤k−2} (−1)^i C(k,i) F^i/(1−X)^{k−i−1} + (−1)^{k−1} k F^{k−1} + (−1)^k (1−X) F^k.
pub fn identity_rhs(k: usize, f: &CharacteristicSeries) -> Vec<BigInt> {
    let len = f.bits.len();
    let mut rhs: Vec<BigInt> = (0..len as u64).map(|n| binomial(n + k as u64 - 2, k as u64 - 2)).collect();
    let mut power: Vec<BigInt> = f.bits.iter().map(|&b| BigInt::from(b as u8)).collect();
    for i in 1..=k {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        if i <= k - 2 {
            let mut term = power.clone();
            for _ in 0..(k - i - 1) {
                prefix_sums(&mut term);
            }
            let coeff = sign * binomial(k as u64, i as u64);
            rhs.iter_mut().zip(&term).for_each(|(r, t)| *r += &coeff * t);
        } else if i == k - 1 {
            let coeff = sign * BigInt::from(k);
            rhs.iter_mut().zip(&power).for_each(|(r, t)| *r += &coeff * t);
        } else {
            let shifted = differences(&power);
            rhs.iter_mut().zip(&shifted).for_each(|(r, t)| *r += &sign * t);
        }
        if i < k {
            power = convolve(&power, f);
        }
    }
    rhs
}

/// Checks (1−X)A(X)ᵏ against the F-power expansion coefficient by coefficient,
/// where A is the complement of F. The left side comes from the count table of A.
pub fn check_main_identity(k: usize, f: &CharacteristicSeries, horizon: usize) -> Result<IdentityCheck, SeriesError> {
    if k < 3 {
        return Err(SeriesError::Precondition(format!("k = {k}, need k ≥ 3")));
    }
    if f.bits[0] {
        return Err(SeriesError::Precondition("0 belongs to the forbidden set".into()));
    }
    let f = f.truncate(horizon);
    let lhs = difference_table(&rep_count_table(k, &f.complement()));
    let rhs = identity_rhs(k, &f);
    let first_mismatch = lhs.iter().zip(&rhs).position(|(l, r)| l != r).map(|n| Mismatch {
        n,
        lhs: lhs[n].clone(),
        rhs: rhs[n].clone(),
    });
    Ok(IdentityCheck { k, horizon: f.horizon(), first_mismatch })
}

/// Partial sums f′(n) and an empirical exponent α with f′(n) ≈ n^α.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate {
    pub partial_sums: Vec<u64>,
    /// Least-squares slope of ln f′(n) against ln n; `None` when f′ vanishes on the fit range.
    pub exponent: Option<f64>,
    /// Inclusive range of n that entered the fit.
    pub fit_range: (u64, u64),
}

/// Fits over the top half of the horizon only, to keep small-n transients out.
pub fn growth_estimate(f: &CharacteristicSeries) -> GrowthEstimate {
    let mut running = 0u64;
    let partial_sums: Vec<u64> = f
        .bits
        .iter()
        .map(|&b| {
            running += b as u64;
            running
        })
        .collect();
    let horizon = f.horizon() as u64;
    let lo = (horizon / 2).max(1);
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for i in lo..=horizon {
        let s = partial_sums[i as usize];
        if s == 0 {
            continue;
        }
        let (x, y) = ((i as f64).ln(), (s as f64).ln());
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let exponent = (n >= 2.0 && denom > 0.0).then(|| (n * sxy - sx * sy) / denom);
    GrowthEstimate { partial_sums, exponent, fit_range: (lo, horizon) }
}

/// Smallest m such that every d[n] with m ≤ n ≤ horizon is positive (or
/// non-negative when `strict` is false). `None` when the last entry itself
/// violates the condition.
pub fn check_eventually_increasing(d: &[BigInt], strict: bool) -> Option<usize> {
    let bad = |x: &BigInt| if strict { !x.is_positive() } else { x.is_negative() };
    match d.iter().rposition(bad) {
        None => Some(0),
        Some(last) if last + 1 == d.len() => None,
        Some(last) => Some(last + 1),
    }
}
