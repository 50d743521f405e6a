//! End-to-end verification commands. Each returns a [`VerificationReport`];
//! usage errors (bad arguments, unparsable set descriptions) are returned as
//! [`VerifyError`] before any step runs.

pub mod data;
mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::json;
use thiserror::Error;

use crate::digit_automata::{compile_pattern, isomorphic, minimize_dfao, Dfa, Dfao, DigitAlphabet};
use crate::linrep::{counting_linrep, linear_combination, minimize_linrep, rational, LinearRepresentation, Rational};
use crate::regular_to_automatic::{semigroup_trick, DEFAULT_VECTOR_CAP};
use crate::relations::{
    addition_relation, constrain_track, leq_offset_relation, leq_relation, project_to_n, TrackedRelation,
};
use crate::series_oracle::{
    characteristic_series, check_eventually_increasing, check_main_identity, difference_table, gh_tables,
    growth_estimate, rep_count_table, SeriesError, SetSpec,
};

use data::DataFile;
pub use report::{Step, StepStatus, VerificationReport};

pub const FORBIDDEN_PATTERN: &str = "0*(11)1*";
pub const POWER_OF_TWO_PATTERN: &str = "0*10*";
pub const ABOVE_ONE_PATTERN: &str = "0*1(0|1)(0|1)*";
pub const DEFAULT_PIPELINE_HORIZON: u64 = 1 << 16;
pub const EXPECTED_MINIMAL_RANK: usize = 10;
pub const EXPECTED_DFAO_STATES: usize = 28;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad data file: {0}")]
    Data(String),
}

fn log2_floor(n: u64) -> u64 {
    n.ilog2() as u64
}

/// n + 1 − 3⌊log₂(n+1)⌋, the part of d(n) outside e(n).
pub fn main_term(n: u64) -> i64 {
    n as i64 + 1 - 3 * log2_floor(n + 1) as i64
}

/// r(3, A, n) and d(n) for n ≤ horizon, A the complement of {3, 7, 15, ...}.
pub fn oracle_counts(horizon: u64) -> (Vec<BigInt>, Vec<BigInt>) {
    let a = characteristic_series(&SetSpec::forbidden().complement(), horizon).expect("horizon within bounds");
    let table = rep_count_table(3, &a);
    let d = difference_table(&table);
    (table.counts().to_vec(), d)
}

fn load_input(rec: &mut report::Recorder, name: &str) -> Result<DataFile, String> {
    let file = data::load(name).map_err(|e| e.to_string())?;
    rec.input(&file.name, file.digest.clone());
    Ok(file)
}

/// Compares the oracle against the bundled Table 1 and renders `n,r,d` CSV
/// over the whole horizon.
pub fn cmd_table1(horizon: u64) -> Result<(VerificationReport, String), VerifyError> {
    if horizon < 17 {
        return Err(VerifyError::Usage(format!("horizon {horizon} does not cover Table 1 (need at least 17)")));
    }
    let mut rec = report::Recorder::new(format!("table1 --horizon {horizon}"));
    let table = rec.run("load_table1", |s| {
        let file = data::load(data::TABLE1).map_err(|e| e.to_string())?;
        let t = data::parse_table1(&file).map_err(|e| e.to_string())?;
        s.metric("entries", t.r.len());
        Ok((file, t))
    });
    if let Some((file, _)) = &table {
        rec.input(&file.name, file.digest.clone());
    }
    let counts = rec.observe("oracle", |s| {
        let counts = oracle_counts(horizon);
        s.checked(horizon);
        counts
    });
    let mut csv = String::new();
    if let (Some((_, t)), Some((r, d))) = (table, counts) {
        rec.run("compare", |s| {
            s.checked(t.r.len() as u64 - 1);
            for n in 0..t.r.len().min(r.len()) {
                if r[n] != BigInt::from(t.r[n]) || d[n] != BigInt::from(t.d[n]) {
                    return Err(format!(
                        "mismatch at n = {n}: oracle r = {}, d = {}; table r = {}, d = {}",
                        r[n], d[n], t.r[n], t.d[n]
                    ));
                }
            }
            s.metric("r", t.r.clone());
            s.metric("d", t.d.clone());
            Ok(())
        });
        csv.push_str("n,r,d\n");
        for (n, (rn, dn)) in r.iter().zip(&d).enumerate() {
            let _ = writeln!(csv, "{n},{rn},{dn}");
        }
    }
    Ok((rec.finish(), csv))
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Cross-validation range 0 ≤ n ≤ horizon.
    pub horizon: u64,
    /// Table 2 automaton to compare against instead of the bundled one.
    pub table2: Option<PathBuf>,
    pub vector_cap: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { horizon: DEFAULT_PIPELINE_HORIZON, table2: None, vector_cap: DEFAULT_VECTOR_CAP }
    }
}

/// Intermediate objects of a pipeline run, as far as it got.
#[derive(Debug, Clone, Default)]
pub struct PipelineArtifacts {
    pub forbidden: Option<Dfa>,
    /// Counting representations for r(3,A,n), r(3,A,n−1), n+1 and ⌊log₂(n+1)⌋.
    pub components: Vec<(String, LinearRepresentation)>,
    pub combined: Option<LinearRepresentation>,
    pub minimized: Option<LinearRepresentation>,
    pub raw_dfao: Option<Dfao>,
    pub dfao: Option<Dfao>,
}

pub struct PipelineRun {
    pub report: VerificationReport,
    pub artifacts: PipelineArtifacts,
}

fn first_difference<T: PartialEq>(a: &[T], b: &[T]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

/// Automata, relations, counting representations, combination into e(n),
/// minimization, semigroup trick and cross-validation against the oracle.
pub fn cmd_pipeline(opts: &PipelineOptions) -> PipelineRun {
    let horizon = opts.horizon;
    let mut rec = report::Recorder::new(format!("pipeline --horizon {horizon}"));
    let mut art = PipelineArtifacts::default();
    let alphabet = DigitAlphabet::unary(2);

    let patterns = rec.run("compile_patterns", |s| {
        let compile = |p: &str| compile_pattern(p, alphabet).map_err(|e| format!("{p}: {e}"));
        let f = compile(FORBIDDEN_PATTERN)?;
        let power2 = compile(POWER_OF_TWO_PATTERN)?;
        let above_one = compile(ABOVE_ONE_PATTERN)?;
        s.metric("forbidden_states", f.num_states());
        s.metric("power_of_two_states", power2.num_states());
        for n in 0..=horizon {
            let expected = n >= 3 && (n + 1).is_power_of_two();
            if f.accepts_number(n) != expected {
                return Err(format!("{FORBIDDEN_PATTERN} misclassifies n = {n}"));
            }
        }
        s.checked(horizon);
        Ok((f, power2, above_one))
    });
    let Some((f, power2, above_one)) = patterns else { return PipelineRun { report: rec.finish(), artifacts: art } };
    art.forbidden = Some(f.clone());

    let relations = rec.run("build_relations", |s| {
        let err = |e: crate::relations::RelationError| e.to_string();
        let power_above_one = |r: TrackedRelation| -> Result<TrackedRelation, String> {
            let r = constrain_track(&r, 1, &power2, false).map_err(err)?;
            constrain_track(&r, 1, &above_one, false).map_err(err)
        };
        let log2 = power_above_one(leq_relation(2))?;
        let triple = |c: u64| -> Result<TrackedRelation, String> {
            let mut r = addition_relation(3, c, 2).map_err(err)?;
            for track in 1..=3 {
                r = constrain_track(&r, track, &f, true).map_err(err)?;
            }
            Ok(r)
        };
        let a3n = triple(0)?;
        let a3n1 = triple(1)?;
        let np1 = leq_relation(2);
        let log2n1 = power_above_one(leq_offset_relation(1, 2).map_err(err)?)?;
        s.metric("log2_states", log2.dfa().num_states());
        s.metric("a3n_states", a3n.dfa().num_states());
        s.metric("a3n1_states", a3n1.dfa().num_states());
        s.metric("np1_states", np1.dfa().num_states());
        s.metric("log2n1_states", log2n1.dfa().num_states());
        Ok([("a3n", a3n), ("a3n1", a3n1), ("np1", np1), ("log2n1", log2n1)])
    });
    let Some(relations) = relations else { return PipelineRun { report: rec.finish(), artifacts: art } };

    let components = rec.run("counting_representations", |s| {
        let mut out = Vec::new();
        for (name, r) in &relations {
            let lr = counting_linrep(&project_to_n(r)).map_err(|e| format!("{name}: {e}"))?;
            s.metric(&format!("{name}_rank"), lr.rank());
            out.push((name.to_string(), lr));
        }
        Ok(out)
    });
    let Some(components) = components else { return PipelineRun { report: rec.finish(), artifacts: art } };
    art.components = components.clone();

    let oracle = rec.observe("oracle", |s| {
        s.checked(horizon);
        oracle_counts(horizon)
    });
    let Some((r, d)) = oracle else { return PipelineRun { report: rec.finish(), artifacts: art } };

    rec.run("representations_vs_oracle", |s| {
        let big = |x: BigInt| Rational::from_integer(x);
        let expected: [Vec<Rational>; 4] = [
            r.iter().cloned().map(big).collect(),
            std::iter::once(BigInt::zero()).chain(r.iter().cloned()).take(r.len()).map(big).collect(),
            (0..=horizon).map(|n| rational(n as i64 + 1)).collect(),
            (0..=horizon).map(|n| rational(log2_floor(n + 1) as i64)).collect(),
        ];
        for ((name, lr), want) in components.iter().zip(&expected) {
            let got = lr.eval_range(horizon);
            if let Some(n) = first_difference(&got, want) {
                return Err(format!("{name} disagrees with the oracle at n = {n}"));
            }
        }
        s.checked(horizon);
        Ok(())
    });

    let combined = rec.run("combine", |s| {
        let coeffs = [1, -1, -1, 3];
        let terms: Vec<_> = components.iter().zip(coeffs).map(|((_, lr), c)| (lr, rational(c))).collect();
        let e = linear_combination(&terms).map_err(|e| e.to_string())?;
        s.metric("rank", e.rank());
        s.metric("coefficients", coeffs.to_vec());
        Ok(e)
    });
    let Some(combined) = combined else { return PipelineRun { report: rec.finish(), artifacts: art } };
    art.combined = Some(combined.clone());

    let minimized = rec.run("minimize_representation", |s| {
        let m = minimize_linrep(&combined);
        s.metric("rank", m.rank());
        if !m.is_leading_zero_invariant() {
            return Err("minimized representation is not leading-zero invariant".into());
        }
        if m.rank() != EXPECTED_MINIMAL_RANK {
            return Err(format!("rank {} instead of {EXPECTED_MINIMAL_RANK}", m.rank()));
        }
        Ok(m)
    });
    let Some(minimized) = minimized else { return PipelineRun { report: rec.finish(), artifacts: art } };
    art.minimized = Some(minimized.clone());
    let e_values = minimized.eval_range(horizon);

    rec.run("published_representation", |s| {
        let file = data::load(data::PUBLISHED_LINREP).map_err(|e| e.to_string())?;
        s.metric("sha256", file.digest.clone());
        let published = data::parse_linrep(&file).map_err(|e| e.to_string())?;
        s.metric("rank", published.rank());
        if published.rank() != minimized.rank() {
            return Err(format!("published rank {} vs computed {}", published.rank(), minimized.rank()));
        }
        if let Some(n) = first_difference(&published.eval_range(horizon), &e_values) {
            return Err(format!("published representation disagrees at n = {n}"));
        }
        s.metric("identical_matrices", published == minimized);
        s.checked(horizon);
        Ok(())
    });

    let raw = rec.run("semigroup_trick", |s| {
        s.metric("applied_to", "minimized representation");
        let d = semigroup_trick(&minimized, opts.vector_cap).map_err(|e| e.to_string())?;
        s.metric("states_before_minimization", d.num_states());
        let lsd = semigroup_trick(&minimized.reversed(), opts.vector_cap).map_err(|e| e.to_string())?;
        s.metric("states_before_minimization_lsd_first", lsd.num_states());
        let values: Vec<Rational> = d.eval_range(horizon).into_iter().map(rational).collect();
        if let Some(n) = first_difference(&values, &e_values) {
            return Err(format!("DFAO and representation disagree at n = {n}"));
        }
        s.checked(horizon);
        Ok(d)
    });
    let Some(raw) = raw else { return PipelineRun { report: rec.finish(), artifacts: art } };
    art.raw_dfao = Some(raw.clone());

    let dfao = rec.run("minimize_dfao", |s| {
        let m = minimize_dfao(&raw);
        s.metric("states", m.num_states());
        if m.num_states() != EXPECTED_DFAO_STATES {
            return Err(format!("{} states instead of {EXPECTED_DFAO_STATES}", m.num_states()));
        }
        Ok(m)
    });
    let Some(dfao) = dfao else { return PipelineRun { report: rec.finish(), artifacts: art } };
    art.dfao = Some(dfao.clone());

    let table2 = match &opts.table2 {
        Some(path) => DataFile::read(path).map_err(|e| e.to_string()),
        None => load_input(&mut rec, data::TABLE2),
    };
    if let (Some(path), Ok(file)) = (&opts.table2, &table2) {
        rec.input(&path.display().to_string(), file.digest.clone());
    }
    rec.run("table2_isomorphism", |s| {
        let reference = data::parse_dfao(&table2?).map_err(|e| e.to_string())?;
        s.metric("reference_states", reference.num_states());
        if !isomorphic(&dfao, &reference) {
            return Err("computed DFAO is not isomorphic to the Table 2 automaton".into());
        }
        Ok(())
    });

    rec.run("formula_check", |s| {
        let e = dfao.eval_range(horizon);
        for n in 0..=horizon {
            let lhs = &d[n as usize];
            let rhs = main_term(n) + e[n as usize];
            if *lhs != BigInt::from(rhs) {
                return Err(format!("d({n}) = {lhs} but n+1-3*floor(log2(n+1)) + e(n) = {rhs}"));
            }
        }
        s.checked(horizon);
        Ok(())
    });

    PipelineRun { report: rec.finish(), artifacts: art }
}

/// Outcome of scanning d(n) = n + 1 − 3⌊log₂(n+1)⌋ + e(n) over a range.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityScan {
    pub first_non_positive: Option<u64>,
    /// Minimum of d(n) over 1 ≤ n ≤ upto and the first n attaining it.
    pub min_d: (i64, u64),
    /// Minimum of d(n)/(n+1) over 0 ≤ n ≤ upto and the first n attaining it.
    pub min_ratio: (f64, u64),
}

pub fn scan_positivity(e: &Dfao, upto: u64) -> PositivityScan {
    let values = e.eval_range(upto);
    let mut scan = PositivityScan { first_non_positive: None, min_d: (i64::MAX, 0), min_ratio: (f64::INFINITY, 0) };
    for (n, en) in values.into_iter().enumerate() {
        let n = n as u64;
        let d = main_term(n) + en;
        if d <= 0 && scan.first_non_positive.is_none() {
            scan.first_non_positive = Some(n);
        }
        if n >= 1 && d < scan.min_d.0 {
            scan.min_d = (d, n);
        }
        let ratio = d as f64 / (n + 1) as f64;
        if ratio < scan.min_ratio.0 {
            scan.min_ratio = (ratio, n);
        }
    }
    scan
}

/// Smallest m ≤ upto + 1 such that n + 1 − 3⌊log₂(n+1)⌋ − slack > 0 for every m ≤ n ≤ upto.
pub fn bound_positive_from(slack: i64, upto: u64) -> u64 {
    (0..=upto).rev().find(|&n| main_term(n) - slack <= 0).map_or(0, |n| n + 1)
}

/// d(n) > 0 through the Table 2 automaton, plus the lower bound coming from
/// 0 ≤ g ≤ 2 and 0 ≤ h ≤ 6.
pub fn cmd_positivity(upto: u64) -> Result<VerificationReport, VerifyError> {
    if upto < 12 {
        return Err(VerifyError::Usage(format!("--upto {upto} must be at least 12")));
    }
    let mut rec = report::Recorder::new(format!("positivity --upto {upto}"));
    let dfao = rec.run("load_table2", |_| {
        let file = data::load(data::TABLE2).map_err(|e| e.to_string())?;
        data::parse_dfao(&file).map(|d| (file, d)).map_err(|e| e.to_string())
    });
    let Some((file, dfao)) = dfao else { return Ok(rec.finish()) };
    rec.input(&file.name, file.digest.clone());

    rec.run("dfao_positivity", |s| {
        let scan = scan_positivity(&dfao, upto);
        s.metric("min_d", scan.min_d.0);
        s.metric("min_d_at", scan.min_d.1);
        s.metric("min_d_over_n_plus_1", scan.min_ratio.0);
        s.metric("min_d_over_n_plus_1_at", scan.min_ratio.1);
        s.checked(upto);
        match scan.first_non_positive {
            Some(n) => Err(format!("d({n}) <= 0")),
            None => Ok(()),
        }
    });

    rec.run("auxiliary_bounds", |s| {
        let f = characteristic_series(&SetSpec::forbidden(), upto).map_err(|e| e.to_string())?;
        let (g, h) = gh_tables(&f);
        let two = BigInt::from(2);
        let six = BigInt::from(6);
        if let Some(n) = g.iter().position(|x| x.is_negative() || *x > two) {
            return Err(format!("g({n}) = {} outside [0, 2]", g[n]));
        }
        if let Some(n) = h.iter().position(|x| x.is_negative() || *x > six) {
            return Err(format!("h({n}) = {} outside [0, 6]", h[n]));
        }
        // d(n) = n+1 − 3⌊log₂(n+1)⌋ + 3 + 3g(n) − (h(n) − h(n−1)) for n ≥ 1.
        let e = dfao.eval_range(upto);
        for n in 1..=upto as usize {
            let via_gh = BigInt::from(main_term(n as u64) + 3) + 3 * &g[n] - (&h[n] - &h[n - 1]);
            if via_gh != BigInt::from(main_term(n as u64) + e[n]) {
                return Err(format!("d({n}) from g and h disagrees with the automaton"));
            }
            if via_gh < BigInt::from(main_term(n as u64) - 9) {
                return Err(format!("d({n}) = {via_gh} below n+1-3*floor(log2(n+1))-9"));
            }
        }
        s.checked(upto);
        Ok(())
    });

    rec.run("analytic_bound", |s| {
        let from3 = bound_positive_from(3, upto);
        let from9 = bound_positive_from(9, upto);
        s.metric("minus3_positive_from", from3);
        s.metric("minus9_positive_from", from9);
        s.checked(upto);
        if from3 > 12 {
            return Err(format!("n+1-3*floor(log2(n+1))-3 is not positive at n = {}", from3 - 1));
        }
        Ok(())
    });
    Ok(rec.finish())
}

fn parse_spec(spec: &str) -> Result<SetSpec, VerifyError> {
    Ok(spec.parse::<SetSpec>()?)
}

/// Coefficient-wise check of the F-power expansion of (1−X)A(X)ᵏ.
pub fn cmd_identity(k: usize, forbidden: &str, horizon: u64) -> Result<VerificationReport, VerifyError> {
    let spec = parse_spec(forbidden)?;
    let f = characteristic_series(&spec, horizon)?;
    let check = check_main_identity(k, &f, horizon as usize)?;
    let mut rec = report::Recorder::new(format!("identity --k {k} --forbidden {forbidden} --horizon {horizon}"));
    rec.run("identity", |s| {
        s.checked(check.horizon as u64);
        match &check.first_mismatch {
            None => Ok(()),
            Some(m) => {
                s.metric("first_mismatch", m.n);
                Err(format!("coefficient {} differs: lhs {} rhs {}", m.n, m.lhs, m.rhs))
            }
        }
    });
    Ok(rec.finish())
}

/// Observational run for an arbitrary forbidden set: growth exponent of F,
/// and from where on d(n) stays positive.
pub fn cmd_explore(k: usize, forbidden: &str, horizon: u64) -> Result<VerificationReport, VerifyError> {
    if k < 3 {
        return Err(VerifyError::Usage(format!("k = {k}, need k >= 3")));
    }
    let spec = parse_spec(forbidden)?;
    let f = characteristic_series(&spec, horizon)?;
    let mut rec = report::Recorder::new(format!("explore --k {k} --forbidden {forbidden} --horizon {horizon}"));
    rec.observe("growth", |s| {
        let g = growth_estimate(&f);
        s.metric("members", *g.partial_sums.last().unwrap_or(&0));
        s.metric("exponent", g.exponent.map_or(json!(null), |x| json!(x)));
        s.metric("fit_range", vec![g.fit_range.0, g.fit_range.1]);
        let below = g.exponent.map(|x| x < 1.0 / k as f64);
        s.metric("exponent_below_1_over_k", below.map_or(json!(null), |b| json!(b)));
    });
    rec.observe("differences", |s| {
        let table = rep_count_table(k, &f.complement());
        let d = difference_table(&table);
        let head: Vec<String> = d.iter().take(20).map(ToString::to_string).collect();
        s.metric("d_head", head);
        match check_eventually_increasing(&d, true) {
            Some(m) => s.metric("strictly_positive_from", m),
            None => s.metric("strictly_positive_from", json!(null)),
        }
        let min = d.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).map(|(n, x)| (n, x.to_i64()));
        if let Some((n, Some(x))) = min {
            s.metric("min_d", x);
            s.metric("min_d_at", n);
        }
        s.checked(horizon);
    });
    Ok(rec.finish())
}

/// Reads an automaton file for the `dfao` utilities.
pub fn read_dfao(path: &Path) -> Result<Dfao, VerifyError> {
    data::parse_dfao(&DataFile::read(path)?)
}

pub fn read_linrep(path: &Path) -> Result<LinearRepresentation, VerifyError> {
    data::parse_linrep(&DataFile::read(path)?)
}
