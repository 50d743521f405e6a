//! One test per acceptance criterion. Each prints a single PASS/FAIL line to
//! the real stdout (not the captured test output) and then asserts.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use repcount::digit_automata::{compile_pattern, isomorphic, minimize_dfao, Dfao, DigitAlphabet};
use repcount::linrep::{minimize_linrep, rational, Rational};
use repcount::series_oracle::{
    characteristic_series, check_main_identity, difference_table, gh_tables, rep_count_table, SetSpec,
};
use repcount::verify::{self, data, PipelineOptions, PipelineRun};

const HORIZON: u64 = 1 << 16;

fn report(id: u32, name: &str, ok: bool, elapsed: Duration, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!("criterion {id} [{name}]: {verdict} ({} ms) {detail}\n", elapsed.as_millis());
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

struct Timed {
    run: PipelineRun,
    elapsed: Duration,
}

fn pipeline() -> &'static Timed {
    static RUN: OnceLock<Timed> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let run = verify::cmd_pipeline(&PipelineOptions { horizon: HORIZON, ..Default::default() });
        Timed { run, elapsed: start.elapsed() }
    })
}

fn table2() -> Dfao {
    data::parse_dfao(&data::load(data::TABLE2).unwrap()).unwrap()
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn criterion_1_table1() {
    let start = Instant::now();
    let a = characteristic_series(&SetSpec::forbidden().complement(), 17).unwrap();
    let table = rep_count_table(3, &a);
    let d = difference_table(&table);
    let elapsed = start.elapsed();
    let r_ok = table.counts() == ints(&[1, 3, 6, 7, 9, 12, 19, 21, 24, 27, 39, 45, 52, 57, 72, 79, 87, 93]).as_slice();
    let d_ok = d == ints(&[1, 2, 3, 1, 2, 3, 7, 2, 3, 3, 12, 6, 7, 5, 15, 7, 8, 6]);
    let ok = r_ok && d_ok && elapsed < Duration::from_secs(1);
    report(1, "Table 1", ok, elapsed, &format!("r row {r_ok}, d row {d_ok}, n <= 17"));
}

#[test]
fn criterion_2_identity() {
    let start = Instant::now();
    let f = characteristic_series(&SetSpec::forbidden(), 2000).unwrap();
    let mut failures = Vec::new();
    for k in 3..=5 {
        let check = check_main_identity(k, &f, 2000).unwrap();
        if let Some(m) = check.first_mismatch {
            failures.push(format!("k = {k} at n = {}", m.n));
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(10);
    report(2, "main identity", ok, elapsed, &format!("k in 3..=5, n <= 2000, mismatches {failures:?}"));
}

#[test]
fn criterion_3_minimal_rank() {
    let t = pipeline();
    let start = Instant::now();
    let minimized = t.run.artifacts.minimized.as_ref().expect("pipeline produced a minimized representation");
    let published = data::parse_linrep(&data::load(data::PUBLISHED_LINREP).unwrap()).unwrap();
    let agree = minimized.eval_range(HORIZON) == published.eval_range(HORIZON);
    let ok = minimized.rank() == 10 && agree;
    let detail = format!(
        "rank {} (published {}), evaluations agree for n <= {HORIZON}: {agree}",
        minimized.rank(),
        published.rank()
    );
    report(3, "minimal rank", ok, t.elapsed + start.elapsed(), &detail);
}

#[test]
fn criterion_4_dfao_states() {
    let t = pipeline();
    let start = Instant::now();
    let raw = t.run.artifacts.raw_dfao.as_ref().expect("pipeline produced a DFAO");
    let min = minimize_dfao(raw);
    let iso = isomorphic(&min, &table2());
    let ok = min.num_states() == 28 && iso;
    let detail = format!(
        "{} states before minimization (report only), {} after, isomorphic to Table 2: {iso}",
        raw.num_states(),
        min.num_states()
    );
    report(4, "DFAO states", ok, t.elapsed + start.elapsed(), &detail);
}

#[test]
fn criterion_5_formula() {
    let t = pipeline();
    let start = Instant::now();
    let dfao = t.run.artifacts.dfao.as_ref().expect("pipeline produced a minimized DFAO");
    let (_, d) = verify::oracle_counts(HORIZON);
    let e = dfao.eval_range(HORIZON);
    let bad = (0..=HORIZON).find(|&n| d[n as usize] != BigInt::from(verify::main_term(n) + e[n as usize]));
    let elapsed = t.elapsed + start.elapsed();
    let ok = bad.is_none() && elapsed < Duration::from_secs(60);
    report(5, "formula check", ok, elapsed, &format!("n <= {HORIZON}, first mismatch {bad:?}"));
}

#[test]
fn criterion_6_positivity() {
    let upto = 1_000_000;
    let start = Instant::now();
    let scan = verify::scan_positivity(&table2(), upto);
    let minus9 = verify::bound_positive_from(9, upto);
    let minus3 = verify::bound_positive_from(3, upto);
    let elapsed = start.elapsed();
    let dfao_ok = scan.first_non_positive.is_none();
    let bound_ok = minus9 <= 12;
    let ok = dfao_ok && bound_ok && elapsed < Duration::from_secs(60);
    let detail = format!(
        "d(n) > 0 for n <= {upto}: {dfao_ok}; n+1-3*floor(log2(n+1))-9 > 0 on [12, {upto}]: {bound_ok} \
         (positive only from n = {minus9}; with -3 instead of -9 positive from n = {minus3})"
    );
    report(6, "positivity", ok, elapsed, &detail);
}

#[test]
fn criterion_7_auxiliary_bounds() {
    let start = Instant::now();
    let f = characteristic_series(&SetSpec::forbidden(), 100_000).unwrap();
    let (g, h) = gh_tables(&f);
    let g_bad = g.iter().position(|x| x.is_negative() || *x > BigInt::from(2));
    let h_bad = h.iter().position(|x| x.is_negative() || *x > BigInt::from(6));
    let elapsed = start.elapsed();
    let ok = g_bad.is_none() && h_bad.is_none() && elapsed < Duration::from_secs(5);
    report(7, "auxiliary bounds", ok, elapsed, &format!("n <= 100000, g violation {g_bad:?}, h violation {h_bad:?}"));
}

#[test]
fn criterion_8_pattern() {
    let start = Instant::now();
    let dfa = compile_pattern("0*(11)1*", DigitAlphabet::unary(2)).unwrap();
    let bad = (0..=1u64 << 20).find(|&n| dfa.accepts_number(n) != (n >= 3 && (n + 1).is_power_of_two()));
    report(8, "pattern", bad.is_none(), start.elapsed(), &format!("n <= 2^20, first misclassified {bad:?}"));
}

fn arb_dfao() -> impl Strategy<Value = Dfao> {
    (1usize..8).prop_flat_map(|n| {
        (prop::collection::vec(0..n, 2 * n), prop::collection::vec(-2i64..3, n)).prop_map(
            move |(mut delta, outputs)| {
                delta[0] = 0;
                Dfao::new(DigitAlphabet::unary(2), 0, delta, outputs).unwrap()
            },
        )
    })
}

#[test]
fn criterion_9_property_suites() {
    let t = pipeline();
    let start = Instant::now();
    let mut failures: Vec<String> = Vec::new();

    // DFAO minimization idempotence on random automata and on the pipeline output.
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let idem = runner.run(&arb_dfao(), |d| {
        let m = minimize_dfao(&d);
        prop_assert_eq!(minimize_dfao(&m), m.clone());
        prop_assert_eq!(m.eval_range(1 << 10), d.eval_range(1 << 10));
        Ok(())
    });
    if let Err(e) = idem {
        failures.push(format!("DFAO idempotence: {e}"));
    }
    let dfao = t.run.artifacts.dfao.as_ref().unwrap();
    if minimize_dfao(dfao) != *dfao {
        failures.push("pipeline DFAO is not a minimization fixed point".into());
    }
    if minimize_dfao(&table2()).num_states() != 28 {
        failures.push("Table 2 is not a minimization fixed point".into());
    }

    // Representation minimization idempotence and leading-zero invariance.
    let art = &t.run.artifacts;
    let minimized = art.minimized.as_ref().unwrap();
    if minimize_linrep(minimized) != *minimized {
        failures.push("representation minimization is not idempotent".into());
    }
    let mut reps: Vec<(&str, _)> = art.components.iter().map(|(n, lr)| (n.as_str(), lr)).collect();
    reps.push(("combined", art.combined.as_ref().unwrap()));
    reps.push(("minimized", minimized));
    for (name, lr) in &reps {
        if !lr.is_leading_zero_invariant() {
            failures.push(format!("{name} violates v*gamma(0) = v"));
        }
    }

    // Oracle against the triple-sum representations.
    let (r, _) = verify::oracle_counts(HORIZON);
    let expected: Vec<Rational> = r.iter().cloned().map(Rational::from_integer).collect();
    let shifted: Vec<Rational> =
        std::iter::once(rational(0)).chain(expected.iter().cloned()).take(expected.len()).collect();
    if art.components[0].1.eval_range(HORIZON) != expected {
        failures.push("r(3,A,n) representation disagrees with the oracle".into());
    }
    if art.components[1].1.eval_range(HORIZON) != shifted {
        failures.push("r(3,A,n-1) representation disagrees with the oracle".into());
    }

    // DFAO against the representation it came from.
    let raw = art.raw_dfao.as_ref().unwrap();
    let values: Vec<Rational> = raw.eval_range(HORIZON).into_iter().map(rational).collect();
    if values != minimized.eval_range(HORIZON) {
        failures.push("semigroup DFAO disagrees with its representation".into());
    }

    let detail = format!("n <= {HORIZON}, failures {failures:?}");
    report(9, "property suites", failures.is_empty(), t.elapsed + start.elapsed(), &detail);
}
