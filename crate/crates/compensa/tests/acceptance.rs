//! Acceptance run: one PASS/FAIL line per criterion, exact arithmetic.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use compensa::suite::{run_suite, Arithmetic, SuiteReport};
use compensa_core::cantor::{compensate_cantor, marginal, DyadicMeasure};
use compensa_core::scalar::{ratio, Rational};

struct Outcome {
    ok: bool,
    detail: String,
}

fn leaves(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(p, q)| ratio(p, q)).collect()
}

fn hand_trace() -> Outcome {
    let mu = DyadicMeasure::new(2, leaves(&[(2, 5), (-1, 10), (-3, 10), (1, 5)])).unwrap();
    let out = compensate_cantor(&mu);
    let expected = leaves(&[(1, 5), (0, 1), (0, 1), (0, 1)]);
    let coarse = marginal(&mu, 1).unwrap();
    let coarse_expected = leaves(&[(3, 10), (-1, 10)]);
    let coarse_out = compensate_cantor(&coarse);
    let ok = out.leaves() == expected.as_slice()
        && coarse.leaves() == coarse_expected.as_slice()
        && coarse_out.leaves() == leaves(&[(1, 5), (0, 1)]).as_slice()
        && marginal(&out, 1).unwrap().leaves() == coarse_out.leaves();
    let show = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    Outcome { ok, detail: format!("({}) and marginal ({})", show(out.leaves()), show(coarse_out.leaves())) }
}

fn suite(name: &str, cases: usize, seed: u64, depth: usize) -> impl Fn() -> Outcome + '_ {
    move || {
        let report: SuiteReport = run_suite(name, cases, seed, depth, Arithmetic::Rational).expect("known suite");
        let detail = match report.failures.first() {
            None => format!("{name}: {cases} cases, 0 failures"),
            Some(f) => format!(
                "{name}: {} of {cases} cases failed, first at case {}: {}",
                report.failures.len(),
                f.case,
                f.violation
            ),
        };
        Outcome { ok: report.passed(), detail }
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        ("hand trace", 1, Box::new(hand_trace)),
        ("cantor lemmas", 60, Box::new(suite("cantor-lemmas", 1000, 42, 8))),
        ("split bounds", 60, Box::new(suite("split-bounds", 1000, 3, 0))),
        ("functional repair", 60, Box::new(suite("functional-repair", 1000, 4, 0))),
        ("operator repair", 120, Box::new(suite("operator-repair", 231, 7, 0))),
        ("numerical index", 30, Box::new(suite("numerical-index", 100, 6, 0))),
        ("transfer", 30, Box::new(suite("transfer", 100, 7, 6))),
        ("closeness axioms", 10, Box::new(suite("closeness", 100, 8, 0))),
        ("agamma", 30, Box::new(suite("agamma", 100, 9, 0))),
        ("continuity probes", 30, Box::new(suite("continuity", 50, 10, 6))),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let ok = outcome.ok && in_time;
        all &= ok;
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s / {limit}s{}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over time" },
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
