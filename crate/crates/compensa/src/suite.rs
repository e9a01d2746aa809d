//! Named verification suites over seeded random instances.
//!
//! Each suite draws one input per case from a ChaCha stream keyed by
//! `(seed, case)`, checks it, and records failing inputs in their JSON form
//! so that [`replay`] can re-run the exact check later.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use compensa_core::agamma::{
    agamma_compensate, check_field_compensation, continuity_along_tail, Site,
};
use compensa_core::cantor::{
    compensate_cantor, continuity_probe, marginal, stage_trace, stages_monotone, CantorCompensation,
    DyadicMeasure,
};
use compensa_core::closeness::{axioms_check, DerivedCloseness, MetricCloseness};
use compensa_core::compensator::SingleCompensation;
use compensa_core::functional::{
    attainment_gap, basiclemma_check, bpb_repair_functional, default_delta, hahn_compatible,
    round_function, support_contained,
};
use compensa_core::measure::{
    attainment_mass, check_compensation, compensate_single, AtomicMeasure, GridFunction,
};
use compensa_core::operator::{
    bpb_repair_operator, make_near_attaining, numerical_radius_bruteforce, operator_norm,
    OperatorTable,
};
use compensa_core::quotient::{
    dyadic_coarsening, transfer_compensation, validate_rao, QuotientSpec,
};
use compensa_core::sample;
use compensa_core::scalar::{self, ratio, Approx, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::format::{
    FieldDoc, FunctionDoc, MeasureDoc, Num, OperatorDoc, QuotientDoc, SpaceDoc, TriplesDoc,
};

/// Bound on random numerators and denominators inside the suites.
const BOUND: i64 = 1000;

/// Which scalar the checks run over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Rational,
    Float,
}

/// One failing case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub case: usize,
    pub input: serde_json::Value,
    pub violation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub seed: u64,
    pub depth: usize,
    pub arithmetic: Arithmetic,
    /// Sorted by case index.
    pub failures: Vec<Failure>,
    /// Not serialized, so that reports of equal runs are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Names accepted by [`run_suite`], in running order for `all`.
pub const SUITES: [&str; 10] = [
    "compensation",
    "cantor-lemmas",
    "split-bounds",
    "functional-repair",
    "operator-repair",
    "numerical-index",
    "transfer",
    "closeness",
    "agamma",
    "continuity",
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    Unknown(String),
    #[error("malformed replay input: {0}")]
    Input(#[from] serde_json::Error),
}

type Check = std::result::Result<(), String>;

trait Suite {
    type Input: Serialize + DeserializeOwned;

    fn generate(rng: &mut ChaCha8Rng, case: usize, depth: usize) -> Self::Input;

    fn check<S: Scalar>(input: &Self::Input) -> Check;
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<S: Scalar>(x: &Rational) -> S {
    S::from_rational(x)
}

fn atomic<S: Scalar>(doc: &MeasureDoc) -> std::result::Result<AtomicMeasure<S>, String> {
    let m = doc.clone().parse().map_err(|e| e.to_string())?;
    Ok(m.to_atomic().convert(lift))
}

fn dyadic<S: Scalar>(doc: &MeasureDoc) -> std::result::Result<DyadicMeasure<S>, String> {
    match doc.clone().parse().map_err(|e| e.to_string())? {
        crate::format::Measure::Dyadic(m) => Ok(m.convert(lift)),
        crate::format::Measure::Atomic(_) => Err("expected a dyadic measure".into()),
    }
}

fn function<S: Scalar>(doc: &FunctionDoc) -> std::result::Result<GridFunction<S>, String> {
    Ok(doc.clone().parse().map_err(|e| e.to_string())?.convert(lift))
}

fn operator<S: Scalar>(doc: &OperatorDoc) -> std::result::Result<OperatorTable<S>, String> {
    Ok(doc.clone().parse().map_err(|e| e.to_string())?.convert(lift))
}

fn fmt_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn signs(n: usize) -> Vec<Vec<i64>> {
    (0..3usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let s = (code % 3) as i64 - 1;
                    code /= 3;
                    s
                })
                .collect()
        })
        .collect()
}

fn eps_for(case: usize) -> Rational {
    [ratio(1, 4), ratio(1, 2), ratio(3, 4)][case % 3].clone()
}

// ---------------------------------------------------------------------------

struct CompensationSuite;

#[derive(Serialize, Deserialize)]
struct MeasureAndFunction {
    mu: MeasureDoc,
    f: FunctionDoc,
}

impl Suite for CompensationSuite {
    type Input = MeasureAndFunction;

    fn generate(rng: &mut ChaCha8Rng, _case: usize, _depth: usize) -> Self::Input {
        let n = rng.gen_range(1..=8);
        let mut values: Vec<Rational> = (0..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => ratio(1, 1),
                1 => ratio(-1, 1),
                2 => ratio(0, 1),
                _ => sample::unit_interval(rng, BOUND),
            })
            .collect();
        values[0] = ratio(1, 1);
        let mut mu = sample::measure(rng, n, BOUND);
        if rng.gen_bool(0.5) {
            // put μ on the attaining set with matching signs
            let w = mu
                .weights()
                .iter()
                .zip(&values)
                .map(|(w, v)| if v.abs() == ratio(1, 1) { w.abs() * v.clone() } else { ratio(0, 1) })
                .collect();
            mu = AtomicMeasure::new(sample::labels(n), w).expect("labels");
        }
        if mu.is_zero() {
            mu = AtomicMeasure::dirac(sample::labels(n), &"0".to_string()).expect("labels");
        }
        let mu = mu.scale(&(ratio(1, 1) / mu.variation_norm()));
        let f = GridFunction::new(sample::labels(n), values).expect("labels");
        MeasureAndFunction { mu: (&mu).into(), f: (&f).into() }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let mu = atomic::<S>(&input.mu)?;
        let f = function::<S>(&input.f)?;
        let nu = compensate_single(&mu);
        check_compensation(&nu, &mu).map_err(|d| format!("not a compensation: {d:?}"))?;
        let bound = S::from_ratio(2, 1) * mu.negative_part().variation_norm();
        let dist = mu.distance(&nu).map_err(fmt_err)?;
        ensure(dist <= bound, || format!("‖μ − ξ(μ)‖ = {dist} > 2‖μ⁻‖ = {bound}"))?;
        ensure(nu.variation_norm() <= mu.variation_norm(), || "‖ξ(μ)‖ > ‖μ‖".into())?;
        let attained = mu.pairing(&f).map_err(fmt_err)? == S::one();
        let mass = attainment_mass(&f, &mu).map_err(fmt_err)?;
        ensure(attained == (mass == S::one()), || {
            format!("μ(f) = 1 is {attained} but the attaining mass is {mass}")
        })
    }
}

// ---------------------------------------------------------------------------

struct CantorSuite;

#[derive(Serialize, Deserialize)]
struct DyadicInput {
    mu: MeasureDoc,
}

impl Suite for CantorSuite {
    type Input = DyadicInput;

    fn generate(rng: &mut ChaCha8Rng, case: usize, depth: usize) -> Self::Input {
        let d = case % (depth + 1);
        DyadicInput { mu: (&sample::dyadic(rng, d, BOUND)).into() }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let mu = dyadic::<S>(&input.mu)?;
        let depth = mu.depth();
        let out = compensate_cantor(&mu);
        check_compensation(&out.to_atomic(), &mu.to_atomic())
            .map_err(|d| format!("not a compensation: {d:?}"))?;
        for m in 0..=depth {
            let coarse = marginal(&mu, m).map_err(fmt_err)?;
            let lhs = marginal(&out, m).map_err(fmt_err)?;
            ensure(lhs == compensate_cantor(&coarse), || {
                format!("depth-{m} marginal of ξ(μ) differs from ξ of the marginal")
            })?;
        }
        let total = mu.total_mass();
        if total.is_negative() {
            return ensure(out.leaves().iter().all(|x| x.is_zero()), || {
                "negative total mass but non-zero output".into()
            });
        }
        let trace = stage_trace(&mu).map_err(fmt_err)?;
        for (k, stage) in trace.stages.iter().enumerate() {
            let sum = stage.iter().cloned().fold(S::zero(), |a, b| a + b);
            ensure(sum == total, || format!("stage {k} has mass {sum}, expected {total}"))?;
            if k >= 1 {
                for (b, block) in stage.chunks(1 << k).enumerate() {
                    let pos = block.iter().all(|x| !x.is_negative());
                    let neg = block.iter().all(|x| !x.is_positive());
                    ensure(pos || neg, || format!("stage {k} block {b} changes sign"))?;
                }
            }
        }
        ensure(stages_monotone(&trace), || "stage magnitudes increase".into())?;
        for (i, (m, t)) in mu.leaves().iter().zip(out.leaves()).enumerate() {
            let cap = scalar::max(m.clone(), S::zero());
            ensure(!t.is_negative() && *t <= cap, || format!("leaf {i}: {t} outside [0, max({m}, 0)]"))?;
        }
        let mut leaves = mu.leaves().to_vec();
        let last = leaves.len() - 1;
        leaves[last] = leaves[last].clone() - total;
        let zero_total = DyadicMeasure::new(depth, leaves).map_err(fmt_err)?;
        ensure(compensate_cantor(&zero_total).leaves().iter().all(|x| x.is_zero()), || {
            "zero total mass but non-zero output".into()
        })
    }
}

// ---------------------------------------------------------------------------

struct SplitSuite;

#[derive(Serialize, Deserialize)]
struct SplitInput {
    f: FunctionDoc,
    mu: MeasureDoc,
    sigma: Num,
    eps: Num,
}

impl Suite for SplitSuite {
    type Input = SplitInput;

    fn generate(rng: &mut ChaCha8Rng, _case: usize, _depth: usize) -> Self::Input {
        let n = rng.gen_range(1..=20);
        let f = sample::function(rng, n, BOUND);
        let mu = sample::measure(rng, n, BOUND);
        let norm = mu.variation_norm();
        let mu = if norm > ratio(1, 1) { mu.scale(&(ratio(1, 1) / norm)) } else { mu };
        let eps = ratio(rng.gen_range(2..=99), 100);
        let sigma = eps.clone() * ratio(rng.gen_range(1..=99), 100);
        SplitInput { f: (&f).into(), mu: (&mu).into(), sigma: Num(sigma), eps: Num(eps) }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let f = function::<S>(&input.f)?;
        let mu = atomic::<S>(&input.mu)?;
        let bounds = basiclemma_check(&f, &mu, &lift(&input.sigma.0), &lift(&input.eps.0)).map_err(fmt_err)?;
        match bounds.checks.iter().find(|c| !c.holds()) {
            None => Ok(()),
            Some(c) => Err(format!("{}: {} {:?} {}", c.label, c.lhs, c.relation, c.rhs)),
        }
    }
}

// ---------------------------------------------------------------------------

struct FunctionalSuite;

#[derive(Serialize, Deserialize)]
struct RepairInput {
    f: FunctionDoc,
    mu: MeasureDoc,
    eps: Num,
}

impl Suite for FunctionalSuite {
    type Input = RepairInput;

    fn generate(rng: &mut ChaCha8Rng, case: usize, _depth: usize) -> Self::Input {
        let n = rng.gen_range(1..=12);
        let eps = if case % 4 == 3 { ratio(rng.gen_range(1..=99), 100) } else { eps_for(case) };
        let (f, mu) = sample::near_attaining_pair(rng, n, &eps, BOUND);
        RepairInput { f: (&f).into(), mu: (&mu).into(), eps: Num(eps) }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let f = function::<S>(&input.f)?;
        let mu = atomic::<S>(&input.mu)?;
        let eps: S = lift(&input.eps.0);
        ensure(mu.pairing(&f).map_err(fmt_err)? >= S::one() - attainment_gap(&eps), || {
            "input pairs below 1 − ε²/6".into()
        })?;
        let r = bpb_repair_functional(&f, &mu, &eps, None).map_err(fmt_err)?;
        ensure(r.pairing == S::one(), || format!("μ₀(f₀) = {}", r.pairing))?;
        ensure(r.f_distance <= eps, || format!("‖f − f₀‖ = {}", r.f_distance))?;
        ensure(r.mu_distance <= eps, || format!("‖μ − μ₀‖ = {}", r.mu_distance))?;
        ensure(hahn_compatible(&mu, &r.mu0), || "Hahn decomposition of μ does not fit μ₀".into())?;
        ensure(support_contained(&mu, &r.mu0), || "supp μ₀ ⊄ supp μ".into())?;
        let n = f.len();
        if n <= 4 {
            let f0 = round_function(&f, &eps, &default_delta(&eps)).map_err(fmt_err)?;
            for pattern in signs(n) {
                let k = pattern.iter().filter(|s| **s != 0).count() as i64;
                if k == 0 {
                    continue;
                }
                let w = pattern.iter().map(|&s| S::from_ratio(s, k)).collect();
                let nu = AtomicMeasure::new(f.points().to_vec(), w).map_err(fmt_err)?;
                if nu.pairing(&f).map_err(fmt_err)? == S::one() {
                    ensure(nu.pairing(&f0).map_err(fmt_err)? == S::one(), || {
                        format!("sign pattern {pattern:?} attains on f but not on f₀")
                    })?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

struct OperatorSuite;

#[derive(Serialize, Deserialize)]
struct OperatorInput {
    t: OperatorDoc,
    f: FunctionDoc,
    mu: MeasureDoc,
    eps: Num,
}

impl Suite for OperatorSuite {
    type Input = OperatorInput;

    fn generate(rng: &mut ChaCha8Rng, case: usize, _depth: usize) -> Self::Input {
        let size = 2 + case % 11;
        let eps = eps_for(case / 11);
        let inst = make_near_attaining(rng.gen(), size, &eps);
        OperatorInput { t: (&inst.t).into(), f: (&inst.f).into(), mu: (&inst.mu).into(), eps: Num(eps) }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let t = operator::<S>(&input.t)?;
        let f = function::<S>(&input.f)?;
        let mu = atomic::<S>(&input.mu)?;
        let eps: S = lift(&input.eps.0);
        let r = bpb_repair_operator(&t, &f, &mu, &eps).map_err(fmt_err)?;
        let c = &r.certificates;
        ensure(c.hold(&eps), || format!("certificates fail: {c:?}"))?;
        ensure(r.mu0.pairing(&f).map_err(fmt_err)? == S::one(), || "μ₀(f) ≠ 1".into())?;
        ensure(r.t0.rows().iter().all(|row| row.variation_norm() <= S::one()), || {
            "a blended row left the unit ball".into()
        })?;
        if t.len() <= 6 {
            let radius = numerical_radius_bruteforce(&r.t0).map_err(fmt_err)?;
            ensure(radius == S::one(), || format!("brute-force ν(T₀) = {radius}"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

struct IndexSuite;

#[derive(Serialize, Deserialize)]
struct TableInput {
    t: OperatorDoc,
}

impl Suite for IndexSuite {
    type Input = TableInput;

    fn generate(rng: &mut ChaCha8Rng, _case: usize, _depth: usize) -> Self::Input {
        let n = rng.gen_range(1..=4);
        let rows = (0..n).map(|_| sample::measure(rng, n, BOUND).weights().to_vec()).collect();
        let t = OperatorTable::new(sample::labels(n), rows).expect("square table");
        TableInput { t: (&t).into() }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let t = operator::<S>(&input.t)?;
        let radius = numerical_radius_bruteforce(&t).map_err(fmt_err)?;
        let norm = operator_norm(&t);
        ensure(radius == norm, || format!("ν(T) = {radius} but ‖T‖ = {norm}"))
    }
}

// ---------------------------------------------------------------------------

struct TransferSuite;

#[derive(Serialize, Deserialize)]
struct TransferInput {
    quotient: QuotientDoc,
    mu: MeasureDoc,
    /// A depth-`depth` dyadic measure and fiber weights for its truncation
    /// to depth `coarse`, listed in leaf order.
    fine_depth: usize,
    coarse: MeasureDoc,
    fiber_weights: Vec<Num>,
}

fn quotient<S: Scalar>(doc: &QuotientDoc) -> std::result::Result<QuotientSpec<S>, String> {
    Ok(doc.clone().parse().map_err(fmt_err)?.convert(lift))
}

impl Suite for TransferSuite {
    type Input = TransferInput;

    fn generate(rng: &mut ChaCha8Rng, _case: usize, depth: usize) -> Self::Input {
        let (fine, coarse) = (rng.gen_range(1..=12), rng.gen_range(1..=6));
        let q = sample::quotient(rng, fine, coarse, 100);
        let mu = sample::measure(rng, q.target().len(), BOUND);
        let mu = AtomicMeasure::new(q.target().to_vec(), mu.weights().to_vec()).expect("labels");
        let n = rng.gen_range(1..=depth.clamp(1, 7));
        let m = rng.gen_range(0..n);
        let coarse = sample::dyadic_nonnegative(rng, m, BOUND);
        let raw: Vec<i64> = (0..1usize << n).map(|_| rng.gen_range(0..=5)).collect();
        let block = 1usize << (n - m);
        let weights = raw
            .chunks(block)
            .flat_map(|c| {
                let s: i64 = c.iter().sum();
                c.iter()
                    .map(move |&w| if s == 0 { ratio(1, block as i64) } else { ratio(w, s) })
                    .collect::<Vec<_>>()
            })
            .map(Num)
            .collect();
        TransferInput {
            quotient: (&q).into(),
            mu: (&mu).into(),
            fine_depth: n,
            coarse: (&coarse).into(),
            fiber_weights: weights,
        }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let q = quotient::<S>(&input.quotient)?;
        let report = validate_rao(&q);
        ensure(report.is_valid(), || format!("invalid quotient: {:?}", report.violations))?;
        let mu = atomic::<S>(&input.mu)?.reindexed(q.target()).map_err(fmt_err)?;
        let nu = transfer_compensation(&q, &SingleCompensation, &mu).map_err(fmt_err)?;
        check_compensation(&nu, &mu).map_err(|d| format!("transfer is not a compensation: {d:?}"))?;

        let coarse = dyadic::<S>(&input.coarse)?;
        let direct = compensate_cantor(&coarse).to_atomic();
        let weights = input.fiber_weights.iter().map(|w| lift(&w.0)).collect();
        let q = dyadic_coarsening::<S>(input.fine_depth, coarse.depth())
            .and_then(|q| q.reweighted(weights))
            .map_err(fmt_err)?;
        let via = transfer_compensation(&q, &CantorCompensation, &coarse.to_atomic()).map_err(fmt_err)?;
        ensure(via == direct, || "coarsening transfer differs from direct compensation".into())
    }
}

// ---------------------------------------------------------------------------

struct ClosenessSuite;

#[derive(Serialize, Deserialize)]
struct ClosenessInput {
    space: SpaceDoc,
    triples: TriplesDoc,
}

/// Triples evaluated per case and per closeness function.
pub const TRIPLES_PER_CASE: usize = 10;

impl Suite for ClosenessSuite {
    type Input = ClosenessInput;

    fn generate(rng: &mut ChaCha8Rng, _case: usize, _depth: usize) -> Self::Input {
        let n = rng.gen_range(2..=10);
        let space = sample::metric(rng, n, BOUND);
        let triples = sample::triples(rng, space.points(), TRIPLES_PER_CASE)
            .into_iter()
            .map(|(x, y, z)| [x, y, z])
            .collect();
        ClosenessInput { space: (&space).into(), triples }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let space = input.space.clone().parse().map_err(fmt_err)?.convert(lift::<S>);
        let triples: Vec<(String, String, String)> =
            input.triples.iter().map(|[x, y, z]| (x.clone(), y.clone(), z.clone())).collect();
        let metric = axioms_check(&MetricCloseness(&space), &triples);
        ensure(metric.passed(), || format!("metric closeness: {:?}", metric.violations))?;
        let derived = DerivedCloseness { points: space.points(), xi: &SingleCompensation };
        let derived = axioms_check::<S, _, _>(&derived, &triples);
        ensure(derived.passed(), || format!("derived closeness: {:?}", derived.violations))
    }
}

// ---------------------------------------------------------------------------

struct AgammaSuite;

#[derive(Serialize, Deserialize)]
struct FieldInput {
    field: FieldDoc,
}

impl Suite for AgammaSuite {
    type Input = FieldInput;

    fn generate(rng: &mut ChaCha8Rng, case: usize, _depth: usize) -> Self::Input {
        let window = rng.gen_range(4..=12);
        let mut field = sample::field(rng, window, 100);
        if case.is_multiple_of(10) {
            field = compensa_core::agamma::FiniteField::new(
                field.f_infinity().clone(),
                BTreeMap::new(),
                Some(field.window()),
            )
            .expect("same window");
        }
        FieldInput { field: (&field).into() }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let field = input.field.clone().parse().map_err(fmt_err)?.convert(lift::<S>);
        let xi = agamma_compensate(&field).map_err(fmt_err)?;
        let probe: Vec<u64> = (0..field.window() + 8).collect();
        let mut sites: Vec<Site> = probe.iter().copied().map(Site::Gamma).collect();
        sites.push(Site::Infinity);
        let defects = check_field_compensation(&field, &xi, &sites);
        ensure(defects.is_empty(), || format!("not a compensation at {defects:?}"))?;
        let tail = continuity_along_tail(&field, &xi, &probe);
        ensure(tail.passed(), || format!("tail: {:?}", tail.violations))?;
        if let Some(sets) = &xi.sets {
            let at_inf = xi.xi_infinity.mass_at(&Site::Infinity);
            for &t in &sets.rescaled {
                let ft = field.value_at(Site::Gamma(t));
                let got = xi.value_at(Site::Gamma(t)).total_mass();
                ensure(got == ft.total_mass(), || format!("ξ(g{t})(K) = {got} ≠ F(g{t})(K)"))?;
                let off = ft.positive_part().mass_where(|s| match s {
                    Site::Gamma(k) => !sets.gamma0.contains(k),
                    Site::Infinity => true,
                });
                let factor = at_inf.clone() / off;
                ensure(!factor.is_negative() && factor <= S::one(), || {
                    format!("rescaling factor {factor} at g{t}")
                })?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

struct ContinuitySuite;

#[derive(Serialize, Deserialize)]
struct ProbeInput {
    mu: MeasureDoc,
    direction: MeasureDoc,
    steps: u64,
    /// Whether `mu` was built with a vanishing half-block sum.
    sibling_zero: bool,
}

/// Probe steps used by the continuity suite.
pub const PROBE_STEPS: u64 = 4;

impl Suite for ContinuitySuite {
    type Input = ProbeInput;

    fn generate(rng: &mut ChaCha8Rng, case: usize, depth: usize) -> Self::Input {
        let sibling_zero = case.is_multiple_of(2) && depth >= 2;
        let d = if sibling_zero { rng.gen_range(2..=depth.min(8)) } else { rng.gen_range(1..=depth.clamp(1, 8)) };
        let mu = sample::dyadic_nonnegative(rng, d, 100);
        let mut leaves = mu.leaves().to_vec();
        if sibling_zero {
            // zero one half of a block of size ≥ 4, keeping the total
            let k = rng.gen_range(2..=d);
            let block = 1usize << k;
            let start = rng.gen_range(0..leaves.len() / block) * block;
            let (lo, hi) = if rng.gen_bool(0.5) { (start, start + block / 2) } else { (start + block / 2, start + block) };
            let s: Rational = leaves[lo..hi].iter().cloned().fold(ratio(0, 1), |a, b| a + b);
            leaves[lo] = leaves[lo].clone() - s.clone();
            let other = if lo == start { start + block / 2 } else { start };
            leaves[other] = leaves[other].clone() + s;
        }
        let mu = DyadicMeasure::new(d, leaves).expect("same depth");
        let dir = sample::dyadic(rng, d, 100);
        let mut dir_leaves = dir.leaves().to_vec();
        let slack = mu.total_mass() + dir.total_mass();
        if slack.is_negative() {
            dir_leaves[0] = dir_leaves[0].clone() - slack;
        }
        let dir = DyadicMeasure::new(d, dir_leaves).expect("same depth");
        ProbeInput { mu: (&mu).into(), direction: (&dir).into(), steps: PROBE_STEPS, sibling_zero }
    }

    fn check<S: Scalar>(input: &Self::Input) -> Check {
        let mu = dyadic::<S>(&input.mu)?;
        let dir = dyadic::<S>(&input.direction)?;
        let report = continuity_probe(&mu, &dir, input.steps).map_err(fmt_err)?;
        ensure(report.is_vanishing(), || format!("deviations do not die out: {:?}", report.tail))?;
        ensure(report.domination_violations.is_empty(), || {
            format!("domination fails: {:?}", report.domination_violations)
        })?;
        ensure(report.monotonicity_violations.is_empty(), || {
            format!("stage magnitudes increase at probes {:?}", report.monotonicity_violations)
        })?;
        ensure(!input.sibling_zero || report.domination_checks > 0, || {
            "no zero half-block was exercised".into()
        })
    }
}

// ---------------------------------------------------------------------------

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

fn check_as<T: Suite>(input: &T::Input, arithmetic: Arithmetic) -> Check {
    match arithmetic {
        Arithmetic::Rational => T::check::<Rational>(input),
        Arithmetic::Float => T::check::<Approx>(input),
    }
}

fn run<T: Suite>(name: &str, cases: usize, seed: u64, depth: usize, arithmetic: Arithmetic) -> SuiteReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    for case in 0..cases {
        let input = T::generate(&mut case_rng(seed, case), case, depth);
        if let Err(violation) = check_as::<T>(&input, arithmetic) {
            failures.push(Failure {
                case,
                input: serde_json::to_value(&input).expect("inputs serialize"),
                violation,
            });
        }
    }
    SuiteReport {
        suite: name.to_string(),
        cases,
        seed,
        depth,
        arithmetic,
        failures,
        wall_time: start.elapsed(),
    }
}

fn replay_as<T: Suite>(input: &serde_json::Value, arithmetic: Arithmetic) -> Result<Check, SuiteError> {
    let input: T::Input = serde_json::from_value(input.clone())?;
    Ok(check_as::<T>(&input, arithmetic))
}

macro_rules! dispatch {
    ($name:expr, $f:ident ( $($arg:expr),* )) => {
        match $name {
            "compensation" => Ok($f::<CompensationSuite>($($arg),*)),
            "cantor-lemmas" => Ok($f::<CantorSuite>($($arg),*)),
            "split-bounds" => Ok($f::<SplitSuite>($($arg),*)),
            "functional-repair" => Ok($f::<FunctionalSuite>($($arg),*)),
            "operator-repair" => Ok($f::<OperatorSuite>($($arg),*)),
            "numerical-index" => Ok($f::<IndexSuite>($($arg),*)),
            "transfer" => Ok($f::<TransferSuite>($($arg),*)),
            "closeness" => Ok($f::<ClosenessSuite>($($arg),*)),
            "agamma" => Ok($f::<AgammaSuite>($($arg),*)),
            "continuity" => Ok($f::<ContinuitySuite>($($arg),*)),
            other => Err(SuiteError::Unknown(other.to_string())),
        }
    };
}

/// Runs `cases` seeded cases of the named suite. `depth` bounds the dyadic
/// depth of the Cantor, transfer and continuity suites.
pub fn run_suite(
    name: &str,
    cases: usize,
    seed: u64,
    depth: usize,
    arithmetic: Arithmetic,
) -> Result<SuiteReport, SuiteError> {
    dispatch!(name, run(name, cases, seed, depth, arithmetic))
}

/// Re-runs the check of `suite` on a recorded failing input.
pub fn replay(suite: &str, input: &serde_json::Value, arithmetic: Arithmetic) -> Result<Check, SuiteError> {
    dispatch!(suite, replay_as(input, arithmetic))?
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_runs() {
        for name in SUITES {
            let report = run_suite(name, 6, 3, 3, Arithmetic::Rational).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.failures);
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 1, 0, 0, Arithmetic::Rational), Err(SuiteError::Unknown(_))));
    }

    #[test]
    fn depth_zero_cantor() {
        let report = run_suite("cantor-lemmas", 10, 1, 0, Arithmetic::Rational).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn replay_reproduces_a_violation() {
        let mut input = serde_json::to_value(SplitSuite::generate(&mut case_rng(0, 0), 0, 0)).unwrap();
        input["sigma"] = serde_json::json!("2");
        let first = replay("split-bounds", &input, Arithmetic::Rational).unwrap();
        assert!(first.is_err());
        assert_eq!(first, replay("split-bounds", &input, Arithmetic::Rational).unwrap());
    }
}
