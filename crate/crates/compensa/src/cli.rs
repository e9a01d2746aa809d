//! The `compensa` command line.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compensa_core::agamma::{agamma_compensate, FieldCompensation, Site};
use compensa_core::cantor::{compensate_cantor, CantorCompensation, DyadicMeasure};
use compensa_core::closeness::{axioms_check, AxiomReport, Closeness, DerivedCloseness, MetricCloseness};
use compensa_core::compensator::{Compensator, SingleCompensation};
use compensa_core::error::Error as CoreError;
use compensa_core::functional::{bpb_repair_functional, hahn_compatible, support_contained};
use compensa_core::measure::{compensate_single, AtomicMeasure, GridFunction, Label};
use compensa_core::operator::{bpb_repair_operator, gate_self_test, OperatorTable};
use compensa_core::quotient::transfer_compensation;
use compensa_core::scalar::{self, Approx, Rational, Scalar};
use serde_json::{json, Value};

use crate::format::{self, parse_rational, FormatError, Measure};
use crate::suite::{self, Arithmetic, SuiteError, SuiteReport, SUITES};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const PRECONDITION: i32 = 1;
    pub const FAILURE: i32 = 2;
    pub const PARSE: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "compensa", version, about = "Compensations of signed measures and Bishop-Phelps-Bollobás repairs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed of the random instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of cases per suite.
    #[arg(long, global = true, default_value_t = 100)]
    pub cases: usize,
    /// Largest dyadic depth used by the suites.
    #[arg(long, global = true, default_value_t = 6)]
    pub depth: usize,
    /// Run in f64 arithmetic with tolerant comparisons instead of exact rationals.
    #[arg(long, global = true)]
    pub float: bool,
    /// Comparison tolerance of `--float`.
    #[arg(long, global = true, default_value_t = scalar::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Print JSON instead of text.
    #[arg(long = "json-out", global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compensate a measure.
    Compensate {
        #[arg(value_enum)]
        method: Method,
        /// Measure JSON (path or inline).
        #[arg(long = "in")]
        input: String,
    },
    /// Repair a near-attaining functional or operator.
    Repair {
        #[command(subcommand)]
        what: Repair,
    },
    /// Transfer a compensation along a quotient map.
    Transfer {
        /// Quotient JSON.
        #[arg(long)]
        phi: String,
        /// Measure on the target, JSON.
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum, default_value_t = Method::Single)]
        xi: Method,
    },
    /// Evaluate and check a closeness function on triples.
    Closeness {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Metric space JSON.
        #[arg(long)]
        space: String,
        /// Triples JSON, `[["x","y","z"],…]`.
        #[arg(long)]
        triples: String,
        /// Compensation used by `--mode derived`.
        #[arg(long, value_enum, default_value_t = Method::Single)]
        xi: Method,
    },
    /// Fields on the one-point compactification of a discrete set.
    Agamma {
        #[command(subcommand)]
        what: Agamma,
    },
    /// Run a verification suite (`all` runs every suite).
    Verify {
        suite: String,
        /// Re-run the check on a recorded failing input instead.
        #[arg(long)]
        replay: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Rescaled positive part, on any finite space.
    #[value(alias = "atomic")]
    Single,
    /// The Cantor recursion, on dyadic measures.
    Cantor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Metric,
    Derived,
}

#[derive(Debug, Subcommand)]
pub enum Repair {
    Functional {
        #[arg(long)]
        f: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        delta: Option<String>,
    },
    Operator {
        #[arg(long = "T", alias = "t")]
        t: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        eps: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum Agamma {
    Compensate {
        #[arg(long = "in")]
        input: String,
    },
}

/// An error carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(_) | CliError::Suite(_) => exit::PARSE,
            CliError::Core(e) if e.is_precondition() => exit::PRECONDITION,
            CliError::Core(CoreError::Invariant(_)) | CliError::Failed(_) => exit::FAILURE,
            CliError::Core(_) => exit::PARSE,
        }
    }
}

/// Output of a command: a JSON document and whether it reports a failure.
pub struct Outcome {
    pub value: Value,
    pub failed: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, failed: false }
    }
}

fn num(s: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(s)?)
}

fn lift<S: Scalar>(x: &Rational) -> S {
    S::from_rational(x)
}

fn text<S: Scalar>(x: &S) -> Value {
    Value::String(x.to_string())
}

fn measure_json<S: Scalar, P: Label>(m: &AtomicMeasure<S, P>) -> Value {
    json!({
        "type": "atomic",
        "points": m.points().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "weights": m.weights().iter().map(text).collect::<Vec<_>>(),
    })
}

fn dyadic_json<S: Scalar>(m: &DyadicMeasure<S>) -> Value {
    json!({
        "type": "dyadic",
        "depth": m.depth(),
        "leaves": m.leaves().iter().map(text).collect::<Vec<_>>(),
    })
}

fn function_json<S: Scalar, P: Label>(f: &GridFunction<S, P>) -> Value {
    json!({
        "points": f.points().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "values": f.values().iter().map(text).collect::<Vec<_>>(),
    })
}

fn operator_json<S: Scalar>(t: &OperatorTable<S>) -> Value {
    json!({
        "points": t.points(),
        "rows": t.rows().iter().map(|r| r.weights().iter().map(text).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn atoms_json<S: Scalar>(m: &AtomicMeasure<S, Site>) -> Value {
    let atoms: BTreeMap<String, Value> = m.iter().map(|(s, w)| (s.to_string(), text(w))).collect();
    json!({ "atoms": atoms })
}

fn axioms_json<S: Scalar>(r: &AxiomReport<S, String>) -> Value {
    json!({
        "checked": r.checked,
        "skipped": r.skipped,
        "passed": r.passed(),
        "violations": r.violations.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>(),
    })
}

fn suite_json(r: &SuiteReport) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn compensator<S: Scalar>(method: Method) -> Box<dyn Compensator<S, String>> {
    match method {
        Method::Single => Box::new(SingleCompensation),
        Method::Cantor => Box::new(CantorCompensation),
    }
}

fn execute<S: Scalar>(command: &Command, g: &Global) -> Result<Outcome, CliError> {
    match command {
        Command::Compensate { method, input } => {
            let measure = format::parse_measure(input)?;
            Ok(Outcome::ok(match (method, measure) {
                (Method::Cantor, Measure::Dyadic(m)) => dyadic_json(&compensate_cantor(&m.convert(lift::<S>))),
                (Method::Cantor, Measure::Atomic(m)) => {
                    let m = DyadicMeasure::from_atomic(&m.convert(lift::<S>))?;
                    dyadic_json(&compensate_cantor(&m))
                }
                (Method::Single, m) => measure_json(&compensate_single(&m.to_atomic().convert(lift::<S>))),
            }))
        }
        Command::Repair { what: Repair::Functional { f, mu, eps, delta } } => {
            let f = format::parse_function(f)?.convert(lift::<S>);
            let mu = format::parse_measure(mu)?.to_atomic().convert(lift::<S>);
            let eps: S = lift(&num(eps)?);
            let delta: Option<S> = delta.as_deref().map(num).transpose()?.map(|d| lift(&d));
            let r = bpb_repair_functional(&f, &mu, &eps, delta.as_ref())?;
            Ok(Outcome::ok(json!({
                "f0": function_json(&r.f0),
                "mu0": measure_json(&r.mu0),
                "certificates": {
                    "pairing": text(&r.pairing),
                    "f_distance": text(&r.f_distance),
                    "mu_distance": text(&r.mu_distance),
                    "hahn_compatible": hahn_compatible(&mu, &r.mu0),
                    "support_contained": support_contained(&mu, &r.mu0),
                },
            })))
        }
        Command::Repair { what: Repair::Operator { t, f, mu, eps } } => {
            let t = format::parse_operator(t)?.convert(lift::<S>);
            let f = format::parse_function(f)?.convert(lift::<S>);
            let mu = format::parse_measure(mu)?.to_atomic().convert(lift::<S>);
            let eps: S = lift(&num(eps)?);
            let r = bpb_repair_operator(&t, &f, &mu, &eps)?;
            let c = &r.certificates;
            Ok(Outcome::ok(json!({
                "t0": operator_json(&r.t0),
                "f0": function_json(&r.f0),
                "mu0": measure_json(&r.mu0),
                "certificates": {
                    "radius": text(&c.radius),
                    "pairing": text(&c.pairing),
                    "operator_distance": text(&c.operator_distance),
                    "f_distance": text(&c.f_distance),
                    "mu_distance": text(&c.mu_distance),
                },
                "regions": {
                    "d1": r.regions.d1, "d2": r.regions.d2,
                    "a1": r.regions.a1, "a2": r.regions.a2,
                },
            })))
        }
        Command::Transfer { phi, input, xi } => {
            let q = format::parse_quotient(phi)?.convert(lift::<S>);
            let mu = format::parse_measure(input)?.to_atomic().convert(lift::<S>).reindexed(q.target())?;
            let nu = transfer_compensation(&q, compensator::<S>(*xi).as_ref(), &mu)?;
            Ok(Outcome::ok(measure_json(&nu)))
        }
        Command::Closeness { mode, space, triples, xi } => {
            let space = format::parse_space(space)?.convert(lift::<S>);
            let triples = format::parse_triples(triples)?;
            let xi = compensator::<S>(*xi);
            let derived = DerivedCloseness { points: space.points(), xi: xi.as_ref() };
            let metric = MetricCloseness(&space);
            let c: &dyn Closeness<S, String> = match mode {
                Mode::Metric => &metric,
                Mode::Derived => &derived,
            };
            let values = triples
                .iter()
                .map(|(x, y, z)| match c.closeness(x, y, z) {
                    Ok(v) => Ok(json!({ "triple": [x, y, z], "value": text(&v) })),
                    Err(CoreError::DegenerateTriple) => Ok(json!({ "triple": [x, y, z], "value": null })),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let report = axioms_check(c, &triples);
            Ok(Outcome {
                failed: !report.passed(),
                value: json!({ "values": values, "axioms": axioms_json(&report) }),
            })
        }
        Command::Agamma { what: Agamma::Compensate { input } } => {
            let field = format::parse_field(input)?.convert(lift::<S>);
            let xi: FieldCompensation<S> = agamma_compensate(&field)?;
            let exceptions: BTreeMap<String, Value> =
                xi.xi_exceptions.iter().map(|(t, m)| (t.to_string(), atoms_json(m))).collect();
            let sets = xi.sets.as_ref().map(|s| {
                json!({
                    "a": s.a, "gamma0": s.gamma0, "b": s.b, "c": s.c, "rescaled": s.rescaled,
                })
            });
            Ok(Outcome::ok(json!({
                "xi_infinity": atoms_json(&xi.xi_infinity),
                "xi_tail": atoms_json(&xi.xi_tail),
                "exceptions": exceptions,
                "sets": sets,
            })))
        }
        Command::Verify { suite: name, replay } => {
            let arithmetic = if S::EXACT { Arithmetic::Rational } else { Arithmetic::Float };
            if let Some(input) = replay {
                let input: Value = format::read_json(input)?;
                let input = input.get("input").cloned().unwrap_or(input);
                let result = suite::replay(name, &input, arithmetic)?;
                return Ok(Outcome {
                    failed: result.is_err(),
                    value: json!({ "suite": name, "violation": result.err() }),
                });
            }
            let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name.as_str()] };
            let reports = names
                .iter()
                .map(|n| suite::run_suite(n, g.cases, g.seed, g.depth, arithmetic))
                .collect::<Result<Vec<_>, _>>()?;
            let failed = reports.iter().any(|r| !r.passed());
            let value = if reports.len() == 1 {
                suite_json(&reports[0])
            } else {
                Value::Array(reports.iter().map(suite_json).collect())
            };
            Ok(Outcome { value, failed })
        }
    }
}

/// Runs a parsed command line in the requested arithmetic.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    gate_self_test()?;
    if cli.global.float {
        scalar::set_tolerance(cli.global.tol);
        execute::<Approx>(&cli.command, &cli.global)
    } else {
        execute::<Rational>(&cli.command, &cli.global)
    }
}

/// Plain-text rendering of a JSON result: one `path: value` line per leaf.
pub fn render_text(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, v, out);
                }
            }
            Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), v, out);
                }
            }
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar_text).collect();
                out.push_str(&format!("{prefix}: [{}]\n", parts.join(", ")));
            }
            _ => out.push_str(&format!("{prefix}: {}\n", scalar_text(v))),
        }
    }
    fn scalar_text(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

/// Parses `args`, runs the command, prints the result, and returns the exit
/// status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::PARSE } else { exit::OK };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if cli.global.json {
                println!("{}", serde_json::to_string_pretty(&outcome.value).expect("JSON values print"));
            } else {
                print!("{}", render_text(&outcome.value));
            }
            if outcome.failed {
                exit::FAILURE
            } else {
                exit::OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
