//! Local compensation on the one-point compactification `A(Γ) = Γ ∪ {∞}`.
//!
//! `Γ` is the set of natural numbers. A [`FiniteField`] is a weak*-continuous
//! field `t ↦ F(t)` of finitely supported measures that equals `F(∞)` outside
//! a finite exceptional set `E ⊆ Γ`; every such field is continuous at `∞`.
//! [`agamma_compensate`] builds a field `ξ_F` of compensations,
//! `ξ_F(t)` a compensation of `F(t)`, which is again continuous.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::measure::{check_compensation, compensate_single, AtomicMeasure, CompensationDefect};
use crate::scalar::{self, Rational, Scalar};

/// A point of `A(Γ)`. Displayed as `g<k>` and `inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Gamma(u64),
    Infinity,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Gamma(k) => write!(f, "g{k}"),
            Site::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Site {
    type Err = Error;

    /// Accepts `inf`, `g<k>` and a bare `<k>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(Site::Infinity);
        }
        let digits = s.strip_prefix('g').unwrap_or(s);
        digits
            .parse()
            .map(Site::Gamma)
            .map_err(|_| Error::UnknownPoint(s.into()))
    }
}

/// Drops zero atoms and sorts by site.
fn canonical<S: Scalar>(mu: &AtomicMeasure<S, Site>) -> AtomicMeasure<S, Site> {
    let mut pairs: Vec<(Site, S)> = mu
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(p, w)| (*p, w.clone()))
        .collect();
    pairs.sort_by_key(|e| e.0);
    AtomicMeasure::from_pairs(pairs).expect("labels of a measure are distinct")
}

fn from_map<S: Scalar>(map: BTreeMap<Site, S>) -> AtomicMeasure<S, Site> {
    AtomicMeasure::from_pairs(map.into_iter().filter(|(_, w)| !w.is_zero())).expect("map keys are distinct")
}

/// A tail-constant weak*-continuous field on `A(Γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteField<S = Rational> {
    window: u64,
    f_infinity: AtomicMeasure<S, Site>,
    exceptions: BTreeMap<u64, AtomicMeasure<S, Site>>,
}

impl<S: Scalar> FiniteField<S> {
    /// All atoms and exceptional points must lie in the active window
    /// `{0, …, window − 1}`; the window defaults to one past the largest
    /// label used.
    pub fn new(
        f_infinity: AtomicMeasure<S, Site>,
        exceptions: BTreeMap<u64, AtomicMeasure<S, Site>>,
        window: Option<u64>,
    ) -> Result<Self> {
        let atoms = || {
            f_infinity
                .points()
                .iter()
                .chain(exceptions.values().flat_map(|m| m.points().iter()))
                .filter_map(|s| match s {
                    Site::Gamma(k) => Some(*k),
                    Site::Infinity => None,
                })
                .chain(exceptions.keys().copied())
        };
        let needed = atoms().max().map_or(0, |k| k + 1);
        let window = window.unwrap_or(needed);
        if needed > window {
            return Err(Error::precondition(format!(
                "label g{} lies outside the active window of size {window}",
                needed - 1
            )));
        }
        Ok(Self {
            window,
            f_infinity: canonical(&f_infinity),
            exceptions: exceptions.iter().map(|(k, m)| (*k, canonical(m))).collect(),
        })
    }

    /// The constant field `F ≡ f_infinity`.
    pub fn constant(f_infinity: AtomicMeasure<S, Site>) -> Result<Self> {
        Self::new(f_infinity, BTreeMap::new(), None)
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn f_infinity(&self) -> &AtomicMeasure<S, Site> {
        &self.f_infinity
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, AtomicMeasure<S, Site>> {
        &self.exceptions
    }

    /// `F(t)`.
    pub fn value_at(&self, t: Site) -> &AtomicMeasure<S, Site> {
        match t {
            Site::Gamma(k) => self.exceptions.get(&k).unwrap_or(&self.f_infinity),
            Site::Infinity => &self.f_infinity,
        }
    }

    /// Converts every weight into another scalar type.
    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> FiniteField<T> {
        FiniteField {
            window: self.window,
            f_infinity: self.f_infinity.convert(&mut f),
            exceptions: self
                .exceptions
                .iter()
                .map(|(t, m)| (*t, m.convert(&mut f)))
                .collect(),
        }
    }

    /// Largest exceptional point, if any.
    pub fn last_exception(&self) -> Option<u64> {
        self.exceptions.keys().next_back().copied()
    }

    /// The sites `g0, …, g(window−1), inf`.
    pub fn window_sites(&self) -> Vec<Site> {
        (0..self.window).map(Site::Gamma).chain([Site::Infinity]).collect()
    }
}

/// Which clause of the defining formula of `ξ_F` applies at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `t ∈ B`: the pointwise compensation `G(t)`.
    B,
    /// `t ∈ C`: `ξ₀`.
    C,
    /// `t ∉ B ∪ C`: `ξ₀` on `Γ₀`, rescaled `F(t)⁺` off `Γ₀`.
    Rescaled,
}

/// The minimal sets of the construction, for `F(∞)(K) ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSets {
    /// `{t : F(t)(K) ≠ F(∞)(K)}`.
    pub a: Vec<u64>,
    /// `Γ`-atoms of `F(∞)`.
    pub gamma0: Vec<u64>,
    /// `A ∪ ⋃_{s∈Γ₀} B_s`; together with `∞` this is `B`.
    pub b: Vec<u64>,
    /// Exceptional points in `C = {t ∉ B : F(t)(Γ∖A_∞) ≤ 0}`.
    pub c: Vec<u64>,
    /// Exceptional points outside `B ∪ C`.
    pub rescaled: Vec<u64>,
    /// Whether every non-exceptional point of `Γ` lies in `C`.
    pub tail_in_c: bool,
}

impl FieldSets {
    pub fn branch(&self, t: Site) -> Branch {
        match t {
            Site::Infinity => Branch::B,
            Site::Gamma(k) if self.b.contains(&k) => Branch::B,
            Site::Gamma(k) if self.rescaled.contains(&k) => Branch::Rescaled,
            Site::Gamma(_) => Branch::C,
        }
    }
}

/// `F(t)(Γ ∖ A_∞)`.
fn mass_off_support<S: Scalar>(mu: &AtomicMeasure<S, Site>, a_inf: &AtomicMeasure<S, Site>) -> S {
    mu.mass_where(|s| matches!(s, Site::Gamma(_)) && a_inf.mass_at(s).is_zero())
}

/// Computes `A`, `Γ₀`, `B` and `C` from the finite description. Requires
/// `F(∞)(K) ≥ 0`.
pub fn derive_sets<S: Scalar>(field: &FiniteField<S>) -> Result<FieldSets> {
    let f_inf = &field.f_infinity;
    let total = f_inf.total_mass();
    if total.is_negative() {
        return Err(Error::NegativeTotalMass);
    }
    let gamma0: Vec<u64> = f_inf
        .points()
        .iter()
        .filter_map(|s| match s {
            Site::Gamma(k) => Some(*k),
            Site::Infinity => None,
        })
        .collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    let mut rescaled = Vec::new();
    for (&t, mu) in &field.exceptions {
        let in_a = mu.total_mass() != total;
        if in_a {
            a.push(t);
        }
        let differs = gamma0
            .iter()
            .any(|&s| mu.mass_at(&Site::Gamma(s)) != f_inf.mass_at(&Site::Gamma(s)));
        if in_a || differs {
            b.push(t);
        } else if !mass_off_support(mu, f_inf).is_positive() {
            c.push(t);
        } else {
            rescaled.push(t);
        }
    }
    Ok(FieldSets {
        a,
        gamma0,
        b,
        c,
        rescaled,
        tail_in_c: !mass_off_support(f_inf, f_inf).is_positive(),
    })
}

/// The field `ξ_F`, stored like a [`FiniteField`].
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCompensation<S = Rational> {
    pub xi_infinity: AtomicMeasure<S, Site>,
    /// Value at every non-exceptional point of `Γ`.
    pub xi_tail: AtomicMeasure<S, Site>,
    pub xi_exceptions: BTreeMap<u64, AtomicMeasure<S, Site>>,
    /// `None` in the case `F(∞)(K) < 0`.
    pub sets: Option<FieldSets>,
}

impl<S: Scalar> FieldCompensation<S> {
    /// `ξ_F(t)`.
    pub fn value_at(&self, t: Site) -> &AtomicMeasure<S, Site> {
        match t {
            Site::Gamma(k) => self.xi_exceptions.get(&k).unwrap_or(&self.xi_tail),
            Site::Infinity => &self.xi_infinity,
        }
    }
}

/// Builds the compensation field `ξ_F` of `F`.
pub fn agamma_compensate<S: Scalar>(field: &FiniteField<S>) -> Result<FieldCompensation<S>> {
    let f_inf = &field.f_infinity;
    if f_inf.total_mass().is_negative() {
        let zero = AtomicMeasure::from_pairs(core::iter::empty()).expect("empty measure");
        return Ok(FieldCompensation {
            xi_infinity: zero.clone(),
            xi_tail: zero,
            xi_exceptions: field
                .exceptions
                .iter()
                .map(|(t, mu)| (*t, canonical(&compensate_single(mu))))
                .collect(),
            sets: None,
        });
    }
    let sets = derive_sets(field)?;
    let xi0 = canonical(&compensate_single(f_inf));
    let at_infinity = xi0.mass_at(&Site::Infinity);
    let mut xi_exceptions = BTreeMap::new();
    for (&t, mu) in &field.exceptions {
        let value = match sets.branch(Site::Gamma(t)) {
            Branch::B => canonical(&compensate_single(mu)),
            Branch::C => xi0.clone(),
            Branch::Rescaled => {
                let pos = mu.positive_part();
                let off = pos.mass_where(|s| match s {
                    Site::Gamma(k) => !sets.gamma0.contains(k),
                    Site::Infinity => true,
                });
                if !off.is_positive() {
                    return Err(Error::invariant(format!("F(g{t})⁺(K∖Γ₀) is not positive")));
                }
                let factor = at_infinity.clone() / off;
                if factor.is_negative() || factor > S::one() {
                    return Err(Error::invariant(format!("rescaling factor at g{t} leaves [0, 1]")));
                }
                let mut map = BTreeMap::new();
                for &s in &sets.gamma0 {
                    map.insert(Site::Gamma(s), xi0.mass_at(&Site::Gamma(s)));
                }
                for (s, w) in pos.iter() {
                    if !matches!(s, Site::Gamma(k) if sets.gamma0.contains(k)) {
                        map.insert(*s, factor.clone() * w.clone());
                    }
                }
                from_map(map)
            }
        };
        xi_exceptions.insert(t, value);
    }
    if !sets.tail_in_c {
        return Err(Error::invariant("F(∞) charges Γ ∖ A_∞"));
    }
    Ok(FieldCompensation {
        xi_infinity: xi0.clone(),
        xi_tail: xi0,
        xi_exceptions,
        sets: Some(sets),
    })
}

/// Checks that `ξ(t)` is a compensation of `F(t)` at each sample point.
pub fn check_field_compensation<S: Scalar>(
    field: &FiniteField<S>,
    xi: &FieldCompensation<S>,
    sample: &[Site],
) -> Vec<(Site, CompensationDefect<S, Site>)> {
    sample
        .iter()
        .filter_map(|&t| {
            check_compensation(xi.value_at(t), field.value_at(t))
                .err()
                .map(|d| (t, d))
        })
        .collect()
}

/// A point where `ξ_F(t)` has not yet reached `ξ₀` past the exceptions.
#[derive(Clone, Debug, PartialEq)]
pub enum TailViolation<S> {
    /// `ξ_F(t)(K) ≠ ξ₀(K)`.
    Total { t: u64, found: S, expected: S },
    /// `ξ_F(t)({s}) ≠ ξ₀({s})`.
    Atom { t: u64, s: Site, found: S, expected: S },
    /// No probe point lies beyond the last exception.
    ProbeTooShort,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailReport<S> {
    /// Probe points beyond the last exception that were compared with `ξ₀`.
    pub checked: usize,
    /// Probe points inside the exceptional range, not compared.
    pub skipped: usize,
    /// `max_{t, s} |ξ_F(t)({s}) − ξ₀({s})|` over the probe points up to and
    /// including the exceptional range, for information.
    pub pre_tail_deviation: S,
    pub violations: Vec<TailViolation<S>>,
}

impl<S> TailReport<S> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Follows `ξ_F(t)` along `probe → ∞` and checks that it equals
/// `ξ₀ = ξ_F(∞)` in total mass and at every atom of the active window once
/// `t` is past every exception.
pub fn continuity_along_tail<S: Scalar>(
    field: &FiniteField<S>,
    xi: &FieldCompensation<S>,
    probe: &[u64],
) -> TailReport<S> {
    let xi0 = &xi.xi_infinity;
    let sites = field.window_sites();
    let last = field.last_exception();
    let mut report = TailReport {
        checked: 0,
        skipped: 0,
        pre_tail_deviation: S::zero(),
        violations: Vec::new(),
    };
    for &t in probe {
        let value = xi.value_at(Site::Gamma(t));
        if last.is_some_and(|e| t <= e) {
            report.skipped += 1;
            for s in &sites {
                let gap = (value.mass_at(s) - xi0.mass_at(s)).abs();
                report.pre_tail_deviation = scalar::max(report.pre_tail_deviation.clone(), gap);
            }
            continue;
        }
        report.checked += 1;
        let (found, expected) = (value.total_mass(), xi0.total_mass());
        if found != expected {
            report.violations.push(TailViolation::Total { t, found, expected });
        }
        for s in &sites {
            let (found, expected) = (value.mass_at(s), xi0.mass_at(s));
            if found != expected {
                report.violations.push(TailViolation::Atom { t, s: *s, found, expected });
            }
        }
    }
    if report.checked == 0 {
        report.violations.push(TailViolation::ProbeTooShort);
    }
    report
}
