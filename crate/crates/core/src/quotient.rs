//! Quotient maps of finite spaces and transfer of compensations along them.
//!
//! A [`QuotientSpec`] describes a map `φ: K → L` between finite ordered point
//! sets together with an averaging operator `u: C(K) → C(L)` given by
//! weights, `u(g)(l) = Σ_t w_l(t)·g(t)`. The operator is a regular averaging
//! operator for `φ` when it is positive, `u(𝟙_K) = 𝟙_L`, and
//! `u∘C_φ = id_{C(L)}`; [`validate_rao`] checks exactly these conditions.
//! A compensation procedure on `K` then induces one on `L` via
//! `C_φ*∘ξ∘u*` ([`transfer_compensation`]).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cantor::{word, words, MAX_DEPTH};
use crate::compensator::Compensator;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, GridFunction, Label};
use crate::scalar::{self, Rational, Scalar};

/// A failed condition of a regular averaging operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RaoViolation {
    /// `w_target(source) < 0`.
    Positivity { target: String, source: String },
    /// `Σ_t w_target(t) ≠ 1`.
    UnitSum { target: String, sum: String },
    /// `target` has an empty fiber.
    Surjectivity { target: String },
    /// `u(C_φ 𝟙_{other})(target) ≠ 0`: the weights of `target` put mass on
    /// the fiber of a different point.
    LeftInverse { target: String, other: String },
}

impl RaoViolation {
    /// Short name of the violated condition.
    pub fn kind(&self) -> &'static str {
        match self {
            RaoViolation::Positivity { .. } => "positivity",
            RaoViolation::UnitSum { .. } => "unit sum",
            RaoViolation::Surjectivity { .. } => "surjectivity",
            RaoViolation::LeftInverse { .. } => "left inverse",
        }
    }
}

impl fmt::Display for RaoViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RaoViolation::Positivity { target, source } => {
                write!(f, "positivity: weight of {source} for {target} is negative")
            }
            RaoViolation::UnitSum { target, sum } => {
                write!(f, "unit sum: weights for {target} sum to {sum}")
            }
            RaoViolation::Surjectivity { target } => {
                write!(f, "surjectivity: {target} has no preimage")
            }
            RaoViolation::LeftInverse { target, other } => {
                write!(f, "left inverse: weights for {target} charge the fiber of {other}")
            }
        }
    }
}

/// Result of [`validate_rao`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RaoReport {
    pub violations: Vec<RaoViolation>,
}

impl RaoReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }
}

/// A map `φ: K → L` of finite spaces with averaging weights.
///
/// Construction only checks that every label is known; whether the data
/// form a regular averaging operator is reported by [`validate_rao`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientSpec<S = Rational, P = String, Q = String> {
    source: Vec<P>,
    target: Vec<Q>,
    phi: Vec<usize>,
    /// `weights[l]` lists `(source index, w_l(t))`, sorted by index, without
    /// repeated indices.
    weights: Vec<Vec<(usize, S)>>,
}

fn position<T: Label>(points: &[T], p: &T) -> Result<usize> {
    points
        .iter()
        .position(|q| q == p)
        .ok_or_else(|| Error::UnknownPoint(format!("{p}")))
}

fn distinct<T: Label>(points: &[T]) -> Result<()> {
    let mut sorted: Vec<&T> = points.iter().collect();
    sorted.sort();
    match sorted.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::DuplicatePoint(format!("{}", w[0]))),
        None => Ok(()),
    }
}

impl<S: Scalar, P: Label, Q: Label> QuotientSpec<S, P, Q> {
    /// `phi` must assign a target point to every source point; `weights`
    /// maps target points to their weight families (missing targets get
    /// the empty family).
    pub fn new(
        source: Vec<P>,
        target: Vec<Q>,
        phi: &BTreeMap<P, Q>,
        weights: &BTreeMap<Q, BTreeMap<P, S>>,
    ) -> Result<Self> {
        distinct(&source)?;
        distinct(&target)?;
        if phi.len() != source.len() {
            return Err(Error::LengthMismatch {
                expected: source.len(),
                found: phi.len(),
            });
        }
        let phi = source
            .iter()
            .map(|p| {
                let q = phi
                    .get(p)
                    .ok_or_else(|| Error::UnknownPoint(format!("{p}")))?;
                position(&target, q)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = vec![Vec::new(); target.len()];
        for (q, family) in weights {
            let l = position(&target, q)?;
            for (p, w) in family {
                rows[l].push((position(&source, p)?, w.clone()));
            }
            rows[l].sort_by_key(|e| e.0);
        }
        Ok(Self {
            source,
            target,
            phi,
            weights: rows,
        })
    }

    /// Like [`QuotientSpec::new`], with the source taken to be the keys of
    /// `phi` and the target the labels occurring in `phi` or `weights`,
    /// both in sorted order.
    pub fn from_maps(phi: &BTreeMap<P, Q>, weights: &BTreeMap<Q, BTreeMap<P, S>>) -> Result<Self> {
        let source = phi.keys().cloned().collect();
        let mut target: Vec<Q> = phi.values().chain(weights.keys()).cloned().collect();
        target.sort();
        target.dedup();
        Self::new(source, target, phi, weights)
    }

    /// The quotient with the given map and weights `weight_of(t)` on each
    /// fiber, i.e. `w_{φ(t)}(t) = weight_of[t]`.
    pub fn from_fiber_weights(
        source: Vec<P>,
        target: Vec<Q>,
        phi: Vec<usize>,
        weight_of: Vec<S>,
    ) -> Result<Self> {
        distinct(&source)?;
        distinct(&target)?;
        if phi.len() != source.len() || weight_of.len() != source.len() {
            return Err(Error::LengthMismatch {
                expected: source.len(),
                found: if phi.len() != source.len() {
                    phi.len()
                } else {
                    weight_of.len()
                },
            });
        }
        if phi.iter().any(|&l| l >= target.len()) {
            return Err(Error::precondition("φ points outside the target"));
        }
        let mut rows = vec![Vec::new(); target.len()];
        for (t, (&l, w)) in phi.iter().zip(weight_of).enumerate() {
            rows[l].push((t, w));
        }
        Ok(Self {
            source,
            target,
            phi,
            weights: rows,
        })
    }

    /// `φ` with uniform weights `1/|φ⁻¹(l)|` on every fiber.
    pub fn uniform(source: Vec<P>, target: Vec<Q>, phi: Vec<usize>) -> Result<Self> {
        let mut sizes = vec![0i64; target.len()];
        for &l in &phi {
            if let Some(n) = sizes.get_mut(l) {
                *n += 1;
            }
        }
        let weight_of = phi
            .iter()
            .map(|&l| S::from_ratio(1, sizes.get(l).copied().unwrap_or(1).max(1)))
            .collect();
        Self::from_fiber_weights(source, target, phi, weight_of)
    }

    /// The same map with new fiber weights `w_{φ(t)}(t) = weight_of[t]`.
    pub fn reweighted(&self, weight_of: Vec<S>) -> Result<Self> {
        Self::from_fiber_weights(
            self.source.clone(),
            self.target.clone(),
            self.phi.clone(),
            weight_of,
        )
    }

    pub fn source(&self) -> &[P] {
        &self.source
    }

    pub fn target(&self) -> &[Q] {
        &self.target
    }

    /// `φ(source[i]) = target[phi()[i]]`.
    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    /// Every listed weight as `(l, t, w_l(t))`, grouped by target point.
    pub fn weight_entries(&self) -> impl Iterator<Item = (&Q, &P, &S)> {
        self.weights.iter().enumerate().flat_map(move |(l, row)| {
            row.iter()
                .map(move |(t, w)| (&self.target[l], &self.source[*t], w))
        })
    }

    pub fn image_of(&self, p: &P) -> Option<&Q> {
        let i = self.source.iter().position(|q| q == p)?;
        Some(&self.target[self.phi[i]])
    }

    /// `w_l(t)`, zero when not listed.
    pub fn weight(&self, l: &Q, t: &P) -> S {
        let (Some(l), Some(t)) = (
            self.target.iter().position(|q| q == l),
            self.source.iter().position(|p| p == t),
        ) else {
            return S::zero();
        };
        self.weight_at(l, t)
    }

    fn weight_at(&self, l: usize, t: usize) -> S {
        self.weights[l]
            .iter()
            .find(|e| e.0 == t)
            .map(|e| e.1.clone())
            .unwrap_or_else(S::zero)
    }

    /// Source points of the fiber `φ⁻¹(l)`.
    pub fn fiber(&self, l: &Q) -> Vec<P> {
        let Some(l) = self.target.iter().position(|q| q == l) else {
            return Vec::new();
        };
        self.phi
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == l)
            .map(|(t, _)| self.source[t].clone())
            .collect()
    }

    /// Converts the weights into another scalar type.
    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> QuotientSpec<T, P, Q> {
        QuotientSpec {
            source: self.source.clone(),
            target: self.target.clone(),
            phi: self.phi.clone(),
            weights: self
                .weights
                .iter()
                .map(|row| row.iter().map(|(t, w)| (*t, f(w))).collect())
                .collect(),
        }
    }

    /// `Err(InvalidQuotient)` listing the violations, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_rao(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidQuotient(report.violations))
        }
    }

    /// Composition with `other: L → M`: the map `other.φ ∘ φ` with weights
    /// `w_m(t) = Σ_l other.w_m(l)·w_l(t)`.
    pub fn then<R: Label>(&self, other: &QuotientSpec<S, Q, R>) -> Result<QuotientSpec<S, P, R>> {
        if self.target != other.source {
            return Err(Error::DomainMismatch);
        }
        let phi = self.phi.iter().map(|&l| other.phi[l]).collect();
        let weights = other
            .weights
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (l, w2) in row {
                    for (t, w1) in &self.weights[*l] {
                        let e = acc.entry(*t).or_insert_with(S::zero);
                        *e = e.clone() + w2.clone() * w1.clone();
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        Ok(QuotientSpec {
            source: self.source.clone(),
            target: other.target.clone(),
            phi,
            weights,
        })
    }
}

/// Checks positivity of the weights, unit sums, surjectivity of `φ`, and
/// `u(C_φ 𝟙_{l'})(l) = 0` for `l ≠ l'`. Together with unit sums the last
/// condition gives `u∘C_φ = id` on the coordinate basis.
pub fn validate_rao<S: Scalar, P: Label, Q: Label>(q: &QuotientSpec<S, P, Q>) -> RaoReport {
    let mut violations = Vec::new();
    let mut hit = vec![false; q.target.len()];
    for &l in &q.phi {
        hit[l] = true;
    }
    for (l, row) in q.weights.iter().enumerate() {
        let name = q.target[l].to_string();
        if !hit[l] {
            violations.push(RaoViolation::Surjectivity { target: name.clone() });
        }
        for (t, w) in row {
            if w.is_negative() {
                violations.push(RaoViolation::Positivity {
                    target: name.clone(),
                    source: q.source[*t].to_string(),
                });
            }
        }
        let sum = scalar::sum(row.iter().map(|e| e.1.clone()));
        if sum != S::one() {
            violations.push(RaoViolation::UnitSum {
                target: name.clone(),
                sum: sum.to_string(),
            });
        }
        let mut off_fiber: BTreeMap<usize, S> = BTreeMap::new();
        for (t, w) in row {
            let m = q.phi[*t];
            if m != l {
                let e = off_fiber.entry(m).or_insert_with(S::zero);
                *e = e.clone() + w.clone();
            }
        }
        for (m, s) in off_fiber {
            if !s.is_zero() {
                violations.push(RaoViolation::LeftInverse {
                    target: name.clone(),
                    other: q.target[m].to_string(),
                });
            }
        }
    }
    RaoReport { violations }
}

/// `C_φ*μ`: `(φ*μ)({l}) = Σ_{t ∈ φ⁻¹(l)} μ({t})`.
pub fn pushforward<S: Scalar, P: Label, Q: Label>(
    q: &QuotientSpec<S, P, Q>,
    mu: &AtomicMeasure<S, P>,
) -> Result<AtomicMeasure<S, Q>> {
    if mu.points() != q.source.as_slice() {
        return Err(Error::DomainMismatch);
    }
    let mut out = vec![S::zero(); q.target.len()];
    for (&l, w) in q.phi.iter().zip(mu.weights()) {
        out[l] = out[l].clone() + w.clone();
    }
    AtomicMeasure::new(q.target.clone(), out)
}

/// `u*μ`: `(u*μ)({t}) = Σ_l μ({l})·w_l(t)`, which for a regular averaging
/// operator is `μ({φ(t)})·w_{φ(t)}(t)`.
pub fn averaging_adjoint<S: Scalar, P: Label, Q: Label>(
    q: &QuotientSpec<S, P, Q>,
    mu: &AtomicMeasure<S, Q>,
) -> Result<AtomicMeasure<S, P>> {
    if mu.points() != q.target.as_slice() {
        return Err(Error::DomainMismatch);
    }
    let mut out = vec![S::zero(); q.source.len()];
    for (row, m) in q.weights.iter().zip(mu.weights()) {
        for (t, w) in row {
            out[*t] = out[*t].clone() + m.clone() * w.clone();
        }
    }
    AtomicMeasure::new(q.source.clone(), out)
}

/// `C_φ f = f∘φ`.
pub fn pullback<S: Scalar, P: Label, Q: Label>(
    q: &QuotientSpec<S, P, Q>,
    f: &GridFunction<S, Q>,
) -> Result<GridFunction<S, P>> {
    if f.points() != q.target.as_slice() {
        return Err(Error::DomainMismatch);
    }
    let values = q.phi.iter().map(|&l| f.values()[l].clone()).collect();
    GridFunction::new(q.source.clone(), values)
}

/// The averaging operator `u(g)(l) = Σ_t w_l(t)·g(t)`.
pub fn average<S: Scalar, P: Label, Q: Label>(
    q: &QuotientSpec<S, P, Q>,
    g: &GridFunction<S, P>,
) -> Result<GridFunction<S, Q>> {
    if g.points() != q.source.as_slice() {
        return Err(Error::DomainMismatch);
    }
    let values = q
        .weights
        .iter()
        .map(|row| scalar::sum(row.iter().map(|(t, w)| w.clone() * g.values()[*t].clone())))
        .collect();
    GridFunction::new(q.target.clone(), values)
}

/// `ξ̃(μ) = C_φ*(ξ(u*μ))`, a compensation of `μ` whenever `ξ` is a
/// compensation procedure on the source and `q` is a regular averaging
/// operator.
pub fn transfer_compensation<S, P, Q, C>(
    q: &QuotientSpec<S, P, Q>,
    xi: &C,
    mu: &AtomicMeasure<S, Q>,
) -> Result<AtomicMeasure<S, Q>>
where
    S: Scalar,
    P: Label,
    Q: Label,
    C: Compensator<S, P> + ?Sized,
{
    q.ensure_valid()?;
    let lifted = averaging_adjoint(q, mu)?;
    let compensated = xi.compensate(&lifted)?;
    pushforward(q, &compensated.reindexed(q.source())?)
}

/// [`transfer_compensation`] as a [`Compensator`] on the target space.
pub struct Transferred<'a, S, P, Q, C: ?Sized> {
    pub quotient: &'a QuotientSpec<S, P, Q>,
    pub inner: &'a C,
}

impl<S, P, Q, C> Compensator<S, Q> for Transferred<'_, S, P, Q, C>
where
    S: Scalar,
    P: Label,
    Q: Label,
    C: Compensator<S, P> + ?Sized,
{
    fn compensate(&self, mu: &AtomicMeasure<S, Q>) -> Result<AtomicMeasure<S, Q>> {
        transfer_compensation(self.quotient, self.inner, mu)
    }
}

/// Truncation of depth-`n` words to depth `m`, with uniform weights
/// `2^{m−n}` on each fiber.
pub fn dyadic_coarsening<S: Scalar>(n: usize, m: usize) -> Result<QuotientSpec<S, String, String>> {
    if n > MAX_DEPTH {
        return Err(Error::precondition("dyadic depth too large"));
    }
    if m > n {
        return Err(Error::DepthOutOfRange {
            requested: m,
            depth: n,
        });
    }
    let phi = (0..1usize << n).map(|i| i >> (n - m)).collect();
    QuotientSpec::uniform(words(n), words(m), phi)
}

/// Label of the depth-`m` cylinder containing leaf `index` of depth `n`.
pub fn truncated_word(n: usize, m: usize, index: usize) -> String {
    word(m, index >> (n - m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{compensate_cantor, marginal, CantorCompensation, DyadicMeasure};
    use crate::compensator::SingleCompensation;
    use crate::measure::check_compensation;
    use crate::scalar::ratio;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn collapse() -> QuotientSpec {
        let phi = BTreeMap::from([(s("a"), s("x")), (s("b"), s("x"))]);
        let weights = BTreeMap::from([(
            s("x"),
            BTreeMap::from([(s("a"), ratio(1, 2)), (s("b"), ratio(1, 2))]),
        )]);
        QuotientSpec::from_maps(&phi, &weights).unwrap()
    }

    fn on(points: &[&str], w: &[Rational]) -> AtomicMeasure {
        AtomicMeasure::new(points.iter().map(|p| s(p)).collect(), w.to_vec()).unwrap()
    }

    #[test]
    fn pushforward_examples() {
        let q = collapse();
        let mu = on(&["a", "b"], &[ratio(1, 2), ratio(-1, 4)]);
        assert_eq!(pushforward(&q, &mu).unwrap(), on(&["x"], &[ratio(1, 4)]));
        let zero = on(&["a", "b"], &[ratio(0, 1), ratio(0, 1)]);
        assert!(pushforward(&q, &zero).unwrap().is_zero());
        let id: QuotientSpec = QuotientSpec::uniform(vec![s("a"), s("b")], vec![s("a"), s("b")], vec![0, 1]).unwrap();
        assert_eq!(pushforward(&id, &mu).unwrap(), mu);
        assert_eq!(pushforward(&q, &on(&["b", "a"], &[ratio(0, 1), ratio(0, 1)])), Err(Error::DomainMismatch));
    }

    #[test]
    fn adjoint_examples() {
        let q = collapse();
        let up = averaging_adjoint(&q, &on(&["x"], &[ratio(1, 1)])).unwrap();
        assert_eq!(up, on(&["a", "b"], &[ratio(1, 2), ratio(1, 2)]));
        let down = averaging_adjoint(&q, &on(&["x"], &[ratio(-1, 1)])).unwrap();
        assert_eq!(down, on(&["a", "b"], &[ratio(-1, 2), ratio(-1, 2)]));
        assert!(averaging_adjoint(&q, &on(&["x"], &[ratio(0, 1)])).unwrap().is_zero());
        assert_eq!(pushforward(&q, &down).unwrap(), on(&["x"], &[ratio(-1, 1)]));
    }

    #[test]
    fn adjoint_is_dual_to_average() {
        let q = collapse();
        let mu = on(&["x"], &[ratio(3, 7)]);
        let g = GridFunction::new(vec![s("a"), s("b")], vec![ratio(1, 3), ratio(-2, 1)]).unwrap();
        let lhs = averaging_adjoint(&q, &mu).unwrap().pairing(&g).unwrap();
        let rhs = mu.pairing(&average(&q, &g).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let f = GridFunction::new(vec![s("x")], vec![ratio(5, 2)]).unwrap();
        assert_eq!(average(&q, &pullback(&q, &f).unwrap()).unwrap(), f);
    }

    #[test]
    fn transfer_examples() {
        let q = collapse();
        let out = transfer_compensation(&q, &SingleCompensation, &on(&["x"], &[ratio(1, 1)])).unwrap();
        assert_eq!(out, on(&["x"], &[ratio(1, 1)]));
        let out = transfer_compensation(&q, &SingleCompensation, &on(&["x"], &[ratio(-1, 3)])).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn transfer_is_a_compensation() {
        let phi = BTreeMap::from([(s("a"), s("x")), (s("b"), s("x")), (s("c"), s("y"))]);
        let weights = BTreeMap::from([
            (s("x"), BTreeMap::from([(s("a"), ratio(1, 3)), (s("b"), ratio(2, 3))])),
            (s("y"), BTreeMap::from([(s("c"), ratio(1, 1))])),
        ]);
        let q: QuotientSpec = QuotientSpec::from_maps(&phi, &weights).unwrap();
        let mu = on(&["x", "y"], &[ratio(3, 4), ratio(-1, 2)]);
        let nu = transfer_compensation(&q, &SingleCompensation, &mu).unwrap();
        assert_eq!(check_compensation(&nu, &mu), Ok(()));
        assert_eq!(nu, on(&["x", "y"], &[ratio(1, 4), ratio(0, 1)]));
    }

    #[test]
    fn validate_examples() {
        assert!(validate_rao(&collapse()).is_valid());

        let phi = BTreeMap::from([(s("a"), s("x")), (s("b"), s("x"))]);
        let half = BTreeMap::from([(
            s("x"),
            BTreeMap::from([(s("a"), ratio(1, 4)), (s("b"), ratio(1, 4))]),
        )]);
        let report = validate_rao(&QuotientSpec::<Rational>::from_maps(&phi, &half).unwrap());
        assert_eq!(report.violations.len(), 1);
        assert!(report.has("unit sum"));

        let mut onto = half.clone();
        onto.insert(s("x"), BTreeMap::from([(s("a"), ratio(1, 2)), (s("b"), ratio(1, 2))]));
        onto.insert(s("y"), BTreeMap::from([(s("a"), ratio(1, 1))]));
        let q = QuotientSpec::<Rational>::from_maps(&phi, &onto).unwrap();
        let report = validate_rao(&q);
        assert!(report.has("surjectivity"));
        assert!(report.has("left inverse"));
        assert!(matches!(
            transfer_compensation(&q, &SingleCompensation, &on(&["x", "y"], &[ratio(1, 1), ratio(0, 1)])),
            Err(Error::InvalidQuotient(_))
        ));

        let neg = BTreeMap::from([(
            s("x"),
            BTreeMap::from([(s("a"), ratio(3, 2)), (s("b"), ratio(-1, 2))]),
        )]);
        let report = validate_rao(&QuotientSpec::<Rational>::from_maps(&phi, &neg).unwrap());
        assert_eq!(report.violations.len(), 1);
        assert!(report.has("positivity"));
    }

    #[test]
    fn unknown_labels_rejected() {
        let phi = BTreeMap::from([(s("a"), s("x"))]);
        let weights = BTreeMap::from([(s("x"), BTreeMap::from([(s("z"), ratio(1, 1))]))]);
        assert_eq!(
            QuotientSpec::<Rational>::from_maps(&phi, &weights),
            Err(Error::UnknownPoint(s("z")))
        );
    }

    #[test]
    fn dyadic_coarsening_matches_direct_compensation() {
        let mu = DyadicMeasure::new(
            3,
            [(1, 2), (-1, 3), (0, 1), (2, 5), (-3, 4), (1, 8), (1, 6), (-1, 10)]
                .iter()
                .map(|&(n, d)| ratio(n, d))
                .collect(),
        )
        .unwrap();
        for m in 0..=3 {
            let q = dyadic_coarsening::<Rational>(3, m).unwrap();
            assert!(validate_rao(&q).is_valid());
            let coarse = marginal(&mu, m).unwrap();
            let direct = compensate_cantor(&coarse).to_atomic();
            let via = transfer_compensation(&q, &CantorCompensation, &coarse.to_atomic()).unwrap();
            assert_eq!(via, direct);
        }
        assert_eq!(truncated_word(3, 1, 5), s("1"));
    }

    #[test]
    fn dyadic_coarsening_with_uneven_weights() {
        let coarse = DyadicMeasure::new(1, vec![ratio(2, 3), ratio(-1, 5)]).unwrap();
        let direct = compensate_cantor(&coarse).to_atomic();
        let q = dyadic_coarsening::<Rational>(3, 1)
            .unwrap()
            .reweighted(vec![
                ratio(1, 10), ratio(0, 1), ratio(7, 10), ratio(1, 5),
                ratio(1, 2), ratio(1, 6), ratio(1, 3), ratio(0, 1),
            ])
            .unwrap();
        assert!(validate_rao(&q).is_valid());
        assert_eq!(transfer_compensation(&q, &CantorCompensation, &coarse.to_atomic()).unwrap(), direct);
    }

    #[test]
    fn composition_transfers_like_two_steps() {
        let q1 = dyadic_coarsening::<Rational>(3, 2)
            .unwrap()
            .reweighted(vec![
                ratio(1, 4), ratio(3, 4), ratio(1, 1), ratio(0, 1),
                ratio(1, 2), ratio(1, 2), ratio(2, 3), ratio(1, 3),
            ])
            .unwrap();
        let q2 = dyadic_coarsening::<Rational>(2, 1)
            .unwrap()
            .reweighted(vec![ratio(1, 5), ratio(4, 5), ratio(1, 1), ratio(0, 1)])
            .unwrap();
        let q = q1.then(&q2).unwrap();
        assert!(validate_rao(&q).is_valid());
        assert_eq!(q.weight(&s("0"), &s("001")), ratio(3, 20));
        let mu = on(&["0", "1"], &[ratio(5, 6), ratio(-1, 2)]);
        let inner = Transferred { quotient: &q1, inner: &SingleCompensation };
        let twice = transfer_compensation(&q2, &inner, &mu).unwrap();
        let once = transfer_compensation(&q, &SingleCompensation, &mu).unwrap();
        assert_eq!(twice, once);
    }
}
