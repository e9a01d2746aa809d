//! Signed measures and continuous functions on a finite point set.
//!
//! On a finite compact space every measure is a finite combination of point
//! masses and every function is continuous, so both are stored as a weight
//! (or value) per point of an ordered label list.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::scalar::{self, Rational, Scalar};

/// Point label bound shared by every finite space in the crate.
pub trait Label: Clone + Ord + fmt::Debug + fmt::Display {}

impl<T: Clone + Ord + fmt::Debug + fmt::Display> Label for T {}

fn check_points<P: Label>(points: &[P]) -> Result<()> {
    let mut sorted: Vec<&P> = points.iter().collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicatePoint(format!("{}", pair[0])));
        }
    }
    Ok(())
}

/// Signed measure on a finite ordered point set.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure<S = Rational, P = alloc::string::String> {
    points: Vec<P>,
    weights: Vec<S>,
}

impl<S: Scalar, P: Label> AtomicMeasure<S, P> {
    pub fn new(points: Vec<P>, weights: Vec<S>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: weights.len(),
            });
        }
        check_points(&points)?;
        Ok(Self { points, weights })
    }

    pub fn zero(points: Vec<P>) -> Result<Self> {
        let weights = points.iter().map(|_| S::zero()).collect();
        Self::new(points, weights)
    }

    /// Dirac mass at `at`.
    pub fn dirac(points: Vec<P>, at: &P) -> Result<Self> {
        let mut m = Self::zero(points)?;
        let i = m.index_of(at).ok_or_else(|| Error::UnknownPoint(format!("{at}")))?;
        m.weights[i] = S::one();
        Ok(m)
    }

    /// Builds a measure from `(label, weight)` pairs in the given order.
    pub fn from_pairs<I: IntoIterator<Item = (P, S)>>(pairs: I) -> Result<Self> {
        let (points, weights) = pairs.into_iter().unzip();
        Self::new(points, weights)
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &S)> {
        self.points.iter().zip(self.weights.iter())
    }

    pub fn index_of(&self, p: &P) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// `μ({p})`, zero for labels outside the point set.
    pub fn mass_at(&self, p: &P) -> S {
        self.index_of(p)
            .map(|i| self.weights[i].clone())
            .unwrap_or_else(S::zero)
    }

    pub fn same_domain<T>(&self, other: &AtomicMeasure<T, P>) -> bool {
        self.points == other.points
    }

    /// `μ(K)`.
    pub fn total_mass(&self) -> S {
        scalar::sum(self.weights.iter().cloned())
    }

    /// Mass of the atoms selected by `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(&P) -> bool) -> S {
        scalar::sum(
            self.iter()
                .filter(|(p, _)| pred(p))
                .map(|(_, w)| w.clone()),
        )
    }

    /// Jordan decomposition `(μ⁺, μ⁻)` with `μ = μ⁺ − μ⁻`.
    pub fn jordan(&self) -> (Self, Self) {
        let pos = self.map(|w| scalar::max(w.clone(), S::zero()));
        let neg = self.map(|w| scalar::max(-w.clone(), S::zero()));
        (pos, neg)
    }

    pub fn positive_part(&self) -> Self {
        self.map(|w| scalar::max(w.clone(), S::zero()))
    }

    pub fn negative_part(&self) -> Self {
        self.map(|w| scalar::max(-w.clone(), S::zero()))
    }

    /// Variation `|μ|`.
    pub fn variation(&self) -> Self {
        self.map(|w| w.abs())
    }

    /// Total variation norm `‖μ‖ = |μ|(K)`.
    pub fn variation_norm(&self) -> S {
        scalar::sum(self.weights.iter().map(|w| w.abs()))
    }

    /// Hahn decomposition; zero-weight atoms go to the positive part.
    pub fn hahn(&self) -> SignPartition<P> {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (p, w) in self.iter() {
            if w.is_negative() {
                negative.push(p.clone());
            } else {
                positive.push(p.clone());
            }
        }
        SignPartition { positive, negative }
    }

    /// Labels carrying non-zero mass.
    pub fn support(&self) -> Vec<P> {
        self.iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    pub fn map(&self, f: impl FnMut(&S) -> S) -> Self {
        Self {
            points: self.points.clone(),
            weights: self.weights.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|w| w.clone() * c.clone())
    }

    fn zip_with(&self, other: &Self, mut f: impl FnMut(&S, &S) -> S) -> Result<Self> {
        if !self.same_domain(other) {
            return Err(Error::DomainMismatch);
        }
        Ok(Self {
            points: self.points.clone(),
            weights: self
                .weights
                .iter()
                .zip(other.weights.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<S> {
        Ok(self.sub(other)?.variation_norm())
    }

    /// `⟨μ, f⟩ = Σ μ({t}) f(t)`.
    pub fn pairing(&self, f: &GridFunction<S, P>) -> Result<S> {
        if self.points != f.points {
            return Err(Error::DomainMismatch);
        }
        Ok(scalar::sum(
            self.weights
                .iter()
                .zip(f.values.iter())
                .map(|(w, v)| w.clone() * v.clone()),
        ))
    }

    /// The measure with density `g` with respect to `μ`.
    pub fn density_multiply(&self, g: &GridFunction<S, P>) -> Result<Self> {
        if self.points != g.points {
            return Err(Error::DomainMismatch);
        }
        Ok(Self {
            points: self.points.clone(),
            weights: self
                .weights
                .iter()
                .zip(g.values.iter())
                .map(|(w, v)| w.clone() * v.clone())
                .collect(),
        })
    }

    /// The same measure listed in the order of `points`, which must be a
    /// permutation of the current point set.
    pub fn reindexed(&self, points: &[P]) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(Error::DomainMismatch);
        }
        let mut weights = Vec::with_capacity(points.len());
        for p in points {
            let i = self
                .index_of(p)
                .ok_or_else(|| Error::UnknownPoint(format!("{p}")))?;
            weights.push(self.weights[i].clone());
        }
        Self::new(points.to_vec(), weights)
    }

    /// Converts the weights into another scalar type.
    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> AtomicMeasure<T, P> {
        AtomicMeasure {
            points: self.points.clone(),
            weights: self.weights.iter().map(&mut f).collect(),
        }
    }
}

/// Real-valued function on a finite ordered point set.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<S = Rational, P = alloc::string::String> {
    points: Vec<P>,
    values: Vec<S>,
}

impl<S: Scalar, P: Label> GridFunction<S, P> {
    pub fn new(points: Vec<P>, values: Vec<S>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        check_points(&points)?;
        Ok(Self { points, values })
    }

    pub fn constant(points: Vec<P>, c: S) -> Result<Self> {
        let values = points.iter().map(|_| c.clone()).collect();
        Self::new(points, values)
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &S)> {
        self.points.iter().zip(self.values.iter())
    }

    pub fn value_at(&self, p: &P) -> Option<&S> {
        self.points
            .iter()
            .position(|q| q == p)
            .map(|i| &self.values[i])
    }

    /// `‖f‖∞`; zero on the empty space.
    pub fn sup_norm(&self) -> S {
        self.values
            .iter()
            .fold(S::zero(), |acc, v| scalar::max(acc, v.abs()))
    }

    pub fn map(&self, f: impl FnMut(&S) -> S) -> Self {
        Self {
            points: self.points.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// `‖self − other‖∞`.
    pub fn sup_distance(&self, other: &Self) -> Result<S> {
        if self.points != other.points {
            return Err(Error::DomainMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(S::zero(), |acc, (a, b)| {
                scalar::max(acc, (a.clone() - b.clone()).abs())
            }))
    }

    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> GridFunction<T, P> {
        GridFunction {
            points: self.points.clone(),
            values: self.values.iter().map(&mut f).collect(),
        }
    }
}

/// A Hahn decomposition `(P, N)` of a measure on a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPartition<P = alloc::string::String> {
    pub positive: Vec<P>,
    pub negative: Vec<P>,
}

impl<P: Label> SignPartition<P> {
    /// Whether this partitions the point set of `μ` with `μ ≥ 0` on the
    /// positive part and `μ ≤ 0` on the negative part.
    pub fn is_hahn_for<S: Scalar>(&self, mu: &AtomicMeasure<S, P>) -> bool {
        if self.positive.len() + self.negative.len() != mu.len() {
            return false;
        }
        let covers = mu
            .points()
            .iter()
            .all(|p| self.positive.contains(p) != self.negative.contains(p));
        covers
            && self.positive.iter().all(|p| !mu.mass_at(p).is_negative())
            && self.negative.iter().all(|p| !mu.mass_at(p).is_positive())
    }

    pub fn in_positive(&self, p: &P) -> bool {
        self.positive.contains(p)
    }

    pub fn in_negative(&self, p: &P) -> bool {
        self.negative.contains(p)
    }
}

/// `sign(s₂)·min{|s₁|, |s₂|}` when `s₁·s₂ < 0`, and `0` otherwise.
pub fn d_fn<S: Scalar>(s1: &S, s2: &S) -> S {
    let opposite = (s1.is_positive() && s2.is_negative()) || (s1.is_negative() && s2.is_positive());
    if opposite {
        s2.signum() * scalar::min(s1.abs(), s2.abs())
    } else {
        S::zero()
    }
}

/// The canonical compensation `λ·μ⁺` with `λ = μ(K)/μ⁺(K)`, or the zero
/// measure when `μ(K) ≤ 0`.
pub fn compensate_single<S: Scalar, P: Label>(mu: &AtomicMeasure<S, P>) -> AtomicMeasure<S, P> {
    let total = mu.total_mass();
    if !total.is_positive() {
        return mu.map(|_| S::zero());
    }
    let pos = mu.positive_part();
    let lambda = total / pos.total_mass();
    pos.scale(&lambda)
}

/// `|μ|((f = 1 ∩ P) ∪ (f = −1 ∩ N))` for the Hahn decomposition of `μ`.
///
/// For `‖f‖∞ = ‖μ‖ = 1` this equals 1 exactly when `⟨μ, f⟩ = 1`.
pub fn attainment_mass<S: Scalar, P: Label>(
    f: &GridFunction<S, P>,
    mu: &AtomicMeasure<S, P>,
) -> Result<S> {
    if f.points() != mu.points() {
        return Err(Error::DomainMismatch);
    }
    if f.sup_norm() != S::one() {
        return Err(Error::precondition("attainment mass needs ‖f‖∞ = 1"));
    }
    if mu.variation_norm() != S::one() {
        return Err(Error::precondition("attainment mass needs ‖μ‖ = 1"));
    }
    let hahn = mu.hahn();
    let one = S::one();
    let minus_one = -S::one();
    Ok(scalar::sum(f.iter().zip(mu.weights()).filter_map(|((p, v), w)| {
        let hit = (*v == one && hahn.in_positive(p)) || (*v == minus_one && hahn.in_negative(p));
        hit.then(|| w.abs())
    })))
}

/// Why a measure fails to be a compensation of another.
#[derive(Clone, Debug, PartialEq)]
pub enum CompensationDefect<S, P> {
    /// `ν({p}) < 0`.
    Negative(P),
    /// `ν({p}) > μ⁺({p})`.
    AbovePositivePart(P),
    /// `ν(K) ≠ μ(K)` although `μ(K) > 0`.
    TotalMass { expected: S, found: S },
    /// `ν ≠ 0` although `μ(K) ≤ 0`.
    NonZero,
}

/// Checks the defining clauses of a compensation: `0 ≤ ν ≤ μ⁺` and
/// `ν(K) = μ(K)` when `μ(K) > 0`, `ν = 0` otherwise.
///
/// Atoms are matched by label, so the two measures may list different
/// point sets (missing labels carry zero mass).
pub fn check_compensation<S: Scalar, P: Label>(
    nu: &AtomicMeasure<S, P>,
    mu: &AtomicMeasure<S, P>,
) -> core::result::Result<(), CompensationDefect<S, P>> {
    let total = mu.total_mass();
    if !total.is_positive() {
        return if nu.is_zero() {
            Ok(())
        } else {
            Err(CompensationDefect::NonZero)
        };
    }
    let mut labels: Vec<&P> = nu.points().iter().chain(mu.points().iter()).collect();
    labels.sort();
    labels.dedup();
    for p in labels {
        let v = nu.mass_at(p);
        if v.is_negative() {
            return Err(CompensationDefect::Negative(p.clone()));
        }
        if v > scalar::max(mu.mass_at(p), S::zero()) {
            return Err(CompensationDefect::AbovePositivePart(p.clone()));
        }
    }
    let found = nu.total_mass();
    if found != total {
        return Err(CompensationDefect::TotalMass {
            expected: total,
            found,
        });
    }
    Ok(())
}
