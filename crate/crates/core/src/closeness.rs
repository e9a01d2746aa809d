//! Closeness functions on finite spaces.
//!
//! A closeness function assigns to triples with `y ≠ z` a value
//! `c(x, y, z) ∈ [−1, 1]` with `c(x, y, z) = −c(x, z, y)` and `c(x, x, z) = 1`.
//! Two sources are provided: the metric formula and the function derived
//! from a compensation procedure, `1 − 6·ξ((δ_y + δ_z − δ_x)/3)({y})`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cantor::{words, CantorCompensation};
use crate::compensator::Compensator;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, Label};
use crate::scalar::{self, Rational, Scalar};

/// A finite metric space.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpaceSample<S = Rational, P = String> {
    points: Vec<P>,
    rho: Vec<Vec<S>>,
}

impl<S: Scalar, P: Label> MetricSpaceSample<S, P> {
    /// Builds the space from the distances of unordered pairs; each pair of
    /// distinct points must be given once in either order (or twice with
    /// equal values).
    pub fn new(points: Vec<P>, rho: &BTreeMap<(P, P), S>) -> Result<Self> {
        let n = points.len();
        let mut m: Vec<Vec<Option<S>>> = alloc::vec![alloc::vec![None; n]; n];
        for ((a, b), d) in rho {
            let i = index(&points, a)?;
            let j = index(&points, b)?;
            for (r, c) in [(i, j), (j, i)] {
                if let Some(prev) = &m[r][c] {
                    if prev != d {
                        return Err(Error::precondition(format!("asymmetric distance between {a} and {b}")));
                    }
                }
                m[r][c] = Some(d.clone());
            }
        }
        let mut rows = Vec::with_capacity(n);
        for (i, row) in m.into_iter().enumerate() {
            let row = row
                .into_iter()
                .enumerate()
                .map(|(j, d)| match d {
                    Some(d) => Ok(d),
                    None if i == j => Ok(S::zero()),
                    None => Err(Error::precondition(format!(
                        "missing distance between {} and {}",
                        points[i], points[j]
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_matrix(points, rows)
    }

    /// `rho[i][j] = ρ(points[i], points[j])`.
    pub fn from_matrix(points: Vec<P>, rho: Vec<Vec<S>>) -> Result<Self> {
        let n = points.len();
        if rho.len() != n || rho.iter().any(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                found: rho.len(),
            });
        }
        let mut sorted: Vec<&P> = points.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(format!("{}", w[0])));
        }
        for i in 0..n {
            if !rho[i][i].is_zero() {
                return Err(Error::precondition("distance to itself is not zero"));
            }
            for j in 0..n {
                if rho[i][j] != rho[j][i] {
                    return Err(Error::precondition("distance is not symmetric"));
                }
                if i != j && !rho[i][j].is_positive() {
                    return Err(Error::precondition("distinct points at distance zero"));
                }
                for k in 0..n {
                    if rho[i][k] > rho[i][j].clone() + rho[j][k].clone() {
                        return Err(Error::precondition("triangle inequality fails"));
                    }
                }
            }
        }
        Ok(Self { points, rho })
    }

    /// Points of the real line with `ρ(a, b) = |a − b|`.
    pub fn on_line(points: Vec<(P, S)>) -> Result<Self> {
        let rho = points
            .iter()
            .map(|(_, a)| points.iter().map(|(_, b)| (a.clone() - b.clone()).abs()).collect())
            .collect();
        Self::from_matrix(points.into_iter().map(|(p, _)| p).collect(), rho)
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn distance(&self, a: &P, b: &P) -> Result<S> {
        Ok(self.rho[index(&self.points, a)?][index(&self.points, b)?].clone())
    }

    /// Converts the distances into another scalar type.
    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> MetricSpaceSample<T, P> {
        MetricSpaceSample {
            points: self.points.clone(),
            rho: self.rho.iter().map(|r| r.iter().map(&mut f).collect()).collect(),
        }
    }
}

fn index<P: Label>(points: &[P], p: &P) -> Result<usize> {
    points
        .iter()
        .position(|q| q == p)
        .ok_or_else(|| Error::UnknownPoint(format!("{p}")))
}

/// `(ρ(x,z) − ρ(x,y)) / max{ρ(x,y), ρ(x,z)}`.
pub fn metric_closeness<S: Scalar, P: Label>(
    m: &MetricSpaceSample<S, P>,
    x: &P,
    y: &P,
    z: &P,
) -> Result<S> {
    let (xy, xz) = (m.distance(x, y)?, m.distance(x, z)?);
    if y == z {
        return Err(Error::DegenerateTriple);
    }
    let top = scalar::max(xy.clone(), xz.clone());
    Ok((xz - xy) / top)
}

/// `1 − 6·ξ(f)({y})` with `f = (δ_y + δ_z − δ_x)/3` on `points`.
pub fn closeness_from_compensation<S, P, C>(xi: &C, points: &[P], x: &P, y: &P, z: &P) -> Result<S>
where
    S: Scalar,
    P: Label,
    C: Compensator<S, P> + ?Sized,
{
    for p in [x, y, z] {
        index(points, p)?;
    }
    if y == z {
        return Err(Error::DegenerateTriple);
    }
    let third = S::from_ratio(1, 3);
    let weights = points
        .iter()
        .map(|p| {
            let mut w = S::zero();
            if p == y {
                w = w + third.clone();
            }
            if p == z {
                w = w + third.clone();
            }
            if p == x {
                w = w - third.clone();
            }
            w
        })
        .collect();
    let f = AtomicMeasure::new(points.to_vec(), weights)?;
    let nu = xi.compensate(&f)?;
    Ok(S::one() - S::from_ratio(6, 1) * nu.mass_at(y))
}

/// Something that evaluates `c(x, y, z)`.
pub trait Closeness<S, P> {
    fn closeness(&self, x: &P, y: &P, z: &P) -> Result<S>;
}

impl<S, P, F> Closeness<S, P> for F
where
    F: Fn(&P, &P, &P) -> Result<S>,
{
    fn closeness(&self, x: &P, y: &P, z: &P) -> Result<S> {
        self(x, y, z)
    }
}

/// [`metric_closeness`] on a fixed space.
pub struct MetricCloseness<'a, S, P>(pub &'a MetricSpaceSample<S, P>);

impl<S: Scalar, P: Label> Closeness<S, P> for MetricCloseness<'_, S, P> {
    fn closeness(&self, x: &P, y: &P, z: &P) -> Result<S> {
        metric_closeness(self.0, x, y, z)
    }
}

/// [`closeness_from_compensation`] for a fixed procedure and point set.
pub struct DerivedCloseness<'a, P, C: ?Sized> {
    pub points: &'a [P],
    pub xi: &'a C,
}

impl<S, P, C> Closeness<S, P> for DerivedCloseness<'_, P, C>
where
    S: Scalar,
    P: Label,
    C: Compensator<S, P> + ?Sized,
{
    fn closeness(&self, x: &P, y: &P, z: &P) -> Result<S> {
        closeness_from_compensation(self.xi, self.points, x, y, z)
    }
}

/// A failed closeness axiom on a sampled triple.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosenessViolation<S, P> {
    /// `c(x,y,z) ≠ −c(x,z,y)`.
    Antisymmetry { x: P, y: P, z: P, forward: S, backward: S },
    /// `c(x,x,z) ≠ 1`.
    Normalization { x: P, z: P, value: S },
    /// `c(x,y,z) ∉ [−1, 1]`.
    Range { x: P, y: P, z: P, value: S },
    /// The evaluator failed on a triple with `y ≠ z`.
    Evaluation { x: P, y: P, z: P, error: Error },
}

/// Result of [`axioms_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport<S, P> {
    /// Triples with `y ≠ z` that were evaluated.
    pub checked: usize,
    /// Triples with `y = z`, where `c` is undefined.
    pub skipped: usize,
    pub violations: Vec<ClosenessViolation<S, P>>,
}

impl<S, P> AxiomReport<S, P> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks antisymmetry and range on every triple, and `c(x,x,z) = 1`,
/// `c(x,x,y) = 1` wherever defined.
pub fn axioms_check<S, P, C>(c: &C, samples: &[(P, P, P)]) -> AxiomReport<S, P>
where
    S: Scalar,
    P: Label,
    C: Closeness<S, P> + ?Sized,
{
    let mut report = AxiomReport {
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    let minus_one = -S::one();
    for (x, y, z) in samples {
        if y == z {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let eval = |a: &P, b: &P, d: &P| c.closeness(a, b, d);
        let fail = |error: Error| ClosenessViolation::Evaluation {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            error,
        };
        match (eval(x, y, z), eval(x, z, y)) {
            (Ok(forward), Ok(backward)) => {
                if forward != -backward.clone() {
                    report.violations.push(ClosenessViolation::Antisymmetry {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        forward: forward.clone(),
                        backward,
                    });
                }
                if forward < minus_one || forward > S::one() {
                    report.violations.push(ClosenessViolation::Range {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        value: forward,
                    });
                }
            }
            (Err(e), _) | (_, Err(e)) => report.violations.push(fail(e)),
        }
        for other in [z, y] {
            if other == x {
                continue;
            }
            match eval(x, x, other) {
                Ok(v) if v == S::one() => {}
                Ok(value) => report.violations.push(ClosenessViolation::Normalization {
                    x: x.clone(),
                    z: other.clone(),
                    value,
                }),
                Err(e) => report.violations.push(fail(e)),
            }
        }
    }
    report
}

/// Result of [`cantor_continuity_sample`].
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuitySample<S> {
    pub depth: usize,
    /// Number of (triple, perturbation) pairs evaluated.
    pub evaluations: usize,
    /// Largest `|c(x',y',z') − c(x,y,z)|` over perturbations that keep the
    /// separating prefixes of `x, y, z`.
    pub max_deviation: S,
    /// Always `true`: continuity is a topological property and is only
    /// sampled here, never certified.
    pub sampled_only: bool,
}

/// Samples the derived closeness of the Cantor compensation at depth
/// `depth`: for random triples of distinct words and random perturbations
/// agreeing with them on at least the prefixes that separate them, records
/// how far the closeness moves.
pub fn cantor_continuity_sample(depth: usize, triples: usize, seed: u64) -> Result<ContinuitySample<Rational>> {
    if !(2..=12).contains(&depth) {
        return Err(Error::precondition("continuity sampling needs 2 ≤ depth ≤ 12"));
    }
    let points = words(depth);
    let xi = CantorCompensation;
    let c = DerivedCloseness {
        points: &points,
        xi: &xi,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let mut max_deviation = Rational::zero();
    let mut evaluations = 0;
    let mut done = 0;
    while done < triples {
        let idx = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            continue;
        }
        done += 1;
        let base: Rational = c.closeness(&points[idx[0]], &points[idx[1]], &points[idx[2]])?;
        let separation = (1..=depth)
            .find(|&k| {
                let pre = idx.map(|i| i >> (depth - k));
                pre[0] != pre[1] && pre[1] != pre[2] && pre[0] != pre[2]
            })
            .unwrap_or(depth);
        for keep in separation..=depth {
            let moved = idx.map(|i| {
                let free = depth - keep;
                let tail = if free == 0 { 0 } else { rng.gen_range(0..1usize << free) };
                (i >> free << free) | tail
            });
            let value: Rational = c.closeness(&points[moved[0]], &points[moved[1]], &points[moved[2]])?;
            max_deviation = scalar::max(max_deviation, (value - base.clone()).abs());
            evaluations += 1;
        }
    }
    Ok(ContinuitySample {
        depth,
        evaluations,
        max_deviation,
        sampled_only: true,
    })
}
