//! Seeded random instances for the constructions of this crate.
//!
//! Every generator draws from a caller-supplied [`Rng`], so a fixed seed
//! always reproduces the same instance. Rationals have numerators and
//! denominators bounded by the `bound` argument.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::agamma::{FiniteField, Site};
use crate::cantor::DyadicMeasure;
use crate::closeness::MetricSpaceSample;
use crate::functional::attainment_gap;
use crate::measure::{AtomicMeasure, GridFunction};
use crate::quotient::QuotientSpec;
use crate::scalar::{self, ratio, Rational, Scalar};

/// Largest numerator or denominator produced by default.
pub const DEFAULT_BOUND: i64 = 10_000;

/// Labels `"0", …, "n−1"`.
pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{i}")).collect()
}

/// `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let bound = bound.max(1);
    ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

/// A rational in `[0, 1]` with denominator at most `bound`.
pub fn unit_interval<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let q = rng.gen_range(1..=bound.max(1));
    ratio(rng.gen_range(0..=q), q)
}

fn sparse<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    if rng.gen_ratio(1, 4) {
        Rational::zero()
    } else {
        rational(rng, bound)
    }
}

/// A signed measure on `labels(n)`, with about a quarter of the atoms zero.
pub fn measure<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> AtomicMeasure {
    let w = (0..n).map(|_| sparse(rng, bound)).collect();
    AtomicMeasure::new(labels(n), w).expect("distinct labels")
}

/// A depth-`depth` dyadic measure. Some instances have cancelling siblings,
/// zero cylinders, or total mass exactly zero.
pub fn dyadic<R: Rng + ?Sized>(rng: &mut R, depth: usize, bound: i64) -> DyadicMeasure {
    let n = 1usize << depth;
    let mut leaves: Vec<Rational> = (0..n).map(|_| sparse(rng, bound)).collect();
    if depth >= 1 && rng.gen_ratio(1, 4) {
        // cancel a random sibling pair or half block
        let k = rng.gen_range(1..=depth);
        let block = 1usize << k;
        let start = rng.gen_range(0..n / block) * block;
        let half = block / 2;
        let s0 = scalar::sum(leaves[start..start + half].iter().cloned());
        let s1 = scalar::sum(leaves[start + half..start + block].iter().cloned());
        leaves[start + block - 1] = leaves[start + block - 1].clone() - s1 - s0;
    }
    if rng.gen_ratio(1, 8) {
        let total = scalar::sum(leaves.iter().cloned());
        leaves[n - 1] = leaves[n - 1].clone() - total;
    }
    DyadicMeasure::new(depth, leaves).expect("length 2^depth")
}

/// [`dyadic`] with the sign flipped when needed so that `μ(C) ≥ 0`.
pub fn dyadic_nonnegative<R: Rng + ?Sized>(rng: &mut R, depth: usize, bound: i64) -> DyadicMeasure {
    let mu = dyadic(rng, depth, bound);
    if mu.total_mass().is_negative() {
        mu.scale(&-Rational::one())
    } else {
        mu
    }
}

/// A function on `labels(n)` with values in `[−1, 1]`.
pub fn function<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> GridFunction {
    let v = (0..n)
        .map(|_| unit_interval(rng, bound) * ratio(if rng.gen_bool(0.5) { 1 } else { -1 }, 1))
        .collect();
    GridFunction::new(labels(n), v).expect("distinct labels")
}

/// `(f, μ)` on `labels(n)` with `‖f‖∞ = 1`, `‖μ‖ = 1` and
/// `⟨μ, f⟩ ≥ 1 − ε²/6`. Requires `n ≥ 1` and `0 < ε`.
pub fn near_attaining_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    eps: &Rational,
    bound: i64,
) -> (GridFunction, AtomicMeasure) {
    let n = n.max(1);
    let quarter = attainment_gap(eps) / ratio(4, 1);
    let sign = |rng: &mut R| ratio(if rng.gen_bool(0.5) { 1 } else { -1 }, 1);
    // kinds: 0 = exactly ±1, 1 = within ε²/24 of ±1, 2 = anywhere
    let mut kinds: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    kinds[0] = 0;
    kinds.shuffle(rng);
    let f_values: Vec<Rational> = kinds
        .iter()
        .map(|k| match k {
            0 => sign(rng),
            1 => sign(rng) * (Rational::one() - quarter.clone() * unit_interval(rng, bound)),
            _ => sign(rng) * unit_interval(rng, bound),
        })
        .collect();
    let leak = quarter.clone() * unit_interval(rng, bound);
    let mut core: Vec<Rational> = kinds
        .iter()
        .zip(&f_values)
        .map(|(k, v)| {
            if *k < 2 && rng.gen_ratio(3, 4) {
                Scalar::signum(v) * ratio(rng.gen_range(1..=bound.max(1)), 1)
            } else {
                Rational::zero()
            }
        })
        .collect();
    if core.iter().all(|w| w.is_zero()) {
        let i = kinds.iter().position(|k| *k == 0).expect("one exact point");
        core[i] = Scalar::signum(&f_values[i]);
    }
    let core_norm = scalar::sum(core.iter().map(|w| w.abs()));
    let stray: Vec<Rational> = (0..n).map(|_| sparse(rng, bound)).collect();
    let stray_norm = scalar::sum(stray.iter().map(|w| w.abs()));
    let weights = core
        .iter()
        .zip(&stray)
        .map(|(c, s)| {
            let main = c.clone() * (Rational::one() - leak.clone()) / core_norm.clone();
            if stray_norm.is_zero() {
                main
            } else {
                main + s.clone() * leak.clone() / stray_norm.clone()
            }
        })
        .collect::<Vec<_>>();
    let mu = AtomicMeasure::new(labels(n), weights).expect("distinct labels");
    // stray mass may cancel core mass; renormalise to the unit sphere
    let norm = mu.variation_norm();
    let mu = mu.scale(&(Rational::one() / norm));
    let f = GridFunction::new(labels(n), f_values).expect("distinct labels");
    (f, mu)
}

/// A valid quotient of `labels(source)` onto `labels(target)` (as
/// `"q0", …`), with random non-negative fiber weights summing to 1.
pub fn quotient<R: Rng + ?Sized>(rng: &mut R, source: usize, target: usize, bound: i64) -> QuotientSpec {
    let target = target.clamp(1, source.max(1));
    let source = source.max(target);
    let mut phi: Vec<usize> = (0..source)
        .map(|t| if t < target { t } else { rng.gen_range(0..target) })
        .collect();
    phi.shuffle(rng);
    let mut raw: Vec<Rational> = (0..source)
        .map(|_| {
            if rng.gen_ratio(1, 5) {
                Rational::zero()
            } else {
                ratio(rng.gen_range(1..=bound.max(1)), 1)
            }
        })
        .collect();
    let mut sums = alloc::vec![Rational::zero(); target];
    for (l, w) in phi.iter().zip(&raw) {
        sums[*l] = sums[*l].clone() + w.clone();
    }
    for l in 0..target {
        if sums[l].is_zero() {
            let t = phi.iter().position(|m| *m == l).expect("onto");
            raw[t] = Rational::one();
            sums[l] = Rational::one();
        }
    }
    let weights = raw
        .iter()
        .zip(&phi)
        .map(|(w, l)| w.clone() / sums[*l].clone())
        .collect();
    let targets = (0..target).map(|i| format!("q{i}")).collect();
    QuotientSpec::from_fiber_weights(labels(source), targets, phi, weights).expect("consistent sizes")
}

/// A random finite metric space on `labels(n)`: either points on a line or
/// distances drawn from `[1, 2]`.
pub fn metric<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> MetricSpaceSample {
    if rng.gen_bool(0.5) && n as i64 <= bound {
        let mut coords: Vec<i64> = Vec::new();
        while coords.len() < n {
            let c = rng.gen_range(-bound..=bound);
            if !coords.contains(&c) {
                coords.push(c);
            }
        }
        let pts = labels(n)
            .into_iter()
            .zip(coords)
            .map(|(p, c)| (p, ratio(c, bound.max(1))))
            .collect();
        MetricSpaceSample::on_line(pts).expect("distinct coordinates")
    } else {
        let mut rho = alloc::vec![alloc::vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = Rational::one() + unit_interval(rng, bound);
                rho[i][j] = d.clone();
                rho[j][i] = d;
            }
        }
        MetricSpaceSample::from_matrix(labels(n), rho).expect("distances in [1, 2]")
    }
}

/// `count` triples of points of `points`, including degenerate ones.
pub fn triples<R: Rng + ?Sized, P: Clone>(rng: &mut R, points: &[P], count: usize) -> Vec<(P, P, P)> {
    (0..count)
        .map(|_| {
            let mut pick = || points[rng.gen_range(0..points.len())].clone();
            (pick(), pick(), pick())
        })
        .collect()
}

/// A tail-constant field on `A(Γ)` with active window `window ≥ 4` and a
/// few exceptions of every kind: equal to `F(∞)`, different total mass,
/// different mass on an atom of `F(∞)`, and mass moved between `∞` and
/// atoms outside the support of `F(∞)` in either direction.
pub fn field<R: Rng + ?Sized>(rng: &mut R, window: u64, bound: i64) -> FiniteField {
    let window = window.max(4);
    let mut atoms = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=3) {
        atoms.insert(Site::Gamma(rng.gen_range(0..window)), sparse(rng, bound));
    }
    atoms.insert(Site::Infinity, sparse(rng, bound));
    let f_inf = AtomicMeasure::from_pairs(atoms.clone()).expect("map keys");
    let off_support: Vec<u64> = (0..window)
        .filter(|k| atoms.get(&Site::Gamma(*k)).is_none_or(|w| w.is_zero()))
        .collect();
    let mut exceptions = BTreeMap::new();
    for _ in 0..rng.gen_range(0..=5) {
        let t = rng.gen_range(0..window);
        let mut value = atoms.clone();
        match rng.gen_range(0..5) {
            0 => {}
            1 => {
                let s = Site::Gamma(rng.gen_range(0..window));
                let w = value.get(&s).cloned().unwrap_or_else(Rational::zero);
                value.insert(s, w + rational(rng, bound));
            }
            2 => {
                let s = *atoms.keys().next().expect("at least ∞");
                value.insert(s, atoms[&s].clone() + rational(rng, bound));
            }
            k => {
                if let Some(&s) = off_support.choose(rng) {
                    let x = ratio(rng.gen_range(1..=bound.max(1)), bound.max(1));
                    let x = if k == 3 { x } else { -x };
                    let at_inf = value[&Site::Infinity].clone();
                    value.insert(Site::Infinity, at_inf - x.clone());
                    value.insert(Site::Gamma(s), x);
                }
            }
        }
        exceptions.insert(t, AtomicMeasure::from_pairs(value).expect("map keys"));
    }
    FiniteField::new(f_inf, exceptions, Some(window)).expect("atoms inside the window")
}

