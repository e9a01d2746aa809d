//! Bishop-Phelps-Bollobás repair of operators on a finite `C(K)`.
//!
//! An operator `T` on `C(K)` is stored through its rows `F(t) = T*(δ_t)`, so
//! `(Th)(t) = ⟨F(t), h⟩` and `‖T‖ = max_t ‖F(t)‖`. On `C(K)` the numerical
//! radius equals the norm, which [`numerical_radius_bruteforce`] confirms
//! by exhaustive search for small `K`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functional::{
    attainment_gap, bpb_repair_functional, default_delta, project_family, round_function,
    FunctionalRepair,
};
use crate::measure::{AtomicMeasure, GridFunction, Label};
use crate::scalar::{self, ratio, Rational, Scalar};

/// Default largest point set accepted by [`numerical_radius_bruteforce`].
pub const BRUTE_FORCE_CAP: usize = 12;

/// Operator on `C(K)` for a finite `K`, given by its rows `T*(δ_t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTable<S = Rational, P = alloc::string::String> {
    points: Vec<P>,
    rows: Vec<AtomicMeasure<S, P>>,
}

impl<S: Scalar, P: Label> OperatorTable<S, P> {
    /// `rows[i][j] = T*(δ_{points[i]})({points[j]})`.
    pub fn new(points: Vec<P>, rows: Vec<Vec<S>>) -> Result<Self> {
        if rows.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: rows.len(),
            });
        }
        let rows = rows
            .into_iter()
            .map(|r| AtomicMeasure::new(points.clone(), r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, rows })
    }

    pub fn from_rows(points: Vec<P>, rows: Vec<AtomicMeasure<S, P>>) -> Result<Self> {
        if rows.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: rows.len(),
            });
        }
        if rows.iter().any(|r| r.points() != points.as_slice()) {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { points, rows })
    }

    pub fn identity(points: Vec<P>) -> Result<Self> {
        let rows = points
            .iter()
            .map(|p| AtomicMeasure::dirac(points.clone(), p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, rows })
    }

    pub fn zero(points: Vec<P>) -> Result<Self> {
        let row = AtomicMeasure::zero(points.clone())?;
        Ok(Self {
            rows: alloc::vec![row; points.len()],
            points,
        })
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn rows(&self) -> &[AtomicMeasure<S, P>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `T*(δ_t)`.
    pub fn row(&self, t: &P) -> Option<&AtomicMeasure<S, P>> {
        let i = self.points.iter().position(|p| p == t)?;
        Some(&self.rows[i])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.points != other.points {
            return Err(Error::DomainMismatch);
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points: self.points.clone(),
            rows,
        })
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<S> {
        Ok(operator_norm(&self.sub(other)?))
    }

    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> OperatorTable<T, P> {
        OperatorTable {
            points: self.points.clone(),
            rows: self.rows.iter().map(|r| r.convert(&mut f)).collect(),
        }
    }
}

/// `(Th)(t) = ⟨T*(δ_t), h⟩`.
pub fn apply<S: Scalar, P: Label>(
    t: &OperatorTable<S, P>,
    h: &GridFunction<S, P>,
) -> Result<GridFunction<S, P>> {
    if h.points() != t.points.as_slice() {
        return Err(Error::DomainMismatch);
    }
    let values = t
        .rows
        .iter()
        .map(|r| r.pairing(h))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(t.points.clone(), values)
}

/// `‖T‖ = max_t ‖T*(δ_t)‖`, which on `C(K)` is also the numerical radius.
pub fn operator_norm<S: Scalar, P: Label>(t: &OperatorTable<S, P>) -> S {
    t.rows
        .iter()
        .fold(S::zero(), |acc, r| scalar::max(acc, r.variation_norm()))
}

/// `ν(T)` by exhaustive search over `x ∈ {±1}^K` and `x* = x(t)·δ_t`, with
/// the default cap [`BRUTE_FORCE_CAP`].
pub fn numerical_radius_bruteforce<S: Scalar, P: Label>(t: &OperatorTable<S, P>) -> Result<S> {
    numerical_radius_bruteforce_capped(t, BRUTE_FORCE_CAP)
}

pub fn numerical_radius_bruteforce_capped<S: Scalar, P: Label>(
    t: &OperatorTable<S, P>,
    cap: usize,
) -> Result<S> {
    let n = t.len();
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::BruteForceCap { size: n, cap });
    }
    let mut best = S::zero();
    for pattern in 0..1usize << n {
        let x: Vec<S> = (0..n)
            .map(|j| {
                if pattern >> j & 1 == 1 {
                    -S::one()
                } else {
                    S::one()
                }
            })
            .collect();
        for (i, row) in t.rows.iter().enumerate() {
            let tx = scalar::sum(row.weights().iter().zip(&x).map(|(w, v)| w.clone() * v.clone()));
            // x* = x(t)·δ_t satisfies x*(x) = 1
            best = scalar::max(best, (x[i].clone() * tx).abs());
        }
    }
    Ok(best)
}

/// `(ε/6)⁴`, the attainment gap accepted by the operator repair.
pub fn operator_gate<S: Scalar>(eps: &S) -> S {
    let e = eps.clone() / S::from_ratio(6, 1);
    let e2 = e.clone() * e;
    e2.clone() * e2
}

/// `ε²/7`, the parameter of the functional repair in the first step.
pub fn step_one_delta<S: Scalar>(eps: &S) -> S {
    eps.clone() * eps.clone() / S::from_ratio(7, 1)
}

/// Checks `1/1296 < 1/294`, i.e. `(ε/6)⁴ < (ε²/7)²/6` for every `ε > 0`.
pub fn gate_self_test() -> Result<()> {
    let gate = ratio(1, 1296);
    let needed = ratio(1, 7 * 7 * 6);
    if gate < needed {
        Ok(())
    } else {
        Err(Error::invariant("(ε/6)⁴ does not fit under δ²/6"))
    }
}

/// The level sets used by the repair, as point labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RepairRegions<P> {
    /// `{Tf ≥ 1 − ε²/7}`.
    pub d1: Vec<P>,
    /// `{Tf ≤ −1 + ε²/7}`.
    pub d2: Vec<P>,
    /// `{Tf ≥ 1 − ε²/6}`.
    pub a1: Vec<P>,
    /// `{Tf ≤ −1 + ε²/6}`.
    pub a2: Vec<P>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCertificates<S> {
    /// `ν(T₀) = ‖T₀‖`.
    pub radius: S,
    /// `⟨μ₀, T₀f₀⟩`.
    pub pairing: S,
    /// `‖T − T₀‖`.
    pub operator_distance: S,
    /// `‖f − f₀‖∞`.
    pub f_distance: S,
    /// `‖μ − μ₀‖`.
    pub mu_distance: S,
}

impl<S: Scalar> OperatorCertificates<S> {
    pub fn hold(&self, eps: &S) -> bool {
        self.radius == S::one()
            && self.pairing == S::one()
            && self.operator_distance <= *eps
            && self.f_distance <= *eps
            && self.mu_distance <= *eps
    }
}

/// Output of [`bpb_repair_operator`].
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorRepair<S, P> {
    pub t0: OperatorTable<S, P>,
    pub f0: GridFunction<S, P>,
    pub mu0: AtomicMeasure<S, P>,
    /// The functional repair of `(Tf, μ)` at parameter `ε²/7`.
    pub step_one: FunctionalRepair<S, P>,
    pub regions: RepairRegions<P>,
    pub certificates: OperatorCertificates<S>,
}

/// Repairs `T` with `ν(T) = 1` and `(f, μ) ∈ Π` with `⟨μ, Tf⟩ ≥ 1 − (ε/6)⁴`
/// into `T₀` and `(f₀, μ₀) ∈ Π` with `⟨μ₀, T₀f₀⟩ = 1 = ν(T₀)` and all three
/// distances at most `ε`.
pub fn bpb_repair_operator<S: Scalar, P: Label>(
    t: &OperatorTable<S, P>,
    f: &GridFunction<S, P>,
    mu: &AtomicMeasure<S, P>,
    eps: &S,
) -> Result<OperatorRepair<S, P>> {
    if !eps.is_positive() || *eps >= S::one() {
        return Err(Error::precondition("operator repair needs 0 < ε < 1"));
    }
    if f.points() != t.points() || mu.points() != t.points() {
        return Err(Error::DomainMismatch);
    }
    if operator_norm(t) != S::one() {
        return Err(Error::precondition("operator repair needs ν(T) = 1"));
    }
    if f.sup_norm() != S::one() {
        return Err(Error::precondition("operator repair needs ‖f‖∞ = 1"));
    }
    if mu.variation_norm() != S::one() {
        return Err(Error::precondition("operator repair needs ‖μ‖ = 1"));
    }
    if mu.pairing(f)? != S::one() {
        return Err(Error::precondition("operator repair needs ⟨μ, f⟩ = 1"));
    }
    let tf = apply(t, f)?;
    if mu.pairing(&tf)? < S::one() - operator_gate(eps) {
        return Err(Error::precondition("operator repair needs ⟨μ, Tf⟩ ≥ 1 − (ε/6)⁴"));
    }

    // Step 1
    let delta = step_one_delta(eps);
    if operator_gate(eps) > attainment_gap(&delta) {
        return Err(Error::invariant("(ε/6)⁴ exceeds δ²/6"));
    }
    let step_one = bpb_repair_functional(&tf, mu, &delta, None)?;
    let mu0 = step_one.mu0.clone();
    if mu0.pairing(f)? != S::one() {
        return Err(Error::invariant("μ₀(f) ≠ 1"));
    }
    let one = S::one();
    let hi = |x: &S, gap: &S| *x >= one.clone() - gap.clone();
    let lo = |x: &S, gap: &S| *x <= gap.clone() - one.clone();
    let select = |pred: &dyn Fn(&S) -> bool| -> Vec<P> {
        tf.iter().filter(|(_, v)| pred(v)).map(|(p, _)| p.clone()).collect()
    };
    let gap = attainment_gap(eps);
    let regions = RepairRegions {
        d1: select(&|v| hi(v, &delta)),
        d2: select(&|v| lo(v, &delta)),
        a1: select(&|v| hi(v, &gap)),
        a2: select(&|v| lo(v, &gap)),
    };
    let in_d1 = |p: &P| regions.d1.contains(p);
    let in_d2 = |p: &P| regions.d2.contains(p);
    let on_d = mu0.variation().mass_where(|p| in_d1(p) || in_d2(p));
    let signed = mu0.mass_where(in_d1) - mu0.mass_where(in_d2);
    if on_d != S::one() || signed != S::one() {
        return Err(Error::invariant("μ₀(D₁) − μ₀(D₂) ≠ |μ₀|(D₁ ∪ D₂) = 1"));
    }

    // Step 2: g₁ = 1 on D₁, 0 on {Tf ≤ 1 − ε²/6}; g₂ mirrored with values in [−1, 0]
    let width = gap.clone() - delta.clone();
    let ramp = |x: S| scalar::clamp((x - (S::one() - gap.clone())) / width.clone(), S::zero(), S::one());
    let g1: Vec<S> = tf.values().iter().map(|v| ramp(v.clone())).collect();
    let g2: Vec<S> = tf.values().iter().map(|v| -ramp(-v.clone())).collect();

    // Step 3
    let f0 = round_function(f, eps, &default_delta(eps))?;
    let sigma = S::from_ratio(5, 6) * eps.clone();
    let pick = |region: &[P], negate: bool| -> BTreeMap<usize, AtomicMeasure<S, P>> {
        t.points
            .iter()
            .enumerate()
            .filter(|(_, p)| region.contains(p))
            .map(|(i, _)| {
                let row = &t.rows[i];
                (i, if negate { row.scale(&-S::one()) } else { row.clone() })
            })
            .collect()
    };
    let p_f = project_family(f, &f0, &pick(&regions.a1, false), &sigma, eps)?;
    let p_g = project_family(f, &f0, &pick(&regions.a2, true), &sigma, eps)?;

    let mut rows = Vec::with_capacity(t.len());
    for (i, row) in t.rows.iter().enumerate() {
        let blended = if let Some(p) = p_f.get(&i) {
            row.add(&p.sub(row)?.scale(&g1[i]))?
        } else if let Some(p) = p_g.get(&i) {
            row.add(&p.add(row)?.scale(&g2[i]))?
        } else {
            row.clone()
        };
        if blended.variation_norm() > S::one() {
            return Err(Error::invariant("blended row left the unit ball"));
        }
        rows.push(blended);
    }
    let t0 = OperatorTable {
        points: t.points.clone(),
        rows,
    };

    // Step 4
    let certificates = OperatorCertificates {
        radius: operator_norm(&t0),
        pairing: mu0.pairing(&apply(&t0, &f0)?)?,
        operator_distance: t.distance(&t0)?,
        f_distance: f.sup_distance(&f0)?,
        mu_distance: mu.distance(&mu0)?,
    };
    if !certificates.hold(eps) {
        return Err(Error::invariant("operator repair certificates failed"));
    }
    Ok(OperatorRepair {
        t0,
        f0,
        mu0,
        step_one,
        regions,
        certificates,
    })
}

/// A generated instance for [`bpb_repair_operator`].
#[derive(Clone, Debug, PartialEq)]
pub struct NearAttaining<P = alloc::string::String> {
    pub t: OperatorTable<Rational, P>,
    pub f: GridFunction<Rational, P>,
    pub mu: AtomicMeasure<Rational, P>,
}

const GRID: i64 = 20;

fn random_ratio(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    ratio(rng.gen_range(-bound..=bound), bound)
}

/// Deterministic instance with `ν(T) = 1`, `(f, μ) ∈ Π` and
/// `⟨μ, Tf⟩ ≥ 1 − (ε/6)⁴`, on the points `"0", …, "size−1"`.
///
/// Built from an exactly attaining triple (a norm-one row `t*`, `f` its
/// sign pattern, `μ = ±δ_{t*}`) by adding a random perturbation of size at
/// most half the gate and renormalising.
pub fn make_near_attaining(seed: u64, size: usize, eps: &Rational) -> NearAttaining {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = operator_gate(eps) / ratio(2, 1) * ratio(rng.gen_range(1..=GRID), GRID);
    build_instance(&mut rng, size, &eta)
}

/// [`make_near_attaining`] without the perturbation: `⟨μ, Tf⟩ = 1`.
pub fn make_attaining(seed: u64, size: usize) -> NearAttaining {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_instance(&mut rng, size, &Rational::zero())
}

fn build_instance(rng: &mut ChaCha8Rng, size: usize, eta: &Rational) -> NearAttaining {
    let n = size.max(1);
    let points: Vec<alloc::string::String> = (0..n).map(|i| alloc::format!("{i}")).collect();
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|_| (0..n).map(|_| random_ratio(rng, GRID)).collect())
        .collect();
    let star = rng.gen_range(0..n);
    m[star][star] = m[star][star].abs();
    if m[star].iter().all(|x| x.is_zero()) {
        m[star][star] = Rational::one();
    }
    let norm_of = |row: &[Rational]| scalar::sum(row.iter().map(|x| x.abs()));
    let max = m.iter().map(|r| norm_of(r)).fold(Rational::zero(), scalar::max);
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x = x.clone() / max.clone();
        }
    }
    let star_norm = norm_of(&m[star]);
    for x in m[star].iter_mut() {
        *x = x.clone() / star_norm.clone();
    }
    let s = if rng.gen_bool(0.5) { Rational::one() } else { -Rational::one() };
    let f_values: Vec<Rational> = m[star]
        .iter()
        .enumerate()
        .map(|(j, x)| {
            if !x.is_zero() {
                s.clone() * Scalar::signum(x)
            } else if j == star {
                s.clone()
            } else {
                random_ratio(rng, GRID)
            }
        })
        .collect();
    let f = GridFunction::new(points.clone(), f_values).expect("distinct labels");
    let mut mu_weights = alloc::vec![Rational::zero(); n];
    mu_weights[star] = s;
    let mu = AtomicMeasure::new(points.clone(), mu_weights).expect("distinct labels");

    if !eta.is_zero() {
        // each perturbation row has norm at most 1
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                let e = random_ratio(rng, GRID) / ratio(n as i64, 1);
                *x = x.clone() + eta.clone() * e;
            }
        }
        let max = m.iter().map(|r| norm_of(r)).fold(Rational::zero(), scalar::max);
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = x.clone() / max.clone();
            }
        }
    }
    let t = OperatorTable::new(points, m).expect("square table");
    NearAttaining { t, f, mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn pts(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn table(rows: &[&[(i64, i64)]]) -> OperatorTable {
        OperatorTable::new(
            pts(rows.len()),
            rows.iter().map(|r| r.iter().map(|&(a, b)| ratio(a, b)).collect()).collect(),
        )
        .unwrap()
    }

    fn func(v: &[(i64, i64)]) -> GridFunction {
        GridFunction::new(pts(v.len()), v.iter().map(|&(a, b)| ratio(a, b)).collect()).unwrap()
    }

    fn meas(v: &[(i64, i64)]) -> AtomicMeasure {
        AtomicMeasure::new(pts(v.len()), v.iter().map(|&(a, b)| ratio(a, b)).collect()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let h = func(&[(2, 1), (3, 1)]);
        let id: OperatorTable = OperatorTable::identity(pts(2)).unwrap();
        assert_eq!(apply(&id, &h).unwrap(), h);
        let zero: OperatorTable = OperatorTable::zero(pts(2)).unwrap();
        assert_eq!(apply(&zero, &h).unwrap(), func(&[(0, 1), (0, 1)]));
        let swap = table(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(apply(&swap, &h).unwrap(), func(&[(3, 1), (2, 1)]));
    }

    #[test]
    fn norm_examples() {
        let id: OperatorTable = OperatorTable::identity(pts(2)).unwrap();
        assert_eq!(operator_norm(&id), ratio(1, 1));
        assert_eq!(operator_norm(&table(&[&[(1, 1), (-1, 1)], &[(0, 1), (1, 2)]])), ratio(2, 1));
        let zero: OperatorTable = OperatorTable::zero(pts(3)).unwrap();
        assert_eq!(operator_norm(&zero), ratio(0, 1));
    }

    #[test]
    fn radius_examples() {
        let swap = table(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(numerical_radius_bruteforce(&swap).unwrap(), ratio(1, 1));
        let id: OperatorTable = OperatorTable::identity(pts(3)).unwrap();
        assert_eq!(numerical_radius_bruteforce(&id).unwrap(), ratio(1, 1));
        let zero: OperatorTable = OperatorTable::zero(pts(2)).unwrap();
        assert_eq!(numerical_radius_bruteforce(&zero).unwrap(), ratio(0, 1));
        let t = table(&[&[(1, 1), (-1, 1)], &[(0, 1), (1, 2)]]);
        assert_eq!(numerical_radius_bruteforce(&t).unwrap(), operator_norm(&t));
        let big: OperatorTable = OperatorTable::identity(pts(13)).unwrap();
        assert_eq!(
            numerical_radius_bruteforce(&big),
            Err(Error::BruteForceCap { size: 13, cap: 12 })
        );
    }

    #[test]
    fn gate_arithmetic() {
        assert!(gate_self_test().is_ok());
        assert_eq!(operator_gate(&ratio(1, 2)), ratio(1, 20736));
        for k in 1..10 {
            let eps = ratio(k, 10);
            assert!(operator_gate(&eps) < attainment_gap(&step_one_delta(&eps)));
        }
    }

    #[test]
    fn identity_is_left_alone() {
        let id: OperatorTable = OperatorTable::identity(pts(2)).unwrap();
        let f = func(&[(1, 1), (1, 1)]);
        let mu = meas(&[(1, 1), (0, 1)]);
        for eps in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
            let rep = bpb_repair_operator(&id, &f, &mu, &eps).unwrap();
            assert_eq!(rep.t0, id);
            assert_eq!(rep.f0, f);
            assert_eq!(rep.mu0, mu);
            assert!(rep.certificates.operator_distance.is_zero());
            assert!(rep.certificates.f_distance.is_zero());
            assert!(rep.certificates.mu_distance.is_zero());
        }
    }

    #[test]
    fn gate_rejects_far_pairs() {
        let swap = table(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let f = func(&[(1, 1), (-1, 1)]);
        let mu = meas(&[(1, 1), (0, 1)]);
        assert!(matches!(
            bpb_repair_operator(&swap, &f, &mu, &ratio(1, 2)),
            Err(Error::Precondition(_))
        ));
        let half = table(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 2)]]);
        assert!(matches!(
            bpb_repair_operator(&half, &func(&[(1, 1), (1, 1)]), &mu, &ratio(1, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn attaining_instances_repair() {
        for seed in 0..20 {
            let inst = make_attaining(seed, 2 + (seed as usize % 5));
            assert_eq!(inst.mu.pairing(&apply(&inst.t, &inst.f).unwrap()).unwrap(), ratio(1, 1));
            let rep = bpb_repair_operator(&inst.t, &inst.f, &inst.mu, &ratio(1, 2)).unwrap();
            assert!(rep.certificates.hold(&ratio(1, 2)));
        }
    }

    #[test]
    fn generated_instances_repair() {
        for seed in 0..30 {
            let eps = [ratio(1, 4), ratio(1, 2), ratio(3, 4)][seed as usize % 3].clone();
            let inst = make_near_attaining(seed, 2 + (seed as usize % 6), &eps);
            assert_eq!(inst.mu.pairing(&inst.f).unwrap(), ratio(1, 1));
            assert_eq!(operator_norm(&inst.t), ratio(1, 1));
            let rep = bpb_repair_operator(&inst.t, &inst.f, &inst.mu, &eps).unwrap();
            assert!(rep.certificates.hold(&eps));
            assert_eq!(rep.step_one.mu0.pairing(&inst.f).unwrap(), ratio(1, 1));
        }
        assert_eq!(make_near_attaining(7, 4, &ratio(1, 2)), make_near_attaining(7, 4, &ratio(1, 2)));
    }

    #[test]
    fn blend_moves_rows_between_thresholds() {
        // row 1 has Tf between 1 − ε²/6 and 1 − ε²/7: it is only partly moved
        let eps = ratio(1, 2);
        let t = table(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        let mut rows: Vec<Vec<Rational>> = t.rows().iter().map(|r| r.weights().to_vec()).collect();
        let x = ratio(1, 1) - (attainment_gap(&eps) + step_one_delta(&eps)) / ratio(2, 1);
        rows[1] = vec![ratio(0, 1), x];
        let t = OperatorTable::new(pts(2), rows).unwrap();
        let f = func(&[(1, 1), (1, 1)]);
        let mu = meas(&[(1, 1), (0, 1)]);
        let rep = bpb_repair_operator(&t, &f, &mu, &eps).unwrap();
        assert_eq!(rep.regions.a1, pts(2));
        assert_eq!(rep.regions.d1, vec!["0".to_string()]);
        assert!(rep.certificates.hold(&eps));
        assert_ne!(rep.t0.rows()[1], t.rows()[1]);
    }
}
