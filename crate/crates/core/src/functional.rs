//! Parametric Bishop-Phelps-Bollobás repair for functionals on a finite C(K).
//!
//! Given `f` in the unit ball of `C(K)` and a family of measures that almost
//! attain their norm on `f`, [`round_function`] pushes the near-extremal
//! values of `f` out to `±1`, and [`project_family`] moves each measure to
//! one that attains its norm on the rounded function, by splitting it along
//! the bumps `u`, `v`, compensating each half, and normalising.
//!
//! Every Tietze extension is realised as a clamped linear ramp in the value
//! of `f`, so all outputs are explicit and exact.

use alloc::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::{compensate_single, AtomicMeasure, GridFunction, Label};
use crate::scalar::{self, Scalar};

fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

/// `ε²/6`, the attainment gap accepted by the functional repair.
pub fn attainment_gap<S: Scalar>(eps: &S) -> S {
    eps.clone() * eps.clone() / S::from_ratio(6, 1)
}

fn check_bump_params<S: Scalar>(sigma: &S, eps: &S) -> Result<()> {
    if !sigma.is_positive() || sigma >= eps {
        return Err(Error::precondition("bump parameters need 0 < σ < ε"));
    }
    Ok(())
}

/// Ramp equal to 1 on `{f ≥ 1−σ}`, 0 on `{f ≤ 1−ε}`, linear in `f` between.
pub fn bump_u<S: Scalar, P: Label>(
    f: &GridFunction<S, P>,
    sigma: &S,
    eps: &S,
) -> Result<GridFunction<S, P>> {
    check_bump_params(sigma, eps)?;
    let width = eps.clone() - sigma.clone();
    let floor = S::one() - eps.clone();
    Ok(f.map(|x| scalar::clamp((x.clone() - floor.clone()) / width.clone(), S::zero(), S::one())))
}

/// Ramp equal to 1 on `{f ≤ −1+σ}`, 0 on `{f ≥ −1+ε}`, linear in `f` between.
pub fn bump_v<S: Scalar, P: Label>(
    f: &GridFunction<S, P>,
    sigma: &S,
    eps: &S,
) -> Result<GridFunction<S, P>> {
    bump_u(&f.map(|x| -x.clone()), sigma, eps)
}

/// The split measures `μ₁ = u·μ` and `μ₂ = v·μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPair<S, P> {
    pub mu1: AtomicMeasure<S, P>,
    pub mu2: AtomicMeasure<S, P>,
}

pub fn split_measure<S: Scalar, P: Label>(
    mu: &AtomicMeasure<S, P>,
    f: &GridFunction<S, P>,
    sigma: &S,
    eps: &S,
) -> Result<SplitPair<S, P>> {
    if *eps >= S::one() {
        return Err(Error::precondition("split needs ε < 1"));
    }
    let u = bump_u(f, sigma, eps)?;
    let v = bump_v(f, sigma, eps)?;
    Ok(SplitPair {
        mu1: mu.density_multiply(&u)?,
        mu2: mu.density_multiply(&v)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One evaluated inequality `lhs ≤ rhs` or `lhs ≥ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck<S> {
    pub label: &'static str,
    pub lhs: S,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> InequalityCheck<S> {
    pub fn at_most(label: &'static str, lhs: S, rhs: S) -> Self {
        Self { label, lhs, relation: Relation::AtMost, rhs }
    }

    pub fn at_least(label: &'static str, lhs: S, rhs: S) -> Self {
        Self { label, lhs, relation: Relation::AtLeast, rhs }
    }

    /// Distance to violation; non-negative exactly when the inequality holds.
    pub fn slack(&self) -> S {
        match self.relation {
            Relation::AtMost => self.rhs.clone() - self.lhs.clone(),
            Relation::AtLeast => self.lhs.clone() - self.rhs.clone(),
        }
    }

    pub fn holds(&self) -> bool {
        !self.slack().is_negative()
    }
}

/// The four inequalities satisfied by the split measures of `μ` along `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitBounds<S> {
    pub checks: alloc::vec::Vec<InequalityCheck<S>>,
}

impl<S: Scalar> SplitBounds<S> {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(InequalityCheck::holds)
    }
}

/// Evaluates, for `r = (1 − μ(f))/σ`:
/// (i) `‖μ₁‖ ≤ 1`, `‖μ₂‖ ≤ 1`; (ii) `‖μ₁⁺‖ + ‖μ₂⁻‖ ≥ 1 − r`;
/// (iii) `‖μ₁⁻‖ + ‖μ₂⁺‖ ≤ r`; (iv) `‖μ − μ₁ − μ₂‖ ≤ r`.
pub fn basiclemma_check<S: Scalar, P: Label>(
    f: &GridFunction<S, P>,
    mu: &AtomicMeasure<S, P>,
    sigma: &S,
    eps: &S,
) -> Result<SplitBounds<S>> {
    if f.sup_norm() > S::one() {
        return Err(Error::precondition("needs ‖f‖∞ ≤ 1"));
    }
    if mu.variation_norm() > S::one() {
        return Err(Error::precondition("needs ‖μ‖ ≤ 1"));
    }
    let split = split_measure(mu, f, sigma, eps)?;
    let r = (S::one() - mu.pairing(f)?) / sigma.clone();
    let (p1, n1) = split.mu1.jordan();
    let (p2, n2) = split.mu2.jordan();
    let rest = mu.sub(&split.mu1)?.sub(&split.mu2)?;
    Ok(SplitBounds {
        checks: alloc::vec![
            InequalityCheck::at_most("i.mu1", split.mu1.variation_norm(), S::one()),
            InequalityCheck::at_most("i.mu2", split.mu2.variation_norm(), S::one()),
            InequalityCheck::at_least(
                "ii",
                p1.total_mass() + n2.total_mass(),
                S::one() - r.clone(),
            ),
            InequalityCheck::at_most("iii", n1.total_mass() + p2.total_mass(), r.clone()),
            InequalityCheck::at_most("iv", rest.variation_norm(), r),
        ],
    })
}

/// Rounds `f` to a norm-one `f₀` with `‖f − f₀‖∞ ≤ ε` whose `±1` level sets
/// contain those of `f`.
///
/// `f₀ = ±1` where `|f| ≥ 1−ε` (with the sign of `f`), `f₀ = f` where
/// `|f| ≤ 1−δ`, and on the bands between
/// `f₀ = f ± ε·(|f| − (1−δ))/(δ − ε)`.
pub fn round_function<S: Scalar, P: Label>(
    f: &GridFunction<S, P>,
    eps: &S,
    delta: &S,
) -> Result<GridFunction<S, P>> {
    let norm = f.sup_norm();
    if norm > S::one() {
        return Err(Error::precondition("rounding needs ‖f‖∞ ≤ 1"));
    }
    if !(S::one() - norm < *eps && eps < delta && *delta < S::one()) {
        return Err(Error::precondition("rounding needs 1 − ‖f‖∞ < ε < δ < 1"));
    }
    let plateau = S::one() - eps.clone();
    let flat = S::one() - delta.clone();
    let width = delta.clone() - eps.clone();
    Ok(f.map(|x| {
        let a = x.abs();
        if a >= plateau {
            x.signum()
        } else if a <= flat {
            x.clone()
        } else {
            let shift = eps.clone() * (a - flat.clone()) / width.clone();
            x.clone() + x.signum() * shift
        }
    }))
}

/// Moves every `F(t)` of a near-attaining family to `P(t) = Q(t)/‖Q(t)‖`,
/// where `Q(t) = ξ(F₁(t)) − ξ(−F₂(t))` is built from the split measures and
/// single-measure compensations.
///
/// Preconditions: `‖f‖∞ ≤ 1`, `0 < ε < 1`, `σ = 5ε/6`, and every `F(t)` has
/// `‖F(t)‖ ≤ 1` and `⟨F(t), f⟩ ≥ 1 − ε²/6`. Each output attains its norm
/// one on `f0` and lies within `ε` of its input; both facts are verified
/// before returning.
pub fn project_family<S: Scalar, P: Label, I: Ord + Clone>(
    f: &GridFunction<S, P>,
    f0: &GridFunction<S, P>,
    family: &BTreeMap<I, AtomicMeasure<S, P>>,
    sigma: &S,
    eps: &S,
) -> Result<BTreeMap<I, AtomicMeasure<S, P>>> {
    if !eps.is_positive() || *eps >= S::one() {
        return Err(Error::precondition("projection needs 0 < ε < 1"));
    }
    if *sigma != S::from_ratio(5, 6) * eps.clone() {
        return Err(Error::precondition("projection needs σ = 5ε/6"));
    }
    if f.sup_norm() > S::one() {
        return Err(Error::precondition("projection needs ‖f‖∞ ≤ 1"));
    }
    if f.points() != f0.points() {
        return Err(Error::DomainMismatch);
    }
    let threshold = S::one() - attainment_gap(eps);
    let norm_floor = S::one() - two::<S>() * eps.clone() / S::from_ratio(5, 1);
    let mut out = BTreeMap::new();
    for (t, ft) in family {
        if ft.variation_norm() > S::one() {
            return Err(Error::precondition("family member outside the unit ball"));
        }
        if ft.pairing(f)? < threshold {
            return Err(Error::precondition("family member pairs below 1 − ε²/6"));
        }
        let split = split_measure(ft, f, sigma, eps)?;
        let xi1 = compensate_single(&split.mu1);
        let xi2 = compensate_single(&split.mu2.scale(&-S::one()));
        let q = xi1.sub(&xi2)?;
        let qn = q.variation_norm();
        if qn < norm_floor || !qn.is_positive() {
            return Err(Error::invariant("‖Q(t)‖ fell below 1 − 2ε/5"));
        }
        let p = q.scale(&(S::one() / qn));
        if p.variation_norm() != S::one() || p.pairing(f0)? != S::one() {
            return Err(Error::invariant("projected measure does not attain on f₀"));
        }
        if p.distance(ft)? > *eps {
            return Err(Error::invariant("projected measure moved more than ε"));
        }
        out.insert(t.clone(), p);
    }
    Ok(out)
}

/// Output of [`bpb_repair_functional`].
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalRepair<S, P> {
    pub f0: GridFunction<S, P>,
    pub mu0: AtomicMeasure<S, P>,
    /// `‖f − f₀‖∞`.
    pub f_distance: S,
    /// `‖μ − μ₀‖`.
    pub mu_distance: S,
    /// `⟨μ₀, f₀⟩`.
    pub pairing: S,
}

/// Default rounding parameter `δ = (1 + ε)/2`.
pub fn default_delta<S: Scalar>(eps: &S) -> S {
    (S::one() + eps.clone()) / two::<S>()
}

/// Repairs `(f, μ)` with `⟨μ, f⟩ ≥ 1 − ε²/6` into an exactly attaining pair
/// `(f₀, μ₀)` with `‖f − f₀‖∞ ≤ ε` and `‖μ − μ₀‖ ≤ ε`.
///
/// `delta` is the rounding parameter of [`round_function`] and defaults to
/// [`default_delta`].
pub fn bpb_repair_functional<S: Scalar, P: Label>(
    f: &GridFunction<S, P>,
    mu: &AtomicMeasure<S, P>,
    eps: &S,
    delta: Option<&S>,
) -> Result<FunctionalRepair<S, P>> {
    if !eps.is_positive() || *eps >= S::one() {
        return Err(Error::precondition("repair needs 0 < ε < 1"));
    }
    if f.sup_norm() > S::one() {
        return Err(Error::precondition("repair needs ‖f‖∞ ≤ 1"));
    }
    if mu.variation_norm() > S::one() {
        return Err(Error::precondition("repair needs ‖μ‖ ≤ 1"));
    }
    if mu.pairing(f)? < S::one() - attainment_gap(eps) {
        return Err(Error::precondition("repair needs ⟨μ, f⟩ ≥ 1 − ε²/6"));
    }
    let delta = delta.cloned().unwrap_or_else(|| default_delta(eps));
    let f0 = round_function(f, eps, &delta)?;
    let sigma = S::from_ratio(5, 6) * eps.clone();
    let family = BTreeMap::from([((), mu.clone())]);
    let mu0 = project_family(f, &f0, &family, &sigma, eps)?
        .remove(&())
        .expect("one-member family");
    let repair = FunctionalRepair {
        f_distance: f.sup_distance(&f0)?,
        mu_distance: mu.distance(&mu0)?,
        pairing: mu0.pairing(&f0)?,
        f0,
        mu0,
    };
    if repair.pairing != S::one() || repair.f_distance > *eps || repair.mu_distance > *eps {
        return Err(Error::invariant("functional repair certificates failed"));
    }
    Ok(repair)
}

/// Whether every Hahn decomposition of `μ` also decomposes `μ₀`. Atoms where
/// `μ` vanishes may sit in either part, so `μ₀` has to vanish there too.
pub fn hahn_compatible<S: Scalar, P: Label>(
    mu: &AtomicMeasure<S, P>,
    mu0: &AtomicMeasure<S, P>,
) -> bool {
    mu.same_domain(mu0)
        && mu.iter().zip(mu0.weights()).all(|((_, w), w0)| {
            if w.is_positive() {
                !w0.is_negative()
            } else if w.is_negative() {
                !w0.is_positive()
            } else {
                w0.is_zero()
            }
        })
}

/// `supp(μ₀) ⊆ supp(μ)`, the atom-wise form of `μ₀ ≪ μ`.
pub fn support_contained<S: Scalar, P: Label>(
    mu: &AtomicMeasure<S, P>,
    mu0: &AtomicMeasure<S, P>,
) -> bool {
    mu.same_domain(mu0)
        && mu
            .weights()
            .iter()
            .zip(mu0.weights())
            .all(|(w, w0)| !w.is_zero() || w0.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use alloc::string::{String, ToString};
    use alloc::vec::Vec;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    fn func(v: &[(i64, i64)]) -> GridFunction {
        GridFunction::new(labels(v.len()), v.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    fn meas(v: &[(i64, i64)]) -> AtomicMeasure {
        AtomicMeasure::new(labels(v.len()), v.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn bump_examples() {
        let (s, e) = (r(1, 2), r(3, 5));
        let f = func(&[(1, 1), (0, 1), (45, 100), (-45, 100), (-1, 1)]);
        let u = bump_u(&f, &s, &e).unwrap();
        assert_eq!(u.values(), &[r(1, 1), r(0, 1), r(1, 2), r(0, 1), r(0, 1)]);
        let v = bump_v(&f, &s, &e).unwrap();
        assert_eq!(v.values(), &[r(0, 1), r(0, 1), r(0, 1), r(1, 2), r(1, 1)]);
        assert!(bump_u(&f, &e, &s).is_err());
        assert!(bump_u(&f, &r(0, 1), &s).is_err());
    }

    #[test]
    fn split_example() {
        let f = func(&[(1, 1), (0, 1), (-1, 1)]);
        let mu = meas(&[(1, 2), (1, 10), (-2, 5)]);
        let split = split_measure(&mu, &f, &r(1, 2), &r(3, 5)).unwrap();
        assert_eq!(split.mu1, meas(&[(1, 2), (0, 1), (0, 1)]));
        assert_eq!(split.mu2, meas(&[(0, 1), (0, 1), (-2, 5)]));
        let zero = meas(&[(0, 1), (0, 1), (0, 1)]);
        let split = split_measure(&zero, &f, &r(1, 2), &r(3, 5)).unwrap();
        assert!(split.mu1.is_zero() && split.mu2.is_zero());
        let split = split_measure(&mu, &func(&[(0, 1); 3]), &r(1, 2), &r(3, 5)).unwrap();
        assert!(split.mu1.is_zero() && split.mu2.is_zero());
    }

    #[test]
    fn basiclemma_example() {
        let f = func(&[(1, 1), (0, 1), (-1, 1)]);
        let mu = meas(&[(1, 2), (1, 10), (-2, 5)]);
        let report = basiclemma_check(&f, &mu, &r(1, 2), &r(3, 5)).unwrap();
        assert!(report.all_hold());
        let by_label = |l: &str| report.checks.iter().find(|c| c.label == l).unwrap().clone();
        assert_eq!((by_label("ii").lhs, by_label("ii").rhs), (r(9, 10), r(4, 5)));
        assert_eq!((by_label("iii").lhs, by_label("iii").rhs), (r(0, 1), r(1, 5)));
        assert_eq!((by_label("iv").lhs, by_label("iv").rhs), (r(1, 10), r(1, 5)));
    }

    #[test]
    fn basiclemma_tight_on_attaining_pairs() {
        let f = func(&[(1, 1), (-1, 1)]);
        let mu = meas(&[(1, 2), (-1, 2)]);
        let report = basiclemma_check(&f, &mu, &r(1, 2), &r(3, 5)).unwrap();
        let ii = report.checks.iter().find(|c| c.label == "ii").unwrap();
        assert_eq!(ii.rhs, r(1, 1));
        assert!(ii.slack().is_zero());
    }

    #[test]
    fn rounding_examples() {
        let f = func(&[(1, 1), (0, 1)]);
        assert_eq!(round_function(&f, &r(1, 2), &r(3, 4)).unwrap(), f);
        // band endpoints: 1−ε ↦ 1 and 1−δ ↦ itself
        let f = func(&[(1, 1), (1, 2), (1, 4), (-1, 2), (3, 8)]);
        let f0 = round_function(&f, &r(1, 2), &r(3, 4)).unwrap();
        assert_eq!(f0.values()[1], r(1, 1));
        assert_eq!(f0.values()[2], r(1, 4));
        assert_eq!(f0.values()[3], r(-1, 1));
        // midway through the band: 3/8 + (1/2)(1/8)/(1/4) = 5/8
        assert_eq!(f0.values()[4], r(5, 8));
        assert!(f.sup_distance(&f0).unwrap() <= r(1, 2));
        assert!(round_function(&f, &r(3, 4), &r(1, 2)).is_err());
        assert!(round_function(&func(&[(1, 4)]), &r(1, 2), &r(3, 4)).is_err());
    }

    #[test]
    fn project_dirac_under_constant_one() {
        let f = func(&[(1, 1), (1, 1)]);
        let eps = r(1, 2);
        let f0 = round_function(&f, &eps, &default_delta(&eps)).unwrap();
        let family = BTreeMap::from([(0, meas(&[(1, 1), (0, 1)])), (1, meas(&[(0, 1), (1, 1)]))]);
        let out = project_family(&f, &f0, &family, &(r(5, 6) * eps.clone()), &eps).unwrap();
        assert_eq!(out, family);
    }

    #[test]
    fn project_attaining_member_keeps_attaining_part() {
        let f = func(&[(1, 1), (-1, 1)]);
        let eps = r(1, 2);
        let f0 = round_function(&f, &eps, &default_delta(&eps)).unwrap();
        let mu = meas(&[(1, 4), (-3, 4)]);
        let family = BTreeMap::from([(0, mu.clone())]);
        let out = project_family(&f, &f0, &family, &(r(5, 6) * eps.clone()), &eps).unwrap();
        assert_eq!(out[&0], mu);
    }

    #[test]
    fn project_rejects_far_member() {
        let f = func(&[(1, 1), (0, 1)]);
        let eps = r(1, 2);
        let f0 = round_function(&f, &eps, &default_delta(&eps)).unwrap();
        let family = BTreeMap::from([(0, meas(&[(1, 2), (1, 2)]))]);
        assert!(matches!(
            project_family(&f, &f0, &family, &(r(5, 6) * eps.clone()), &eps),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn repair_examples() {
        let f = func(&[(1, 1), (0, 1)]);
        let mu = meas(&[(1, 1), (0, 1)]);
        let rep = bpb_repair_functional(&f, &mu, &r(1, 2), None).unwrap();
        assert_eq!(rep.f0, f);
        assert_eq!(rep.mu0, mu);
        assert!(rep.f_distance.is_zero() && rep.mu_distance.is_zero());

        let f = func(&[(1, 1), (1, 1)]);
        let mu = meas(&[(1, 2), (1, 2)]);
        let rep = bpb_repair_functional(&f, &mu, &r(1, 2), None).unwrap();
        assert_eq!(rep.f0, f);
        assert_eq!(rep.pairing, r(1, 1));
        assert!(rep.mu_distance <= r(1, 2));
    }

    #[test]
    fn repair_at_the_gate() {
        // ⟨μ, f⟩ = 1 − ε²/6 exactly, with mass leaking onto a middle value.
        let eps = r(1, 2);
        let gap = attainment_gap(&eps);
        let f = func(&[(1, 1), (0, 1), (-1, 1)]);
        let mu = AtomicMeasure::new(
            labels(3),
            alloc::vec![r(1, 2) - gap.clone(), gap.clone(), -(r(1, 2))],
        )
        .unwrap();
        assert_eq!(mu.pairing(&f).unwrap(), r(1, 1) - gap);
        let rep = bpb_repair_functional(&f, &mu, &eps, None).unwrap();
        assert_eq!(rep.pairing, r(1, 1));
        assert!(rep.mu_distance <= eps);
        assert!(hahn_compatible(&mu, &rep.mu0));
        assert!(support_contained(&mu, &rep.mu0));
    }

    #[test]
    fn repair_gate_rejects() {
        let f = func(&[(1, 1), (0, 1)]);
        let mu = meas(&[(1, 2), (1, 2)]);
        assert!(matches!(
            bpb_repair_functional(&f, &mu, &r(1, 2), None),
            Err(Error::Precondition(_))
        ));
    }
}
