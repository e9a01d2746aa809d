//! Compensation function of the Cantor set at finite depth.
//!
//! A depth-`n` [`DyadicMeasure`] stores the masses `m_σ = μ(N_σ)` of the `2ⁿ`
//! cylinders of length `n`, in lexicographic order of `σ ∈ {0,1}ⁿ`. The
//! measure it stands for is the atomic measure `Σ m_σ·δ_{σ000…}`; the
//! compensation only ever reads cylinder masses, so any representative with
//! the same cylinder values gives the same output.
//!
//! The recursion runs in `n` stages over the leaf vector. Stage 1 balances
//! each pair of sibling leaves with [`d_fn`]; stage `k ≥ 2` takes each block
//! of `2ᵏ` leaves (a node `τ` at level `n − k`), sums its two halves
//! `s₀, s₁`, and when `s₀·s₁ ≠ 0` rescales the halves by
//! `1 + d(s₀,s₁)/s₀` and `1 − d(s₀,s₁)/s₁`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::compensator::Compensator;
use crate::error::{Error, Result};
use crate::measure::{d_fn, AtomicMeasure};
use crate::scalar::{self, Rational, Scalar};

/// Largest supported depth (the leaf vector has `2^depth` entries).
pub const MAX_DEPTH: usize = 24;

/// Signed measure on the Cantor set given by its cylinder masses at one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicMeasure<S = Rational> {
    depth: usize,
    leaves: Vec<S>,
}

impl<S: Scalar> DyadicMeasure<S> {
    pub fn new(depth: usize, leaves: Vec<S>) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::precondition("dyadic depth too large"));
        }
        if leaves.len() != 1 << depth {
            return Err(Error::LengthMismatch {
                expected: 1 << depth,
                found: leaves.len(),
            });
        }
        Ok(Self { depth, leaves })
    }

    pub fn zero(depth: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::precondition("dyadic depth too large"));
        }
        Self::new(depth, vec![S::zero(); 1 << depth])
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &[S] {
        &self.leaves
    }

    pub fn into_leaves(self) -> Vec<S> {
        self.leaves
    }

    pub fn total_mass(&self) -> S {
        scalar::sum(self.leaves.iter().cloned())
    }

    /// `μ(N_τ)` for the word `τ` of length `level` with binary value `index`.
    pub fn cylinder(&self, level: usize, index: usize) -> Result<S> {
        if level > self.depth {
            return Err(Error::DepthOutOfRange {
                requested: level,
                depth: self.depth,
            });
        }
        let width = 1 << (self.depth - level);
        let start = index * width;
        let block = self
            .leaves
            .get(start..start + width)
            .ok_or_else(|| Error::precondition("cylinder index out of range"))?;
        Ok(scalar::sum(block.iter().cloned()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.depth != other.depth {
            return Err(Error::DomainMismatch);
        }
        let leaves = self
            .leaves
            .iter()
            .zip(&other.leaves)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Self::new(self.depth, leaves)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            depth: self.depth,
            leaves: self.leaves.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// Converts the leaves into another scalar type.
    pub fn convert<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> DyadicMeasure<T> {
        DyadicMeasure {
            depth: self.depth,
            leaves: self.leaves.iter().map(f).collect(),
        }
    }

    /// `max_σ |self_σ − other_σ|`.
    pub fn max_deviation(&self, other: &Self) -> Result<S> {
        if self.depth != other.depth {
            return Err(Error::DomainMismatch);
        }
        Ok(self
            .leaves
            .iter()
            .zip(&other.leaves)
            .fold(S::zero(), |acc, (a, b)| {
                scalar::max(acc, (a.clone() - b.clone()).abs())
            }))
    }

    /// The atomic measure at the canonical points, labelled by their words.
    pub fn to_atomic(&self) -> AtomicMeasure<S, String> {
        let points = words(self.depth);
        AtomicMeasure::new(points, self.leaves.clone()).expect("words are distinct")
    }

    /// Inverse of [`DyadicMeasure::to_atomic`]: the labels must be exactly
    /// the words of one length, in any order.
    pub fn from_atomic(mu: &AtomicMeasure<S, String>) -> Result<Self> {
        let n = mu.len();
        if !n.is_power_of_two() {
            return Err(Error::NotDyadic);
        }
        let depth = n.trailing_zeros() as usize;
        let mut leaves = vec![None; n];
        for (label, w) in mu.iter() {
            let index = word_index(label, depth).ok_or(Error::NotDyadic)?;
            leaves[index] = Some(w.clone());
        }
        let leaves = leaves
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotDyadic)?;
        Self::new(depth, leaves)
    }
}

/// Binary word of length `depth` for leaf `index` (most significant bit
/// first), e.g. `word(2, 1) == "01"`.
pub fn word(depth: usize, index: usize) -> String {
    (0..depth)
        .map(|i| {
            if index >> (depth - 1 - i) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// All words of length `depth` in lexicographic order.
pub fn words(depth: usize) -> Vec<String> {
    (0..1usize << depth).map(|i| word(depth, i)).collect()
}

/// Leaf index of a word of length `depth`.
pub fn word_index(w: &str, depth: usize) -> Option<usize> {
    if w.len() != depth {
        return None;
    }
    w.chars().try_fold(0usize, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// Every stage `m^{(k)}` of the recursion together with the sibling sums it
/// used.
#[derive(Clone, Debug, PartialEq)]
pub struct CompensationTrace<S = Rational> {
    pub depth: usize,
    /// `stages[k][σ] = m^{(k)}_σ` for `k = 0..=depth`.
    pub stages: Vec<Vec<S>>,
    /// `sibling_sums[k − 1][τ] = (s_{τ,0}, s_{τ,1})` for stage `k ≥ 1`, one
    /// entry per node `τ` at level `depth − k`. For `k = 1` these are the
    /// two sibling leaf values.
    pub sibling_sums: Vec<Vec<(S, S)>>,
}

impl<S: Scalar> CompensationTrace<S> {
    /// The final stage `m̃_σ = m^{(n)}_σ`.
    pub fn output(&self) -> &[S] {
        self.stages.last().expect("stage 0 always present")
    }
}

fn run_stages<S: Scalar>(mu: &DyadicMeasure<S>) -> CompensationTrace<S> {
    let n = mu.depth;
    let len = mu.leaves.len();
    let mut stages = Vec::with_capacity(n + 1);
    let mut sibling_sums = Vec::with_capacity(n);
    stages.push(mu.leaves.clone());
    for k in 1..=n {
        let prev = &stages[k - 1];
        let mut next = prev.clone();
        let block = 1usize << k;
        let half = block / 2;
        let mut sums = Vec::with_capacity(len / block);
        for start in (0..len).step_by(block) {
            if k == 1 {
                let (a, b) = (&prev[start], &prev[start + 1]);
                let d = d_fn(a, b);
                next[start] = a.clone() + d.clone();
                next[start + 1] = b.clone() - d;
                sums.push((a.clone(), b.clone()));
                continue;
            }
            let s0 = scalar::sum(prev[start..start + half].iter().cloned());
            let s1 = scalar::sum(prev[start + half..start + block].iter().cloned());
            if !s0.is_zero() && !s1.is_zero() {
                let d = d_fn(&s0, &s1);
                if !d.is_zero() {
                    let f0 = S::one() + d.clone() / s0.clone();
                    let f1 = S::one() - d / s1.clone();
                    for x in &mut next[start..start + half] {
                        *x = x.clone() * f0.clone();
                    }
                    for x in &mut next[start + half..start + block] {
                        *x = x.clone() * f1.clone();
                    }
                }
            }
            sums.push((s0, s1));
        }
        stages.push(next);
        sibling_sums.push(sums);
    }
    CompensationTrace {
        depth: n,
        stages,
        sibling_sums,
    }
}

/// The compensation `ξ(μ)` of a dyadic measure: zero when `μ(C) < 0`,
/// otherwise the leaves `m̃_σ` of the staged recursion.
pub fn compensate_cantor<S: Scalar>(mu: &DyadicMeasure<S>) -> DyadicMeasure<S> {
    if mu.total_mass().is_negative() {
        return DyadicMeasure {
            depth: mu.depth,
            leaves: vec![S::zero(); mu.leaves.len()],
        };
    }
    let trace = run_stages(mu);
    DyadicMeasure {
        depth: mu.depth,
        leaves: trace.stages.into_iter().last().expect("stage 0 always present"),
    }
}

/// Full stage table of the recursion; defined when `μ(C) ≥ 0`.
pub fn stage_trace<S: Scalar>(mu: &DyadicMeasure<S>) -> Result<CompensationTrace<S>> {
    if mu.total_mass().is_negative() {
        return Err(Error::NegativeTotalMass);
    }
    Ok(run_stages(mu))
}

/// Coarsening to depth `m`: the leaf at `τ` is the mass of the cylinder `N_τ`.
pub fn marginal<S: Scalar>(mu: &DyadicMeasure<S>, m: usize) -> Result<DyadicMeasure<S>> {
    if m > mu.depth {
        return Err(Error::DepthOutOfRange {
            requested: m,
            depth: mu.depth,
        });
    }
    let width = 1 << (mu.depth - m);
    let leaves = mu
        .leaves
        .chunks(width)
        .map(|c| scalar::sum(c.iter().cloned()))
        .collect();
    DyadicMeasure::new(m, leaves)
}

/// [`compensate_cantor`] as a [`Compensator`] on measures whose labels are
/// the binary words of one depth.
#[derive(Clone, Copy, Debug, Default)]
pub struct CantorCompensation;

impl<S: Scalar> Compensator<S, String> for CantorCompensation {
    fn compensate(&self, mu: &AtomicMeasure<S, String>) -> Result<AtomicMeasure<S, String>> {
        let out = compensate_cantor(&DyadicMeasure::from_atomic(mu)?).to_atomic();
        out.reindexed(mu.points())
    }
}

/// A failure of the local bound `|m^{(k)}_σ(μ') − m^{(k)}_σ(μ)| ≤
/// |m^{(k−1)}_σ(μ') − m^{(k−1)}_σ(μ)|` at a leaf whose half-block sum vanishes
/// at the base measure `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DominationViolation {
    /// Probe index `k` (perturbation `direction / k`).
    pub probe: u64,
    pub stage: usize,
    pub leaf: usize,
}

/// Outcome of [`continuity_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport<S = Rational> {
    /// `max_σ |ξ(μ + direction/k)_σ − ξ(μ)_σ|` for `k = 1..=steps`.
    pub deviations: Vec<S>,
    /// Deviations along the geometric refinement `k = steps·2^j`.
    pub tail: Vec<(u64, S)>,
    /// Number of zero-branch stage comparisons evaluated.
    pub domination_checks: usize,
    pub domination_violations: Vec<DominationViolation>,
    /// Probes whose own trace broke `|m^{(k)}_σ| ≤ |m^{(k−1)}_σ|`.
    pub monotonicity_violations: Vec<u64>,
}

impl<S: Scalar> ContinuityReport<S> {
    /// Whether the tail deviations die out: the second half of the tail is
    /// non-increasing and its last value is zero or at most a quarter of the
    /// largest tail deviation.
    pub fn is_vanishing(&self) -> bool {
        let Some((_, last)) = self.tail.last() else {
            return true;
        };
        let settled = self.tail[self.tail.len() / 2..]
            .windows(2)
            .all(|w| w[1].1 <= w[0].1);
        let peak = self
            .tail
            .iter()
            .fold(S::zero(), |acc, (_, d)| scalar::max(acc, d.clone()));
        settled && (last.is_zero() || last.clone() * S::from_ratio(4, 1) <= peak)
    }

    pub fn passed(&self) -> bool {
        self.is_vanishing()
            && self.domination_violations.is_empty()
            && self.monotonicity_violations.is_empty()
    }
}

/// Refinements used for the tail of a continuity probe.
pub const PROBE_TAIL_DOUBLINGS: u32 = 10;

/// Probes continuity of [`compensate_cantor`] at `μ` along `direction`.
///
/// For `k = 1..=steps` (and along `k = steps·2^j`) it compares `ξ(μ + direction/k)`
/// with `ξ(μ)`, and at every stage where a half-block sum vanishes at `μ` it
/// checks the stage-to-stage domination bound that carries continuity
/// through the zero-sum branch.
pub fn continuity_probe<S: Scalar>(
    mu: &DyadicMeasure<S>,
    direction: &DyadicMeasure<S>,
    steps: u64,
) -> Result<ContinuityReport<S>> {
    if steps == 0 {
        return Err(Error::precondition("continuity probe needs at least one step"));
    }
    if mu.depth != direction.depth {
        return Err(Error::DomainMismatch);
    }
    let base = stage_trace(mu)?;
    let zero_halves = zero_half_leaves(&base);

    let mut report = ContinuityReport {
        deviations: Vec::with_capacity(steps as usize),
        tail: Vec::new(),
        domination_checks: 0,
        domination_violations: Vec::new(),
        monotonicity_violations: Vec::new(),
    };

    let probe = |k: u64, report: &mut ContinuityReport<S>| -> Result<S> {
        let step = S::one() / S::from_ratio(k as i64, 1);
        let perturbed = mu.add(&direction.scale(&step))?;
        let trace = stage_trace(&perturbed).map_err(|_| {
            Error::precondition("perturbed measure has negative total mass")
        })?;
        if !stages_monotone(&trace) {
            report.monotonicity_violations.push(k);
        }
        for &(stage, leaf) in &zero_halves {
            report.domination_checks += 1;
            let diff = |j: usize| (trace.stages[j][leaf].clone() - base.stages[j][leaf].clone()).abs();
            if diff(stage) > diff(stage - 1) {
                report.domination_violations.push(DominationViolation {
                    probe: k,
                    stage,
                    leaf,
                });
            }
        }
        Ok(trace
            .output()
            .iter()
            .zip(base.output())
            .fold(S::zero(), |acc, (a, b)| {
                scalar::max(acc, (a.clone() - b.clone()).abs())
            }))
    };

    for k in 1..=steps {
        let dev = probe(k, &mut report)?;
        report.deviations.push(dev);
    }
    for j in 0..=PROBE_TAIL_DOUBLINGS {
        let k = steps << j;
        let dev = probe(k, &mut report)?;
        report.tail.push((k, dev));
    }
    Ok(report)
}

/// `(stage, leaf)` pairs where the half-block containing the leaf has zero
/// sum at stage `stage ≥ 2` of the base trace.
fn zero_half_leaves<S: Scalar>(trace: &CompensationTrace<S>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 2..=trace.depth {
        let block = 1usize << k;
        let half = block / 2;
        for (b, (s0, s1)) in trace.sibling_sums[k - 1].iter().enumerate() {
            let start = b * block;
            if s0.is_zero() {
                out.extend((start..start + half).map(|leaf| (k, leaf)));
            }
            if s1.is_zero() {
                out.extend((start + half..start + block).map(|leaf| (k, leaf)));
            }
        }
    }
    out
}

/// `|m^{(k)}_σ| ≤ |m^{(k−1)}_σ|` for every stage and leaf.
pub fn stages_monotone<S: Scalar>(trace: &CompensationTrace<S>) -> bool {
    trace
        .stages
        .windows(2)
        .all(|w| w[1].iter().zip(&w[0]).all(|(a, b)| a.abs() <= b.abs()))
}
