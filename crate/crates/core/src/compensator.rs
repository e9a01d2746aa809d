use crate::error::Result;
use crate::measure::{compensate_single, AtomicMeasure, Label};
use crate::scalar::Scalar;

/// A procedure assigning to each measure on a fixed finite space one of its
/// compensations.
pub trait Compensator<S: Scalar, P: Label> {
    fn compensate(&self, mu: &AtomicMeasure<S, P>) -> Result<AtomicMeasure<S, P>>;
}

impl<S, P, F> Compensator<S, P> for F
where
    S: Scalar,
    P: Label,
    F: Fn(&AtomicMeasure<S, P>) -> Result<AtomicMeasure<S, P>>,
{
    fn compensate(&self, mu: &AtomicMeasure<S, P>) -> Result<AtomicMeasure<S, P>> {
        self(mu)
    }
}

/// [`compensate_single`] as a [`Compensator`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SingleCompensation;

impl<S: Scalar, P: Label> Compensator<S, P> for SingleCompensation {
    fn compensate(&self, mu: &AtomicMeasure<S, P>) -> Result<AtomicMeasure<S, P>> {
        Ok(compensate_single(mu))
    }
}
