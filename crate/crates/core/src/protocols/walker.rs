//! One description of each protocol tree, two ways to walk it: exact
//! enumeration of every branch, or a single sampled path.

use rand::Rng;

use crate::error::Result;
use crate::protocols::outcome::{Outcome, OutcomeDistribution};
use crate::scalar::Scalar;
use crate::wstate::WClassState;

pub(crate) type Next<'a, W, T> = &'a mut dyn FnMut(&mut W, T, WClassState<T>) -> Result<()>;

pub(crate) trait Walker<T: Scalar>: Sized {
    /// Continues with `next` on every outcome (enumeration) or on one of them
    /// (sampling). `weight` is the probability of reaching this node.
    fn branch(&mut self, weight: T, outcomes: Vec<(T, WClassState<T>)>, next: Next<'_, Self, T>) -> Result<()>;

    fn leaf(&mut self, weight: T, outcome: Outcome<T>);
}

pub(crate) struct Enumerator<T: Scalar> {
    pub dist: OutcomeDistribution<T>,
}

impl<T: Scalar> Default for Enumerator<T> {
    fn default() -> Self {
        Self { dist: OutcomeDistribution::new() }
    }
}

impl<T: Scalar> Walker<T> for Enumerator<T> {
    fn branch(&mut self, weight: T, outcomes: Vec<(T, WClassState<T>)>, next: Next<'_, Self, T>) -> Result<()> {
        for (p, s) in outcomes {
            next(self, weight.clone() * p, s)?;
        }
        Ok(())
    }

    fn leaf(&mut self, weight: T, outcome: Outcome<T>) {
        self.dist.add(outcome, weight);
    }
}

pub(crate) struct Sampler<'r, R: Rng> {
    pub rng: &'r mut R,
    pub result: Option<Outcome<f64>>,
}

impl<'r, R: Rng> Sampler<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        Self { rng, result: None }
    }
}

/// Index drawn with probability proportional to `weights`.
pub(crate) fn pick<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = weights.clone().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

impl<R: Rng> Walker<f64> for Sampler<'_, R> {
    fn branch(&mut self, _weight: f64, mut outcomes: Vec<(f64, WClassState<f64>)>, next: Next<'_, Self, f64>) -> Result<()> {
        if outcomes.is_empty() {
            return Ok(());
        }
        let idx = pick(self.rng, outcomes.iter().map(|(p, _)| *p));
        let (_, s) = outcomes.swap_remove(idx);
        next(self, 1.0, s)
    }

    fn leaf(&mut self, _weight: f64, outcome: Outcome<f64>) {
        self.result = Some(outcome);
    }
}
