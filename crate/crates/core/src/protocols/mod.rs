//! LOCC random-distillation protocols on W-class states with `x0 = 0`, their
//! exact outcome trees and a Monte Carlo sampler.

mod fortescue_lo;
mod graph;
mod monte_carlo;
mod outcome;
mod schemes;
mod separable;
mod walker;

pub use fortescue_lo::{default_rounds, fortescue_lo, sample_fortescue_lo, size_chain, uniform_support, SizeChain};
pub use graph::DistillationGraph;
pub use monte_carlo::{simulate_monte_carlo, MonteCarloEntry, MonteCarloReport};
pub use outcome::{Outcome, OutcomeDistribution};
pub use schemes::{combing, combing_distribution, combing_probability, ev_measurement, ev_scheme, CombingResult};
pub use separable::{sep_combing_measurement, w_state_vector, ProductOperator, SeparableMeasurement, SeparableOutcome};

use crate::error::Result;
use crate::monotones::kappa;
use crate::wstate::WClassState;

/// The e/v scheme followed by weak-measurement distillation of every residual
/// W state it leaves.
pub fn complete_distribution(s: &WClassState<f64>, eps: f64, max_rounds: usize) -> Result<OutcomeDistribution<f64>> {
    let ev = ev_scheme(s)?;
    let mut out = OutcomeDistribution::new();
    for (o, p) in ev.entries() {
        match o {
            Outcome::ResidualW(w) if uniform_support(w).is_ok() => {
                out.merge(&fortescue_lo(w, eps, max_rounds)?, p);
            }
            _ => out.add(o.clone(), *p),
        }
    }
    Ok(out)
}

/// Total EPR probability of [`complete_distribution`] with the default round
/// budget. Never exceeds `κ(s)` and approaches it as `eps → 0`.
pub fn complete_probability(s: &WClassState<f64>, eps: f64) -> Result<f64> {
    let total = complete_distribution(s, eps, default_rounds(eps))?.epr_total();
    debug_assert!(total <= kappa(s) + 1e-9, "P_tot = {total} exceeds κ = {}", kappa(s));
    Ok(total)
}

/// Protocol selector for sampling and the CLI.
#[derive(Clone, Debug, PartialEq)]
pub enum Protocol {
    Ev,
    FortescueLo { eps: f64, max_rounds: usize },
    Combing { party: usize },
    Complete { eps: f64, max_rounds: usize },
}

impl Protocol {
    /// Exact outcome distribution.
    pub fn enumerate(&self, s: &WClassState<f64>) -> Result<OutcomeDistribution<f64>> {
        match self {
            Self::Ev => ev_scheme(s),
            Self::FortescueLo { eps, max_rounds } => fortescue_lo(s, *eps, *max_rounds),
            Self::Combing { party } => combing_distribution(s, *party),
            Self::Complete { eps, max_rounds } => complete_distribution(s, *eps, *max_rounds),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ev => "ev",
            Self::FortescueLo { .. } => "fl",
            Self::Combing { .. } => "combing",
            Self::Complete { .. } => "complete",
        }
    }
}
