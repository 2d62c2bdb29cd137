use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::protocols::fortescue_lo::{sample_fortescue_lo, uniform_support};
use crate::protocols::outcome::{Outcome, OutcomeDistribution};
use crate::protocols::schemes::{combing_walk, ev_order, ev_walk, require_x0_zero};
use crate::protocols::walker::Sampler;
use crate::protocols::Protocol;
use crate::wstate::{check_party, WClassState};

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEntry {
    pub outcome: Outcome<f64>,
    pub count: u64,
    pub frequency: f64,
    /// Binomial standard error `√(f(1−f)/trials)`.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub seed: u64,
    pub entries: Vec<MonteCarloEntry>,
}

fn std_error(f: f64, trials: u64) -> f64 {
    (f * (1.0 - f) / trials as f64).sqrt()
}

impl MonteCarloReport {
    pub fn distribution(&self) -> OutcomeDistribution<f64> {
        let mut d = OutcomeDistribution::new();
        for e in &self.entries {
            d.add(e.outcome.clone(), e.frequency);
        }
        d
    }

    /// Empirical total EPR frequency and its standard error.
    pub fn epr_total(&self) -> (f64, f64) {
        let count: u64 = self
            .entries
            .iter()
            .filter(|e| matches!(e.outcome, Outcome::Epr { .. }))
            .map(|e| e.count)
            .sum();
        let f = count as f64 / self.trials as f64;
        (f, std_error(f, self.trials))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = e.outcome.to_json();
                v["count"] = e.count.into();
                v["frequency"] = e.frequency.into();
                v["std_error"] = e.std_error.into();
                v
            })
            .collect();
        serde_json::json!({ "trials": self.trials, "seed": self.seed, "entries": entries })
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<24}{:>10}{:>18}{:>18}\n", "outcome", "count", "frequency", "std_error");
        for e in &self.entries {
            out.push_str(&format!(
                "{:<24}{:>10}{:>18.12}{:>18.12}\n",
                e.outcome.label(),
                e.count,
                e.frequency,
                e.std_error
            ));
        }
        out
    }
}

fn sample_once(protocol: &Protocol, s: &WClassState<f64>, rng: &mut ChaCha8Rng) -> Result<Outcome<f64>> {
    Ok(match protocol {
        Protocol::Ev | Protocol::Complete { .. } => {
            let mut w = Sampler::new(rng);
            ev_walk(&mut w, 1.0, s.clone(), &ev_order(s))?;
            let o = w.result.unwrap_or(Outcome::Product);
            match (protocol, o) {
                (Protocol::Complete { eps, max_rounds }, Outcome::ResidualW(r)) if uniform_support(&r).is_ok() => {
                    sample_fortescue_lo(rng, &r, *eps, *max_rounds)?
                }
                (_, o) => o,
            }
        }
        Protocol::Combing { party } => {
            let mut w = Sampler::new(rng);
            combing_walk(&mut w, 1.0, s.clone(), *party)?;
            w.result.unwrap_or(Outcome::Product)
        }
        Protocol::FortescueLo { eps, max_rounds } => sample_fortescue_lo(rng, s, *eps, *max_rounds)?,
    })
}

/// Samples `trials` independent runs of `protocol`. Trial `t` draws from the
/// ChaCha8 stream `t` of `seed`, so the result depends only on `seed` and not
/// on thread scheduling.
pub fn simulate_monte_carlo(protocol: &Protocol, s: &WClassState<f64>, trials: u64, seed: u64) -> Result<MonteCarloReport> {
    if !matches!(protocol, Protocol::FortescueLo { .. }) {
        require_x0_zero(s)?;
    }
    match protocol {
        Protocol::FortescueLo { .. } => {
            uniform_support(s)?;
        }
        Protocol::Combing { party } => check_party(*party, s.n_parties())?,
        _ => {}
    }
    let samples: Vec<Outcome<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            sample_once(protocol, s, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut counts = OutcomeDistribution::<f64>::new();
    for o in samples {
        counts.add(o, 1.0);
    }
    let entries = counts
        .entries()
        .iter()
        .map(|(outcome, c)| {
            let frequency = c / trials as f64;
            MonteCarloEntry {
                outcome: outcome.clone(),
                count: *c as u64,
                frequency,
                std_error: std_error(frequency, trials),
            }
        })
        .collect();
    Ok(MonteCarloReport { trials, seed, entries })
}
