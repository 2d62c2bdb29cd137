//! Weak-measurement distillation of uniform W states.
//!
//! In every round each party of the current support applies the pair
//! `{diag(√(1−ε), 1), diag(√ε, 0)}`. The "vanish" outcome removes the party;
//! the survivors always share a uniform W state. From a support of size `s`
//! exactly `v` parties vanish with probability
//! `C(s−1, v) ε^v (1−ε)^(s−1−v)`, every vanish set of that size being equally
//! likely. Two survivors are an EPR pair, one survivor is a product state, and
//! three or more continue in the next round.
//!
//! The process is symmetric under permutations of the support, so the exact
//! distribution follows from a chain on the support size alone.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::protocols::outcome::{Outcome, OutcomeDistribution};
use crate::wstate::WClassState;

/// Round budget used when none is given: enough rounds for the leftover
/// residual mass to drop far below double precision.
pub fn default_rounds(eps: f64) -> usize {
    ((60.0 / eps).ceil() as usize).clamp(1, 100_000_000)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidMeasurement(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Support of `s` if it is a uniform W state on at least three parties.
pub fn uniform_support(s: &WClassState<f64>) -> Result<Vec<usize>> {
    let support = s.support();
    let m = support.len();
    let share = 1.0 / m as f64;
    let uniform = m >= 3 && s.x0().abs() <= 1e-12 && support.iter().all(|&p| (s.component(p) - share).abs() <= 1e-12);
    if uniform {
        Ok(support)
    } else {
        Err(Error::NotUniformW)
    }
}

/// `P(v vanish | size s)` for `v = 0..s`.
fn vanish_pmf(s: usize, eps: f64) -> Vec<f64> {
    let trials = s - 1;
    let mut pmf = vec![0.0; s];
    let ln_eps = eps.ln();
    let ln_keep = (-eps).ln_1p();
    let mut ln_binom = 0.0f64;
    for (v, slot) in pmf.iter_mut().enumerate() {
        if v > 0 {
            ln_binom += ((trials - v + 1) as f64).ln() - (v as f64).ln();
        }
        *slot = (ln_binom + v as f64 * ln_eps + (trials - v) as f64 * ln_keep).exp();
    }
    pmf
}

/// Result of the size chain started from a support of size `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeChain {
    pub epr: f64,
    pub product: f64,
    /// Leftover mass by support size (index = size) after the round budget.
    pub residual: Vec<f64>,
    pub rounds: usize,
}

pub fn size_chain(m: usize, eps: f64, max_rounds: usize) -> Result<SizeChain> {
    check_eps(eps)?;
    if m < 3 {
        return Err(Error::NotUniformW);
    }
    let pmfs: Vec<Vec<f64>> = (0..=m).map(|s| if s >= 3 { vanish_pmf(s, eps) } else { Vec::new() }).collect();
    let mut mass = vec![0.0; m + 1];
    mass[m] = 1.0;
    let (mut epr, mut product) = (0.0, 0.0);
    let mut rounds = 0;
    while rounds < max_rounds && mass.iter().sum::<f64>() > 1e-300 {
        let mut next = vec![0.0; m + 1];
        for s in 3..=m {
            if mass[s] == 0.0 {
                continue;
            }
            for (v, p) in pmfs[s].iter().enumerate() {
                let w = mass[s] * p;
                match s - v {
                    2 => epr += w,
                    1 => product += w,
                    r => next[r] += w,
                }
            }
        }
        mass = next;
        rounds += 1;
    }
    Ok(SizeChain { epr, product, residual: mass, rounds })
}

fn subsets(items: &[usize], size: usize, out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, start: usize) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for idx in start..items.len() {
        if items.len() - idx < size - current.len() {
            break;
        }
        current.push(items[idx]);
        subsets(items, size, out, current, idx + 1);
        current.pop();
    }
}

fn uniform_on(n: usize, parties: &[usize]) -> Result<WClassState<f64>> {
    let share = 1.0 / parties.len() as f64;
    WClassState::new((0..n).map(|p| if parties.contains(&p) { share } else { 0.0 }).collect())
}

/// Exact outcome distribution of at most `max_rounds` rounds on a uniform W
/// state. Mass still entangled when the budget runs out is reported as
/// residual W states.
pub fn fortescue_lo(s: &WClassState<f64>, eps: f64, max_rounds: usize) -> Result<OutcomeDistribution<f64>> {
    check_eps(eps)?;
    let support = uniform_support(s)?;
    let m = support.len();
    let n = s.n_parties();
    let chain = size_chain(m, eps, max_rounds)?;
    let mut dist = OutcomeDistribution::new();
    let pairs = (m * (m - 1) / 2) as f64;
    if chain.epr > 0.0 {
        for (a, &i) in support.iter().enumerate() {
            for &j in &support[a + 1..] {
                dist.add(Outcome::epr(i, j), chain.epr / pairs);
            }
        }
    }
    for (size, &mass) in chain.residual.iter().enumerate() {
        if mass <= 0.0 {
            continue;
        }
        let mut groups = Vec::new();
        subsets(&support, size, &mut groups, &mut Vec::new(), 0);
        let share = mass / groups.len() as f64;
        for g in groups {
            dist.add(Outcome::ResidualW(uniform_on(n, &g)?), share);
        }
    }
    if chain.product > 0.0 {
        dist.add(Outcome::Product, chain.product);
    }
    Ok(dist)
}

/// Samples one run. Stretches of all-"equal" rounds are skipped in one
/// geometric draw.
pub fn sample_fortescue_lo<R: Rng + ?Sized>(rng: &mut R, s: &WClassState<f64>, eps: f64, max_rounds: usize) -> Result<Outcome<f64>> {
    check_eps(eps)?;
    let mut support = uniform_support(s)?;
    let n = s.n_parties();
    let mut left = max_rounds;
    while support.len() >= 3 {
        let size = support.len();
        let pmf = vanish_pmf(size, eps);
        let stay = pmf[0];
        // rounds until the first round with at least one vanish
        let u: f64 = 1.0 - rng.random::<f64>();
        let waits = if stay <= 0.0 { 0.0 } else { (u.ln() / stay.ln()).floor() };
        if waits >= left as f64 {
            break;
        }
        left -= waits as usize + 1;
        let v = 1 + crate::protocols::walker::pick(rng, pmf[1..].iter().copied());
        let mut gone: Vec<usize> = sample(rng, size, v).into_vec();
        gone.sort_unstable_by(|a, b| b.cmp(a));
        for idx in gone {
            support.remove(idx);
        }
    }
    Ok(match support.len() {
        0 | 1 => Outcome::Product,
        2 => Outcome::epr(support[0], support[1]),
        _ => Outcome::ResidualW(uniform_on(n, &support)?),
    })
}
