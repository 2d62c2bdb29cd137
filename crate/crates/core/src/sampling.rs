//! Random states and measurements for property checks.
//!
//! States are drawn from a flat Dirichlet distribution over `(x0, x1, …, xN)`
//! with extra mass on the boundary: some draws force `x0 = 0`, some zero out
//! a few components.

use num_complex::Complex64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::scalar::Rational;
use crate::wstate::{KrausOp, LocalMeasurement, WClassState};

fn dirichlet<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Boundary-biased random W-class state on `n` parties.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WClassState<f64> {
    let force_x0_zero = rng.random_bool(0.3);
    let mut weights = dirichlet(rng, n + 1);
    if force_x0_zero {
        weights[0] = 0.0;
    }
    if n > 2 && rng.random_bool(0.2) {
        let zeros = rng.random_range(1..n - 1);
        let mut parties: Vec<usize> = (1..=n).collect();
        parties.shuffle(rng);
        for &p in &parties[..zeros] {
            weights[p] = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    let comps = weights[1..].iter().map(|w| w / total).collect();
    WClassState::new(comps).expect("normalized sample")
}

/// Random state with `x0 = 0` and every component at least `floor`.
pub fn random_interior_state<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> WClassState<f64> {
    let free = 1.0 - floor * n as f64;
    assert!(free > 0.0, "floor too large for {n} parties");
    let comps = dirichlet(rng, n).into_iter().map(|w| floor + free * w).collect();
    WClassState::new(comps).expect("normalized sample")
}

/// Random exact state with `x0 = 0` whose components are multiples of
/// `1/denominator` (some may be zero).
pub fn random_rational_state<R: Rng + ?Sized>(rng: &mut R, n: usize, denominator: u32) -> WClassState<Rational> {
    let mut cuts: Vec<u32> = (0..n - 1).map(|_| rng.random_range(0..=denominator)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(denominator - prev);
    if parts.iter().filter(|p| !p.is_zero()).count() < 2 {
        // keep at least some entanglement
        parts = (0..n).map(|i| if i < 2 { denominator / 2 } else { 0 }).collect();
        parts[1] = denominator - parts[0];
    }
    parts.shuffle(rng);
    let comps = parts
        .into_iter()
        .map(|p| Rational::new(p.into(), denominator.into()))
        .collect();
    WClassState::new(comps).expect("normalized sample")
}

/// Complete diagonal measurement with `a, c` uniform in `[0, 1]`.
pub fn random_diagonal_measurement<R: Rng + ?Sized>(rng: &mut R, party: usize) -> LocalMeasurement {
    LocalMeasurement::diagonal(party, rng.random::<f64>(), rng.random::<f64>()).expect("valid diagonal pair")
}

/// Complete measurement with nonzero off-diagonal entries `b1, b2` chosen so that
/// `√a1 b1 + √a2 b2 = 0`.
pub fn random_coherent_measurement<R: Rng + ?Sized>(rng: &mut R, party: usize) -> LocalMeasurement {
    let a1: f64 = rng.random_range(0.05..0.95);
    let a2 = 1.0 - a1;
    let b1_sq: f64 = rng.random_range(0.01..0.95) * a2;
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let b1 = Complex64::from_polar(b1_sq.sqrt(), phase);
    let b2 = -b1 * (a1 / a2).sqrt();
    let spare = 1.0 - b1.norm_sqr() - b2.norm_sqr();
    let split = rng.random::<f64>();
    LocalMeasurement::new(
        party,
        KrausOp { a: a1, b: b1, c: split * spare },
        KrausOp { a: a2, b: b2, c: (1.0 - split) * spare },
    )
    .expect("valid coherent pair")
}

/// Measurement close to `(a, c) = (1/2, 1/2)`.
pub fn random_weak_measurement<R: Rng + ?Sized>(rng: &mut R, party: usize) -> LocalMeasurement {
    let a = 0.5 + rng.random_range(-0.05..0.05);
    let c = 0.5 + rng.random_range(-0.05..0.05);
    LocalMeasurement::diagonal(party, a, c).expect("valid diagonal pair")
}

/// Mixture of diagonal, weak and coherent measurements by a random party.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LocalMeasurement {
    let party = rng.random_range(0..n);
    match rng.random_range(0..3) {
        0 => random_diagonal_measurement(rng, party),
        1 => random_weak_measurement(rng, party),
        _ => random_coherent_measurement(rng, party),
    }
}
