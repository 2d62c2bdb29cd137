//! The equal-or-vanish scheme and the combing protocols.

use crate::error::{Error, Result};
use crate::monotones::eta;
use crate::protocols::outcome::{Outcome, OutcomeDistribution};
use crate::protocols::walker::{Enumerator, Walker};
use crate::scalar::Scalar;
use crate::wstate::{apply_diagonal, check_party, DiagonalMeasurement, WClassState};

pub(crate) fn require_x0_zero<T: Scalar>(s: &WClassState<T>) -> Result<()> {
    if s.x0().abs() > T::tolerance() {
        return Err(Error::NonzeroX0(s.x0().to_f64()));
    }
    Ok(())
}

/// The pair `{diag(√(x_k/x_max), 1), diag(√(1 − x_k/x_max), 0)}` for party `k`:
/// the first outcome raises `k` to the current maximum, the second removes it.
pub fn ev_measurement<T: Scalar>(s: &WClassState<T>, k: usize) -> Result<DiagonalMeasurement<T>> {
    check_party(k, s.n_parties())?;
    let top = s.max_component();
    if top <= T::zero() {
        return Err(Error::InvalidMeasurement("e/v pair undefined on the vacuum".into()));
    }
    DiagonalMeasurement::new(k, s.component(k).clone() / top, T::one())
}

pub(crate) fn ev_walk<T: Scalar, W: Walker<T>>(w: &mut W, weight: T, s: WClassState<T>, order: &[usize]) -> Result<()> {
    let Some((&k, rest)) = order.split_first() else {
        w.leaf(weight, Outcome::classify(s));
        return Ok(());
    };
    if s.support().len() < 2 {
        w.leaf(weight, Outcome::Product);
        return Ok(());
    }
    if s.component(k).is_zero() {
        return ev_walk(w, weight, s, rest);
    }
    let m = ev_measurement(&s, k)?;
    let outcomes = apply_diagonal(&s, &m)?;
    w.branch(weight, outcomes, &mut |w, wt, s| ev_walk(w, wt, s, rest))
}

/// Parties `n2, …, nN` in descending-component order.
pub(crate) fn ev_order<T: Scalar>(s: &WClassState<T>) -> Vec<usize> {
    s.sorted_indices().as_slice()[1..].to_vec()
}

/// Exact outcome tree of the equal-or-vanish scheme.
///
/// Parties `n2, …, nN` measure in descending-component order. A branch where
/// only `n1` and one other party `k` said "equal" ends in EPR(n1, k); two or
/// more "equal" parties leave a uniform W state on those parties and `n1`;
/// all "vanish" leaves a product state.
pub fn ev_scheme<T: Scalar>(s: &WClassState<T>) -> Result<OutcomeDistribution<T>> {
    require_x0_zero(s)?;
    let mut e = Enumerator::default();
    ev_walk(&mut e, T::one(), s.clone(), &ev_order(s))?;
    Ok(e.dist)
}

/// Distills an EPR pair between `k` and `l` from `s`: every other party measures
/// in the computational basis, then the party with the larger component filters
/// down to the smaller one. Succeeds with probability `2 min(x_k, x_l)`.
pub(crate) fn pair_walk<T: Scalar, W: Walker<T>>(w: &mut W, weight: T, s: WClassState<T>, k: usize, l: usize) -> Result<()> {
    if s.component(k).is_zero() || s.component(l).is_zero() {
        w.leaf(weight, Outcome::classify(s));
        return Ok(());
    }
    if let Some(m) = (0..s.n_parties()).find(|&m| m != k && m != l && !s.component(m).is_zero()) {
        let outcomes = apply_diagonal(&s, &DiagonalMeasurement::computational(m))?;
        return w.branch(weight, outcomes, &mut |w, wt, s| pair_walk(w, wt, s, k, l));
    }
    let (xk, xl) = (s.component(k).clone(), s.component(l).clone());
    if xk == xl {
        w.leaf(weight, Outcome::epr(k, l));
        return Ok(());
    }
    let (big, ratio) = if xk > xl { (k, xl / xk) } else { (l, xk / xl) };
    let filter = DiagonalMeasurement::new(big, T::one(), ratio)?;
    let outcomes = apply_diagonal(&s, &filter)?;
    // outcome 1 balances the pair; outcome 2 collapses onto `big`
    w.branch(weight, outcomes, &mut |w, wt, s| {
        w.leaf(wt, Outcome::classify(s));
        Ok(())
    })
}

pub(crate) fn combing_walk<T: Scalar, W: Walker<T>>(w: &mut W, weight: T, s: WClassState<T>, k: usize) -> Result<()> {
    if s.component(k).is_zero() || s.support().len() < 2 {
        w.leaf(weight, Outcome::classify(s));
        return Ok(());
    }
    let top = s.max_component();
    if *s.component(k) < top {
        let partner = s.sorted_indices().first();
        return pair_walk(w, weight, s, k, partner);
    }
    let others: Vec<usize> = s.sorted_indices().as_slice().iter().copied().filter(|&p| p != k).collect();
    comb_others(w, weight, s, k, &others)
}

/// `k` holds the maximum: the others run e/v in turn, and the first one to
/// reach the maximum pairs up with `k`.
fn comb_others<T: Scalar, W: Walker<T>>(w: &mut W, weight: T, s: WClassState<T>, k: usize, order: &[usize]) -> Result<()> {
    let Some((&l, rest)) = order.split_first() else {
        w.leaf(weight, Outcome::classify(s));
        return Ok(());
    };
    if s.component(l).is_zero() {
        return comb_others(w, weight, s, k, rest);
    }
    let m = ev_measurement(&s, l)?;
    let outcomes = apply_diagonal(&s, &m)?;
    w.branch(weight, outcomes, &mut |w, wt, s| {
        if s.component(l).is_zero() {
            comb_others(w, wt, s, k, rest)
        } else {
            pair_walk(w, wt, s, k, l)
        }
    })
}

/// Exact outcome tree of the combing protocol that targets party `k`.
pub fn combing_distribution<T: Scalar>(s: &WClassState<T>, k: usize) -> Result<OutcomeDistribution<T>> {
    require_x0_zero(s)?;
    check_party(k, s.n_parties())?;
    let mut e = Enumerator::default();
    combing_walk(&mut e, T::one(), s.clone(), k)?;
    Ok(e.dist)
}

/// Optimal probability that party `k` ends up EPR-entangled with someone:
/// `2 x_k` if some party has a larger component, `2 η(s)` otherwise.
pub fn combing_probability<T: Scalar>(s: &WClassState<T>, k: usize) -> Result<T> {
    require_x0_zero(s)?;
    check_party(k, s.n_parties())?;
    let two = T::from_usize(2);
    if *s.component(k) < s.max_component() {
        Ok(two * s.component(k).clone())
    } else {
        Ok(two * eta(s))
    }
}

/// Combing probability together with the total of the witnessing protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct CombingResult<T = f64> {
    pub formula: T,
    pub enumerated: T,
    pub distribution: OutcomeDistribution<T>,
}

pub fn combing<T: Scalar>(s: &WClassState<T>, k: usize) -> Result<CombingResult<T>> {
    let formula = combing_probability(s, k)?;
    let distribution = combing_distribution(s, k)?;
    Ok(CombingResult { formula, enumerated: distribution.epr_with(k), distribution })
}
