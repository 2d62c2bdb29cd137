//! The W-class LOCC monotones η and κ.
//!
//! With components sorted as `x_{n1} ≥ x_{n2} ≥ … ≥ x_{nN}`:
//!
//! ```text
//! η(x) = x_{n1} − (1/x_{n1})^{N−2} · Π_{i≥2} (x_{n1} − x_{ni})
//! κ(x) = Σ_{i≥2} x_{ni} + η(x)
//! ```
//!
//! Both are also defined on the unnormalized restriction of a state to a
//! subset of parties. `η` is set to 0 on the all-zero vector (its limit).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::wstate::{apply_measurement, check_party, LocalMeasurement, WClassState};

/// η on an arbitrary (possibly unnormalized) nonnegative component list.
pub fn eta_of<T: Scalar>(values: &[T]) -> T {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let Some(top) = sorted.first().cloned() else {
        return T::zero();
    };
    if top <= T::zero() {
        return T::zero();
    }
    let n = sorted.len();
    if n == 1 {
        return T::zero();
    }
    let mut product = T::one();
    for x in &sorted[1..] {
        product = product * (top.clone() - x.clone());
    }
    top.clone() - product / top.powi(n - 2)
}

pub fn kappa_of<T: Scalar>(values: &[T]) -> T {
    let total = values.iter().cloned().fold(T::zero(), |acc, x| acc + x);
    let top = values.iter().cloned().fold(T::zero(), Scalar::max_of);
    total - top + eta_of(values)
}

pub fn eta<T: Scalar>(s: &WClassState<T>) -> T {
    eta_of(s.components())
}

pub fn kappa<T: Scalar>(s: &WClassState<T>) -> T {
    kappa_of(s.components())
}

fn restrict<T: Scalar>(s: &WClassState<T>, subset: &[usize]) -> Result<Vec<T>> {
    let mut parties = subset.to_vec();
    parties.sort_unstable();
    parties.dedup();
    if parties.len() < 2 {
        return Err(Error::SubsetTooSmall(parties.len()));
    }
    for &p in &parties {
        check_party(p, s.n_parties())?;
    }
    Ok(parties.iter().map(|&p| s.component(p).clone()).collect())
}

/// η of the unnormalized restriction of `s` to `subset`.
pub fn eta_subset<T: Scalar>(s: &WClassState<T>, subset: &[usize]) -> Result<T> {
    Ok(eta_of(&restrict(s, subset)?))
}

pub fn kappa_subset<T: Scalar>(s: &WClassState<T>, subset: &[usize]) -> Result<T> {
    Ok(kappa_of(&restrict(s, subset)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub eta: f64,
    pub kappa: f64,
    /// The Kintaş–Turgut monotones: `x1, …, xN` followed by `−x0`.
    pub kt_components: Vec<f64>,
}

impl MonotoneReport {
    pub fn new<T: Scalar>(s: &WClassState<T>) -> Self {
        let mut kt_components: Vec<f64> = s.components().iter().map(Scalar::to_f64).collect();
        kt_components.push(0.0 - s.x0().to_f64());
        Self { eta: eta(s).to_f64(), kappa: kappa(s).to_f64(), kt_components }
    }

    /// Fixed-width text table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<12}{:>16}\n", "monotone", "value"));
        out.push_str(&format!("{:<12}{:>16.12}\n", "eta", self.eta));
        out.push_str(&format!("{:<12}{:>16.12}\n", "kappa", self.kappa));
        let n = self.kt_components.len() - 1;
        for (i, x) in self.kt_components[..n].iter().enumerate() {
            out.push_str(&format!("{:<12}{:>16.12}\n", format!("x{}", i + 1), x));
        }
        out.push_str(&format!("{:<12}{:>16.12}\n", "-x0", self.kt_components[n]));
        out
    }
}

/// Which function [`average_change`] evaluates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonotoneSelector {
    Eta,
    Kappa,
    /// Component `x_i` of party `i`.
    Component(usize),
    /// `−x0`.
    NegX0,
    EtaSubset(Vec<usize>),
    KappaSubset(Vec<usize>),
}

impl MonotoneSelector {
    pub fn evaluate(&self, s: &WClassState<f64>) -> Result<f64> {
        Ok(match self {
            Self::Eta => eta(s),
            Self::Kappa => kappa(s),
            Self::Component(i) => {
                check_party(*i, s.n_parties())?;
                *s.component(*i)
            }
            Self::NegX0 => -*s.x0(),
            Self::EtaSubset(sub) => eta_subset(s, sub)?,
            Self::KappaSubset(sub) => kappa_subset(s, sub)?,
        })
    }
}

/// `(f(s), Σ_λ p_λ f(s_λ))` for one local measurement.
pub fn average_change(s: &WClassState<f64>, m: &LocalMeasurement, f: &MonotoneSelector) -> Result<(f64, f64)> {
    let before = f.evaluate(s)?;
    let mut after = 0.0;
    for (p, outcome) in apply_measurement(s, m)? {
        after += p * f.evaluate(&outcome)?;
    }
    Ok((before, after))
}

/// Whether the arg-max party of `s` is also the arg-max party of every outcome
/// of `m` (the hypothesis under which η cannot increase on average).
pub fn preserves_top_party(s: &WClassState<f64>, m: &LocalMeasurement) -> Result<bool> {
    let top = s.sorted_indices().first();
    Ok(apply_measurement(s, m)?
        .iter()
        .all(|(_, outcome)| outcome.sorted_indices().first() == top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn state(v: &[(i64, i64)]) -> WClassState<Rational> {
        WClassState::new(v.iter().map(|&(n, d)| r(n, d)).collect()).unwrap()
    }

    #[test]
    fn eta_examples() {
        let w3 = WClassState::<Rational>::uniform(3).unwrap();
        assert_eq!(eta(&w3), r(1, 3));
        let psi = WClassState::<Rational>::psi_half(3).unwrap();
        // 1/2 − 2·(1/4)² and 2η = 1 − (1 − 1/2)²
        assert_eq!(eta(&psi), r(3, 8));
        assert_eq!(r(2, 1) * eta(&psi), r(1, 1) - r(1, 4));
        let product = state(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(eta(&product), r(0, 1));
    }

    #[test]
    fn eta_degenerate_all_zero() {
        assert_eq!(eta_of::<f64>(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(kappa_of::<f64>(&[0.0, 0.0]), 0.0);
        let vacuum = WClassState::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(eta(&vacuum), 0.0);
    }

    #[test]
    fn kappa_examples() {
        let w3 = WClassState::<Rational>::uniform(3).unwrap();
        assert_eq!(kappa(&w3), r(1, 1));
        let psi = WClassState::<Rational>::psi_half(3).unwrap();
        assert_eq!(kappa(&psi), r(7, 8));
        let epr = WClassState::<Rational>::uniform(2).unwrap();
        assert_eq!(kappa(&epr), r(1, 1));
        // two parties: κ = 2 x_{n2}
        let s = state(&[(3, 4), (1, 4)]);
        assert_eq!(kappa(&s), r(1, 2));
    }

    #[test]
    fn kappa_is_one_on_tied_maximum() {
        let s = state(&[(3, 10), (3, 10), (1, 5), (1, 5)]);
        assert_eq!(kappa(&s), r(1, 1));
        assert_eq!(eta(&s), r(3, 10));
    }

    #[test]
    fn subset_variant_matches_three_party_formula() {
        let s = state(&[(1, 5), (2, 5), (1, 10), (3, 10)]);
        let (xmax, xmid, xmin) = (r(2, 5), r(1, 5), r(1, 10));
        let expected = r(2, 1) * xmid.clone() + r(2, 1) * xmin.clone() - xmid * xmin / xmax;
        assert_eq!(kappa_subset(&s, &[0, 1, 2]).unwrap(), expected);
        assert_eq!(kappa_subset(&s, &[0, 1, 2, 3]).unwrap(), kappa(&s));
        assert_eq!(eta_subset(&s, &[3, 2, 1, 0]).unwrap(), eta(&s));
        let z = state(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(eta_subset(&z, &[1, 2]).unwrap(), r(0, 1));
        assert_eq!(kappa_subset(&z, &[1, 2]).unwrap(), r(0, 1));
        assert!(matches!(eta_subset(&s, &[1]), Err(Error::SubsetTooSmall(1))));
        assert!(matches!(eta_subset(&s, &[1, 1]), Err(Error::SubsetTooSmall(1))));
        assert!(kappa_subset(&s, &[0, 9]).is_err());
    }

    #[test]
    fn identity_leaves_average_unchanged() {
        let s = WClassState::new(vec![0.4, 0.3, 0.2]).unwrap();
        for sel in [MonotoneSelector::Eta, MonotoneSelector::Kappa, MonotoneSelector::NegX0] {
            let (before, after) = average_change(&s, &LocalMeasurement::identity(1), &sel).unwrap();
            assert!((before - after).abs() < 1e-15);
        }
    }

    #[test]
    fn top_party_measurement_strictly_lowers_kappa() {
        let s = WClassState::new(vec![0.45, 0.3, 0.2]).unwrap();
        let m = LocalMeasurement::diagonal(0, 0.3, 0.6).unwrap();
        let (before, after) = average_change(&s, &m, &MonotoneSelector::Kappa).unwrap();
        assert!(after < before - 1e-6, "{after} vs {before}");
    }

    #[test]
    fn lower_party_measurement_keeps_eta_in_check() {
        let s = WClassState::new(vec![0.5, 0.3, 0.2]).unwrap();
        let m = LocalMeasurement::diagonal(2, 0.45, 0.55).unwrap();
        assert!(preserves_top_party(&s, &m).unwrap());
        let (before, after) = average_change(&s, &m, &MonotoneSelector::Eta).unwrap();
        assert!(after <= before + 1e-12);
    }

    #[test]
    fn report_table_lists_all_monotones() {
        let s = WClassState::<f64>::uniform(3).unwrap();
        let rep = MonotoneReport::new(&s);
        assert!((rep.eta - 1.0 / 3.0).abs() < 1e-15);
        assert!((rep.kappa - 1.0).abs() < 1e-15);
        assert_eq!(rep.kt_components.len(), 4);
        let table = rep.table();
        assert!(table.contains("eta") && table.contains("-x0"));
        assert_eq!(table.lines().count(), 7);
    }
}
