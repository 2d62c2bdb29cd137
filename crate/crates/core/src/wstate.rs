//! W-class states and single-party measurements.
//!
//! An `N`-qubit W-class state `√x0|0…0⟩ + √x1|10…0⟩ + … + √xN|0…01⟩` is
//! labelled, up to local unitaries, by its component vector `(x1, …, xN)`;
//! `x0 = 1 − Σ xi` is derived. For two parties the labelling is made unique by
//! the convention `x0 = 0`, `x1 ≥ x2` (Schmidt form), applied on construction.
//!
//! Local measurements are two-outcome pairs of upper-triangular Kraus operators
//! `[[√a, b], [0, √c]]`. [`apply_measurement`] works at amplitude level and so
//! handles non-diagonal operators; [`apply_diagonal`] is the exact component
//! update for diagonal pairs and is generic over [`Scalar`].

use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcomes with probability below this are dropped by [`apply_measurement`].
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct WClassState<T = f64> {
    components: Vec<T>,
    x0: T,
}

impl<T: Scalar> WClassState<T> {
    /// Validates and canonicalizes a component vector `(x1, …, xN)`.
    pub fn new(components: Vec<T>) -> Result<Self> {
        let n = components.len();
        if n < 2 {
            return Err(Error::TooFewParties(n));
        }
        let tol = T::tolerance();
        let mut sum = T::zero();
        for (index, x) in components.iter().enumerate() {
            if *x < -tol.clone() {
                return Err(Error::NegativeComponent { index, value: x.to_f64() });
            }
            sum = sum + x.clone();
        }
        if sum > T::one() + tol {
            return Err(Error::NormExceeded { sum: sum.to_f64() });
        }
        let components = components
            .into_iter()
            .map(|x| Scalar::min_of(Scalar::max_of(x, T::zero()), T::one()))
            .collect();
        Self::canonical(components)
    }

    /// Builds a state from already-validated, normalized data.
    pub(crate) fn canonical(mut components: Vec<T>) -> Result<Self> {
        let total = components.iter().cloned().fold(T::zero(), |acc, x| acc + x);
        let mut x0 = Scalar::max_of(T::one() - total, T::zero());
        if components.len() == 2 {
            if x0 > T::zero() {
                // Schmidt coefficients: λ1 + λ2 = 1, λ1·λ2 = x1·x2.
                let prod = components[0].clone() * components[1].clone();
                let disc = Scalar::max_of(T::one() - T::from_usize(4) * prod, T::zero());
                let root = disc.sqrt().ok_or_else(|| {
                    Error::NotRepresentable(format!(
                        "two-party state with x0 = {x0} has irrational Schmidt coefficients"
                    ))
                })?;
                let half = T::from_ratio(1, 2);
                components[0] = half.clone() * (T::one() + root.clone());
                components[1] = half * (T::one() - root);
                x0 = T::zero();
            } else if components[0] < components[1] {
                components.swap(0, 1);
            }
        }
        Ok(Self { components, x0 })
    }

    pub fn uniform(n_parties: usize) -> Result<Self> {
        let x = T::from_ratio(1, n_parties.max(1) as i64);
        Self::new(vec![x; n_parties])
    }

    /// `√(1/2)|10…0⟩ + √(1/(2(N−1)))(|01…0⟩ + … + |00…1⟩)`.
    pub fn psi_half(n_parties: usize) -> Result<Self> {
        if n_parties < 2 {
            return Err(Error::TooFewParties(n_parties));
        }
        let mut comps = vec![T::from_ratio(1, 2 * (n_parties as i64 - 1)); n_parties];
        comps[0] = T::from_ratio(1, 2);
        Self::new(comps)
    }

    /// Maximally entangled pair between parties `i` and `j` of an `n`-party system.
    pub fn epr(n_parties: usize, i: usize, j: usize) -> Result<Self> {
        check_party(i, n_parties)?;
        check_party(j, n_parties)?;
        if i == j {
            return Err(Error::InvalidGraph(format!("EPR pair needs two distinct parties, got ({i}, {i})")));
        }
        let mut comps = vec![T::zero(); n_parties];
        comps[i] = T::from_ratio(1, 2);
        comps[j] = T::from_ratio(1, 2);
        Self::new(comps)
    }

    pub fn n_parties(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn component(&self, party: usize) -> &T {
        &self.components[party]
    }

    pub fn x0(&self) -> &T {
        &self.x0
    }

    /// Parties with a nonzero component.
    pub fn support(&self) -> Vec<usize> {
        let zero = T::zero();
        (0..self.n_parties()).filter(|&i| self.components[i] > zero).collect()
    }

    /// At most one nonzero component: no entanglement left.
    pub fn is_product(&self) -> bool {
        self.support().len() <= 1
    }

    pub fn max_component(&self) -> T {
        self.components.iter().cloned().fold(T::zero(), Scalar::max_of)
    }

    pub fn sorted_indices(&self) -> SortedIndices {
        sorted_indices(self)
    }

    pub fn to_f64(&self) -> WClassState<f64> {
        WClassState {
            components: self.components.iter().map(Scalar::to_f64).collect(),
            x0: self.x0.to_f64(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.components.iter().map(Scalar::to_json).collect())
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse(format!("state must be a JSON array, got {value}")))?;
        let comps = items.iter().map(T::from_json).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }
}

impl<T: Scalar> Serialize for WClassState<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.components.len()))?;
        for x in &self.components {
            seq.serialize_element(&x.to_json())?;
        }
        seq.end()
    }
}

impl<T: Scalar> fmt::Display for WClassState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_party(party: usize, n_parties: usize) -> Result<()> {
    if party >= n_parties {
        Err(Error::PartyOutOfRange { party, n_parties })
    } else {
        Ok(())
    }
}

/// Parties ordered by descending component, ties broken by ascending index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedIndices {
    perm: Vec<usize>,
}

impl SortedIndices {
    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// The party holding the largest component.
    pub fn first(&self) -> usize {
        self.perm[0]
    }
}

pub fn sorted_indices<T: Scalar>(s: &WClassState<T>) -> SortedIndices {
    let mut perm: Vec<usize> = (0..s.n_parties()).collect();
    // stable: equal components keep ascending index order
    perm.sort_by(|&i, &j| {
        s.components[j]
            .partial_cmp(&s.components[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    SortedIndices { perm }
}

/// One upper-triangular Kraus operator `[[√a, b], [0, √c]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausOp {
    pub a: f64,
    pub b: Complex64,
    pub c: f64,
}

impl KrausOp {
    pub fn diagonal(a: f64, c: f64) -> Self {
        Self { a, b: Complex64::new(0.0, 0.0), c }
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.norm() == 0.0
    }

    pub fn matrix(&self) -> nalgebra::Matrix2<Complex64> {
        nalgebra::Matrix2::new(
            Complex64::new(self.a.sqrt(), 0.0),
            self.b,
            Complex64::new(0.0, 0.0),
            Complex64::new(self.c.sqrt(), 0.0),
        )
    }
}

/// A two-outcome measurement by a single party.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMeasurement {
    party: usize,
    ops: [KrausOp; 2],
}

const MEASUREMENT_TOL: f64 = 1e-12;

impl LocalMeasurement {
    pub fn new(party: usize, op1: KrausOp, op2: KrausOp) -> Result<Self> {
        let m = Self { party, ops: [op1, op2] };
        m.validate()?;
        Ok(m)
    }

    /// The complete diagonal pair `diag(√a, √c)`, `diag(√(1−a), √(1−c))`.
    pub fn diagonal(party: usize, a: f64, c: f64) -> Result<Self> {
        Self::new(party, KrausOp::diagonal(a, c), KrausOp::diagonal(1.0 - a, 1.0 - c))
    }

    pub fn identity(party: usize) -> Self {
        Self { party, ops: [KrausOp::diagonal(1.0, 1.0), KrausOp::diagonal(0.0, 0.0)] }
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn ops(&self) -> &[KrausOp; 2] {
        &self.ops
    }

    pub fn is_diagonal(&self) -> bool {
        self.ops.iter().all(KrausOp::is_diagonal)
    }

    /// `M1†M1 + M2†M2 = I` within tolerance.
    pub fn is_complete(&self) -> bool {
        let [m1, m2] = &self.ops;
        let lower = m1.b.norm_sqr() + m2.b.norm_sqr() + m1.c + m2.c;
        (1.0 - lower).abs() <= MEASUREMENT_TOL
    }

    fn validate(&self) -> Result<()> {
        let [m1, m2] = &self.ops;
        let bad = |msg: String| Err(Error::InvalidMeasurement(msg));
        for op in &self.ops {
            let ok = |v: f64| v.is_finite() && (-MEASUREMENT_TOL..=1.0 + MEASUREMENT_TOL).contains(&v);
            if !ok(op.a) || !ok(op.c) || !op.b.re.is_finite() || !op.b.im.is_finite() {
                return bad(format!("entries out of range: a = {}, c = {}, b = {}", op.a, op.c, op.b));
            }
        }
        if (m1.a + m2.a - 1.0).abs() > MEASUREMENT_TOL {
            return bad(format!("a1 + a2 = {} ≠ 1", m1.a + m2.a));
        }
        let c_sum = m1.c + m2.c;
        if self.is_diagonal() {
            if (c_sum - 1.0).abs() > MEASUREMENT_TOL {
                return bad(format!("diagonal pair needs c1 + c2 = 1, got {c_sum}"));
            }
        } else if c_sum >= 1.0 {
            return bad(format!("non-diagonal pair needs c1 + c2 < 1, got {c_sum}"));
        }
        // I − Σ M†M = [[1 − Σa, −s], [−s*, 1 − Σ(|b|² + c)]]
        let s = m1.b * m1.a.max(0.0).sqrt() + m2.b * m2.a.max(0.0).sqrt();
        let d1 = 1.0 - (m1.a + m2.a);
        let d2 = 1.0 - (m1.b.norm_sqr() + m2.b.norm_sqr() + c_sum);
        let min_eig = 0.5 * (d1 + d2) - (0.25 * (d1 - d2).powi(2) + s.norm_sqr()).sqrt();
        if min_eig < -1e-10 {
            return bad(format!("M1†M1 + M2†M2 exceeds identity (min eigenvalue of I − ΣM†M is {min_eig:e})"));
        }
        Ok(())
    }

    pub fn to_diagonal(&self) -> Option<DiagonalMeasurement<f64>> {
        if !self.is_diagonal() {
            return None;
        }
        Some(DiagonalMeasurement {
            party: self.party,
            a: [self.ops[0].a, self.ops[1].a],
            c: [self.ops[0].c, self.ops[1].c],
        })
    }
}

/// Amplitude-level update of a W-class state by a local measurement.
///
/// The measured party's qubit maps `|0⟩ → √a|0⟩`, `|1⟩ → b|0⟩ + √c|1⟩`; each
/// outcome is renormalized. Outcomes below [`MIN_OUTCOME_PROBABILITY`] are
/// dropped.
pub fn apply_measurement(s: &WClassState<f64>, m: &LocalMeasurement) -> Result<Vec<(f64, WClassState<f64>)>> {
    let n = s.n_parties();
    check_party(m.party, n)?;
    let k = m.party;
    let alpha0 = s.x0.max(0.0).sqrt();
    let alpha_k = s.components[k].sqrt();
    let mut out = Vec::with_capacity(2);
    for op in &m.ops {
        let sa = op.a.max(0.0).sqrt();
        let beta0 = Complex64::new(sa * alpha0, 0.0) + op.b * alpha_k;
        let mut weights: Vec<f64> = s.components.iter().map(|x| op.a * x).collect();
        weights[k] = op.c * s.components[k];
        let x0_weight = beta0.norm_sqr();
        let p = x0_weight + weights.iter().sum::<f64>();
        if p < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        let comps = weights.into_iter().map(|w| w / p).collect();
        out.push((p, WClassState::canonical(comps)?));
    }
    Ok(out)
}

/// A complete two-outcome diagonal measurement `diag(√a_λ, √c_λ)`, generic over
/// the number type so exact protocols stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMeasurement<T = f64> {
    pub party: usize,
    pub a: [T; 2],
    pub c: [T; 2],
}

impl<T: Scalar> DiagonalMeasurement<T> {
    pub fn new(party: usize, a1: T, c1: T) -> Result<Self> {
        let zero = T::zero();
        let one = T::one();
        if a1 < zero || a1 > one || c1 < zero || c1 > one {
            return Err(Error::InvalidMeasurement(format!("diagonal entries out of [0, 1]: a = {a1}, c = {c1}")));
        }
        let a2 = one.clone() - a1.clone();
        let c2 = one - c1.clone();
        Ok(Self { party, a: [a1, a2], c: [c1, c2] })
    }

    /// Computational-basis (Z) measurement: outcome 0 removes the party's
    /// component, outcome 1 collapses the state to the party's excitation.
    pub fn computational(party: usize) -> Self {
        Self { party, a: [T::one(), T::zero()], c: [T::zero(), T::one()] }
    }

    pub fn to_local(&self) -> Result<LocalMeasurement> {
        LocalMeasurement::new(
            self.party,
            KrausOp::diagonal(self.a[0].to_f64(), self.c[0].to_f64()),
            KrausOp::diagonal(self.a[1].to_f64(), self.c[1].to_f64()),
        )
    }
}

/// Exact component update `x_k → c_λ x_k / p_λ`, `x_j → a_λ x_j / p_λ`.
///
/// Outcomes with zero probability (exact types) or probability below
/// [`MIN_OUTCOME_PROBABILITY`] (floats) are dropped.
pub fn apply_diagonal<T: Scalar>(s: &WClassState<T>, m: &DiagonalMeasurement<T>) -> Result<Vec<(T, WClassState<T>)>> {
    let n = s.n_parties();
    check_party(m.party, n)?;
    let k = m.party;
    let rest = T::one() - s.components[k].clone();
    let threshold = if T::EXACT { T::zero() } else { T::from_ratio(1, 1_000_000_000_000_000) };
    let mut out = Vec::with_capacity(2);
    for (a, c) in m.a.iter().zip(&m.c) {
        let p = a.clone() * rest.clone() + c.clone() * s.components[k].clone();
        if p <= threshold {
            continue;
        }
        let comps = s
            .components
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let factor = if j == k { c.clone() } else { a.clone() };
                factor * x.clone() / p.clone()
            })
            .collect();
        out.push((p, WClassState::canonical(comps)?));
    }
    Ok(out)
}

/// Kintaş–Turgut bound `min_i x_i / y_i` (over `y_i > 0`) on the probability of
/// `x → y`, capped at 1; 1 when `y` is a product state.
pub fn kt_upper_bound<T: Scalar>(x: &WClassState<T>, y: &WClassState<T>) -> Result<T> {
    if x.n_parties() != y.n_parties() {
        return Err(Error::DimensionMismatch { expected: x.n_parties(), found: y.n_parties() });
    }
    if y.is_product() {
        return Ok(T::one());
    }
    let zero = T::zero();
    let bound = x
        .components
        .iter()
        .zip(&y.components)
        .filter(|(_, yi)| **yi > zero)
        .map(|(xi, yi)| xi.clone() / yi.clone())
        .fold(T::one(), Scalar::min_of);
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn w3_and_psi_half_construct() {
        let w3 = WClassState::new(vec![r(1, 3), r(1, 3), r(1, 3)]).unwrap();
        assert_eq!(*w3.x0(), r(0, 1));
        assert_eq!(w3, WClassState::<Rational>::uniform(3).unwrap());

        let product = WClassState::new(vec![r(1, 1), r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(*product.x0(), r(0, 1));
        assert!(product.is_product());

        let psi = WClassState::<Rational>::psi_half(3).unwrap();
        assert_eq!(psi.components(), &[r(1, 2), r(1, 4), r(1, 4)]);
        assert_eq!(*psi.x0(), r(0, 1));
    }

    #[test]
    fn rejects_unphysical_vectors() {
        assert!(matches!(WClassState::new(vec![-0.1, 0.5]), Err(Error::NegativeComponent { index: 0, .. })));
        assert!(matches!(WClassState::new(vec![0.6, 0.6]), Err(Error::NormExceeded { .. })));
        assert!(matches!(WClassState::new(vec![1.0]), Err(Error::TooFewParties(1))));
        // within tolerance: clamped
        let s = WClassState::new(vec![-1e-13, 0.5, 0.5]).unwrap();
        assert_eq!(s.components()[0], 0.0);
    }

    #[test]
    fn two_party_convention() {
        let s = WClassState::new(vec![r(1, 4), r(3, 4)]).unwrap();
        assert_eq!(s.components(), &[r(3, 4), r(1, 4)]);
        // x0 > 0: Schmidt form, λ1 λ2 = x1 x2 = 0.09, λ1 + λ2 = 1
        let s = WClassState::new(vec![0.1, 0.9 * 0.999]).unwrap();
        let [l1, l2] = [s.components()[0], s.components()[1]];
        assert!(l1 >= l2);
        assert!((l1 + l2 - 1.0).abs() < 1e-14);
        assert!((l1 * l2 - 0.1 * 0.8991).abs() < 1e-14);
        assert_eq!(*s.x0(), 0.0);
        assert!(WClassState::new(vec![r(1, 3), r(1, 3)]).is_err());
    }

    #[test]
    fn sorted_indices_examples() {
        let s = WClassState::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(sorted_indices(&s).as_slice(), &[1, 0, 2]);
        let s = WClassState::<f64>::uniform(3).unwrap();
        assert_eq!(sorted_indices(&s).as_slice(), &[0, 1, 2]);
        let s = WClassState::new(vec![0.1, 0.7, 0.2]).unwrap();
        assert_eq!(sorted_indices(&s).as_slice(), &[1, 2, 0]);
    }

    #[test]
    fn identity_measurement_is_trivial() {
        let s = WClassState::new(vec![0.2, 0.3, 0.1]).unwrap();
        for k in 0..3 {
            let out = apply_measurement(&s, &LocalMeasurement::identity(k)).unwrap();
            assert_eq!(out.len(), 1);
            assert!((out[0].0 - 1.0).abs() < 1e-15);
            for (a, b) in out[0].1.components().iter().zip(s.components()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn equal_or_vanish_pair() {
        // party 2 (index 1) of (1/2, 1/4, 1/4)
        let s = WClassState::new(vec![r(1, 2), r(1, 4), r(1, 4)]).unwrap();
        let ratio = r(1, 4) / r(1, 2);
        let m = DiagonalMeasurement::new(1, ratio, r(1, 1)).unwrap();
        let out = apply_diagonal(&s, &m).unwrap();
        assert_eq!(out.len(), 2);
        let (p1, equal) = &out[0];
        let (p2, vanish) = &out[1];
        assert_eq!(equal.component(1), equal.component(0));
        assert_eq!(*vanish.component(1), r(0, 1));
        assert_eq!(p1.clone() + p2.clone(), r(1, 1));
        assert_eq!(*p1, r(5, 8));
    }

    #[test]
    fn diagonal_amplitude_update_matches_component_law() {
        let s = WClassState::new(vec![0.15, 0.25, 0.35]).unwrap();
        let m = LocalMeasurement::diagonal(2, 0.3, 0.8).unwrap();
        let amp = apply_measurement(&s, &m).unwrap();
        let exact = apply_diagonal(&s, &m.to_diagonal().unwrap()).unwrap();
        assert_eq!(amp.len(), exact.len());
        for ((pa, sa), (pe, se)) in amp.iter().zip(&exact) {
            assert!((pa - pe).abs() < 1e-12);
            for (x, y) in sa.components().iter().zip(se.components()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!((sa.x0() - se.x0()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_diagonal_operator_populates_x0() {
        let s = WClassState::new(vec![0.5, 0.3, 0.2]).unwrap();
        let b = Complex64::new(0.3, 0.1);
        let a1: f64 = 0.6;
        let b2 = -b * (a1 / (1.0 - a1)).sqrt();
        let spare = 1.0 - b.norm_sqr() - b2.norm_sqr();
        let m = LocalMeasurement::new(
            0,
            KrausOp { a: a1, b, c: 0.5 * spare },
            KrausOp { a: 1.0 - a1, b: b2, c: 0.5 * spare },
        )
        .unwrap();
        assert!(m.is_complete());
        let out = apply_measurement(&s, &m).unwrap();
        let total: f64 = out.iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(out.iter().any(|(_, t)| *t.x0() > 1e-3));
    }

    #[test]
    fn measurement_validation() {
        assert!(LocalMeasurement::diagonal(0, 0.3, 0.4).is_ok());
        // a1 + a2 ≠ 1
        assert!(LocalMeasurement::new(0, KrausOp::diagonal(0.5, 0.5), KrausOp::diagonal(0.6, 0.5)).is_err());
        // diagonal with c1 + c2 < 1
        assert!(LocalMeasurement::new(0, KrausOp::diagonal(0.5, 0.2), KrausOp::diagonal(0.5, 0.5)).is_err());
        // off-diagonal entries that do not cancel
        let b = Complex64::new(0.2, 0.0);
        assert!(LocalMeasurement::new(0, KrausOp { a: 0.5, b, c: 0.4 }, KrausOp { a: 0.5, b, c: 0.4 }).is_err());
        let s = WClassState::new(vec![0.5, 0.5]).unwrap();
        assert!(apply_measurement(&s, &LocalMeasurement::identity(2)).is_err());
    }

    #[test]
    fn kt_bound_examples() {
        let w3 = WClassState::<Rational>::uniform(3).unwrap();
        assert_eq!(kt_upper_bound(&w3, &w3).unwrap(), r(1, 1));
        let epr = WClassState::<Rational>::epr(3, 0, 1).unwrap();
        assert_eq!(kt_upper_bound(&w3, &epr).unwrap(), r(2, 3));
        let psi = WClassState::<Rational>::psi_half(3).unwrap();
        assert_eq!(kt_upper_bound(&psi, &epr).unwrap(), r(1, 2));
        let product = WClassState::new(vec![r(0, 1), r(0, 1), r(1, 1)]).unwrap();
        assert_eq!(kt_upper_bound(&psi, &product).unwrap(), r(1, 1));
        let two = WClassState::<Rational>::uniform(2).unwrap();
        assert!(matches!(kt_upper_bound(&w3, &two), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn json_round_trip() {
        let s = WClassState::new(vec![r(1, 2), r(1, 4), r(1, 4)]).unwrap();
        let v = s.to_json();
        assert_eq!(v.to_string(), r#"["1/2","1/4","1/4"]"#);
        assert_eq!(WClassState::<Rational>::from_json(&v).unwrap(), s);
        let f = WClassState::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), "[0.5,0.25,0.25]");
    }
}
