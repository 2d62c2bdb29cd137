use std::fmt;

use crate::scalar::Scalar;
use crate::wstate::WClassState;

/// Terminal state of a distillation branch.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<T = f64> {
    /// EPR pair shared by parties `i < j`; all others disentangled.
    Epr { i: usize, j: usize },
    /// A W-class state with at least three parties still entangled.
    ResidualW(WClassState<T>),
    /// Fully product (at most one excited party).
    Product,
}

impl<T: Scalar> Outcome<T> {
    pub fn epr(i: usize, j: usize) -> Self {
        Self::Epr { i: i.min(j), j: i.max(j) }
    }

    /// Reads off the outcome type of a state with `x0 = 0`. Supports of size two
    /// are EPR pairs only when balanced; unbalanced pairs are kept as residual
    /// states. A residual state that is uniform on its support is rebuilt as the
    /// exact uniform state so equal outcomes from different branches compare equal.
    pub fn classify(state: WClassState<T>) -> Self {
        let support = state.support();
        let tol = T::tolerance();
        let top = state.max_component();
        let balanced = support
            .iter()
            .all(|&p| (top.clone() - state.component(p).clone()).abs() <= tol.clone());
        let x0_zero = state.x0().abs() <= tol;
        match support.len() {
            0 | 1 => Self::Product,
            2 if balanced && x0_zero => Self::epr(support[0], support[1]),
            m if balanced && x0_zero => {
                let n = state.n_parties();
                let share = T::one() / T::from_usize(m);
                let comps = (0..n).map(|p| if support.contains(&p) { share.clone() } else { T::zero() }).collect();
                match WClassState::new(comps) {
                    Ok(uniform) => Self::ResidualW(uniform),
                    Err(_) => Self::ResidualW(state),
                }
            }
            _ => Self::ResidualW(state),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Self::Epr { .. } => 0,
            Self::ResidualW(_) => 1,
            Self::Product => 2,
        }
    }

    /// Text label; parties are printed 1-based.
    pub fn label(&self) -> String {
        match self {
            Self::Epr { i, j } => format!("EPR({},{})", i + 1, j + 1),
            Self::ResidualW(s) => {
                let support: Vec<String> = s.support().iter().map(|p| (p + 1).to_string()).collect();
                format!("W[{}]", support.join(","))
            }
            Self::Product => "product".to_string(),
        }
    }

    pub fn to_f64(&self) -> Outcome<f64> {
        match self {
            Self::Epr { i, j } => Outcome::Epr { i: *i, j: *j },
            Self::ResidualW(s) => Outcome::ResidualW(s.to_f64()),
            Self::Product => Outcome::Product,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Epr { i, j } => serde_json::json!({ "type": "epr", "parties": [i + 1, j + 1] }),
            Self::ResidualW(s) => serde_json::json!({ "type": "residual_w", "state": s.to_json() }),
            Self::Product => serde_json::json!({ "type": "product" }),
        }
    }
}

impl<T: Scalar> fmt::Display for Outcome<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn cmp_outcomes<T: Scalar>(a: &Outcome<T>, b: &Outcome<T>) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a, b) {
        (Outcome::Epr { i, j }, Outcome::Epr { i: k, j: l }) => (i, j).cmp(&(k, l)),
        (Outcome::ResidualW(s), Outcome::ResidualW(t)) => {
            s.support().cmp(&t.support()).then_with(|| {
                for (x, y) in s.components().iter().zip(t.components()) {
                    match x.partial_cmp(y) {
                        Some(Ordering::Equal) | None => continue,
                        Some(o) => return o,
                    }
                }
                Ordering::Equal
            })
        }
        _ => a.rank().cmp(&b.rank()),
    }
}

/// Probability distribution over outcomes. Equal outcomes are merged; entries
/// are kept sorted (EPR pairs lexicographically, then residual states by
/// support, then the product outcome).
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T = f64> {
    entries: Vec<(Outcome<T>, T)>,
}

impl<T: Scalar> Default for OutcomeDistribution<T> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<T: Scalar> OutcomeDistribution<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, outcome: Outcome<T>, p: T) {
        match self.entries.binary_search_by(|(o, _)| cmp_outcomes(o, &outcome)) {
            Ok(pos) => {
                let entry = &mut self.entries[pos].1;
                *entry = entry.clone() + p;
            }
            Err(pos) => self.entries.insert(pos, (outcome, p)),
        }
    }

    pub fn merge(&mut self, other: &Self, weight: &T) {
        for (o, p) in &other.entries {
            self.add(o.clone(), weight.clone() * p.clone());
        }
    }

    pub fn entries(&self) -> &[(Outcome<T>, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Probability of the EPR pair `{i, j}`.
    pub fn epr(&self, i: usize, j: usize) -> T {
        let target = Outcome::<T>::epr(i, j);
        self.entries
            .iter()
            .find(|(o, _)| *o == target)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(T::zero)
    }

    /// Total EPR probability over all pairs.
    pub fn epr_total(&self) -> T {
        self.sum_where(|o| matches!(o, Outcome::Epr { .. }))
    }

    /// Total probability of an EPR pair involving party `k`.
    pub fn epr_with(&self, k: usize) -> T {
        self.sum_where(|o| matches!(o, Outcome::Epr { i, j } if *i == k || *j == k))
    }

    pub fn residual_total(&self) -> T {
        self.sum_where(|o| matches!(o, Outcome::ResidualW(_)))
    }

    pub fn product(&self) -> T {
        self.sum_where(|o| matches!(o, Outcome::Product))
    }

    fn sum_where(&self, pred: impl Fn(&Outcome<T>) -> bool) -> T {
        self.entries
            .iter()
            .filter(|(o, _)| pred(o))
            .fold(T::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn to_f64(&self) -> OutcomeDistribution<f64> {
        let mut out = OutcomeDistribution::new();
        for (o, p) in &self.entries {
            out.add(o.to_f64(), p.to_f64());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|(o, p)| {
                    let mut v = o.to_json();
                    v["probability"] = p.to_json();
                    v
                })
                .collect(),
        )
    }

    /// Two-column text table.
    pub fn table(&self) -> String {
        let mut out = format!("{:<24}{:>20}\n", "outcome", "probability");
        for (o, p) in &self.entries {
            out.push_str(&format!("{:<24}{:>20.12}\n", o.label(), p.to_f64()));
        }
        out.push_str(&format!("{:<24}{:>20.12}\n", "total", self.total().to_f64()));
        out
    }
}
