//! A separable (non-LOCC) measurement that combs `ψ½` with probability one.
//!
//! For `k = 2, …, N` the outcome operator is
//! `M_k = I ⊗ (|1⟩⟨1| + (N−1)^(−1/2)|0⟩⟨0|)_k ⊗ |0⟩⟨0|` on every other party,
//! and `M_0 = √(I − Σ M_k†M_k)` completes the measurement. Operators act on the
//! `2^N`-dimensional space with party 1 as the most significant bit.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::protocols::outcome::Outcome;
use crate::wstate::WClassState;

/// Tensor product of single-qubit factors, one per party.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperator {
    pub factors: Vec<Matrix2<f64>>,
}

impl ProductOperator {
    pub fn dense(&self) -> DMatrix<f64> {
        self.factors.iter().fold(DMatrix::from_element(1, 1, 1.0), |acc, f| {
            let f = DMatrix::from_column_slice(2, 2, f.as_slice());
            acc.kronecker(&f)
        })
    }
}

#[derive(Clone, Debug)]
pub struct SeparableMeasurement {
    n_parties: usize,
    /// `(k, M_k)` for `k = 1..N` (0-based party index of the partner).
    operators: Vec<(usize, ProductOperator)>,
    completion: DMatrix<f64>,
    /// Smallest eigenvalue of `I − Σ M_k†M_k`.
    completion_min_eigenvalue: f64,
}

/// Builds the measurement and its completion, checking `I − Σ M_k†M_k ⪰ 0`.
pub fn sep_combing_measurement(n: usize) -> Result<SeparableMeasurement> {
    if n < 3 {
        return Err(Error::TooFewParties(n));
    }
    let dim = 1usize << n;
    let scale = 1.0 / ((n - 1) as f64).sqrt();
    let identity = Matrix2::identity();
    let ground = Matrix2::new(1.0, 0.0, 0.0, 0.0);
    let partner = Matrix2::new(scale, 0.0, 0.0, 1.0);
    let mut operators = Vec::with_capacity(n - 1);
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for k in 1..n {
        let factors = (0..n)
            .map(|q| match q {
                0 => identity,
                q if q == k => partner,
                _ => ground,
            })
            .collect();
        let op = ProductOperator { factors };
        let m = op.dense();
        gram += m.transpose() * &m;
        operators.push((k, op));
    }
    let rest = DMatrix::<f64>::identity(dim, dim) - gram;
    let eig = rest.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-12 {
        return Err(Error::CompletionNotPsd(min_eig));
    }
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    let completion = &eig.eigenvectors * roots * eig.eigenvectors.transpose();
    Ok(SeparableMeasurement { n_parties: n, operators, completion, completion_min_eigenvalue: min_eig })
}

/// Amplitude vector of a W-class state on `2^N` entries.
pub fn w_state_vector(s: &WClassState<f64>) -> DVector<f64> {
    let n = s.n_parties();
    let mut v = DVector::zeros(1 << n);
    v[0] = s.x0().max(0.0).sqrt();
    for (j, x) in s.components().iter().enumerate() {
        v[1 << (n - 1 - j)] = x.max(0.0).sqrt();
    }
    v
}

/// Reads a (normalized) vector back as a W-class outcome, if it lies in the
/// span of `|0…0⟩` and the single-excitation vectors.
fn classify_vector(v: &DVector<f64>, n: usize) -> Option<Outcome<f64>> {
    let mut comps = vec![0.0; n];
    let mut weight_one = 0.0;
    for (idx, a) in v.iter().enumerate() {
        let w = a * a;
        if idx == 0 {
            weight_one += w;
        } else if idx.is_power_of_two() {
            let party = n - 1 - idx.trailing_zeros() as usize;
            comps[party] = w;
            weight_one += w;
        } else if w > 1e-12 {
            return None;
        }
    }
    let norm: f64 = weight_one;
    let comps = comps.into_iter().map(|x| x / norm).collect();
    WClassState::new(comps).ok().map(Outcome::classify)
}

/// One measurement outcome: `label` is `Some(k)` for `M_k` and `None` for `M_0`.
#[derive(Clone, Debug)]
pub struct SeparableOutcome {
    pub label: Option<usize>,
    pub probability: f64,
    pub post_state: DVector<f64>,
    /// `None` when the post-measurement state leaves the W class.
    pub outcome: Option<Outcome<f64>>,
}

impl SeparableMeasurement {
    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn operators(&self) -> &[(usize, ProductOperator)] {
        &self.operators
    }

    pub fn completion(&self) -> &DMatrix<f64> {
        &self.completion
    }

    pub fn completion_min_eigenvalue(&self) -> f64 {
        self.completion_min_eigenvalue
    }

    /// `‖Σ M_k†M_k + M_0†M_0 − I‖_max`.
    pub fn completeness_error(&self) -> f64 {
        let dim = 1 << self.n_parties;
        let mut total = self.completion.transpose() * &self.completion;
        for (_, op) in &self.operators {
            let m = op.dense();
            total += m.transpose() * &m;
        }
        (total - DMatrix::<f64>::identity(dim, dim)).amax()
    }

    pub fn apply(&self, psi: &DVector<f64>) -> Result<Vec<SeparableOutcome>> {
        let dim = 1 << self.n_parties;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: psi.len() });
        }
        let labelled = self
            .operators
            .iter()
            .map(|(k, op)| (Some(*k), op.dense()))
            .chain(std::iter::once((None, self.completion.clone())));
        let mut out = Vec::new();
        for (label, m) in labelled {
            let image = m * psi;
            let probability = image.norm_squared();
            let (post_state, outcome) = if probability > 1e-15 {
                let post = image / probability.sqrt();
                let outcome = classify_vector(&post, self.n_parties);
                (post, outcome)
            } else {
                (image, None)
            };
            out.push(SeparableOutcome { label, probability, post_state, outcome });
        }
        Ok(out)
    }

    pub fn apply_to_state(&self, s: &WClassState<f64>) -> Result<Vec<SeparableOutcome>> {
        self.apply(&w_state_vector(s))
    }
}
