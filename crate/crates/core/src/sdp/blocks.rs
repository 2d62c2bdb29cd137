use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::scalar::Scalar;

/// Sparse symmetric block-diagonal matrix. Entries are keyed by
/// `(block, i, j)` with `i ≤ j`; zero entries are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseBlockMatrix<T> {
    block_sizes: Vec<usize>,
    entries: BTreeMap<(usize, usize, usize), T>,
}

impl<T: Scalar> SparseBlockMatrix<T> {
    pub fn zeros(block_sizes: Vec<usize>) -> Self {
        Self { block_sizes, entries: BTreeMap::new() }
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Sets entries `(i, j)` and `(j, i)` of `block`.
    pub fn set(&mut self, block: usize, i: usize, j: usize, value: T) {
        assert!(block < self.block_sizes.len() && i.max(j) < self.block_sizes[block], "entry out of range");
        let key = (block, i.min(j), i.max(j));
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn add(&mut self, block: usize, i: usize, j: usize, value: T) {
        let current = self.get(block, i, j);
        self.set(block, i, j, current + value);
    }

    pub fn get(&self, block: usize, i: usize, j: usize) -> T {
        self.entries.get(&(block, i.min(j), i.max(j))).cloned().unwrap_or_else(T::zero)
    }

    /// Stored upper-triangle entries `((block, i, j), value)`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &T)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `tr(self · other)`.
    pub fn trace_product(&self, other: &Self) -> T {
        let (small, large) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        let two = T::from_usize(2);
        let mut total = T::zero();
        for (key, v) in &small.entries {
            if let Some(w) = large.entries.get(key) {
                let term = v.clone() * w.clone();
                total = total + if key.1 == key.2 { term } else { two.clone() * term };
            }
        }
        total
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &T) {
        for ((b, i, j), v) in &other.entries {
            self.add(*b, *i, *j, factor.clone() * v.clone());
        }
    }

    pub fn to_f64(&self) -> SparseBlockMatrix<f64> {
        SparseBlockMatrix {
            block_sizes: self.block_sizes.clone(),
            entries: self.entries.iter().map(|(k, v)| (*k, v.to_f64())).collect(),
        }
    }

    pub fn dense_blocks(&self) -> Vec<DMatrix<f64>> {
        let mut blocks: Vec<DMatrix<f64>> = self.block_sizes.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for ((b, i, j), v) in &self.entries {
            let v = v.to_f64();
            blocks[*b][(*i, *j)] = v;
            blocks[*b][(*j, *i)] = v;
        }
        blocks
    }

    /// Smallest eigenvalue over all blocks (`+∞` with no blocks).
    pub fn min_eigenvalue(&self) -> f64 {
        self.dense_blocks().into_iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)];
    }
    m.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn trace_product_doubles_off_diagonal_entries() {
        let mut a = SparseBlockMatrix::<Rational>::zeros(vec![1, 2]);
        a.set(0, 0, 0, Rational::from_ratio(3, 1));
        a.set(1, 0, 1, Rational::from_ratio(1, 2));
        a.set(1, 1, 1, Rational::from_ratio(1, 1));
        let mut b = SparseBlockMatrix::<Rational>::zeros(vec![1, 2]);
        b.set(0, 0, 0, Rational::from_ratio(2, 1));
        b.set(1, 1, 0, Rational::from_ratio(5, 1));
        assert_eq!(a.trace_product(&b), Rational::from_ratio(6 + 5, 1));
        assert_eq!(b.get(1, 0, 1), Rational::from_ratio(5, 1));
        b.set(1, 0, 1, Rational::from_ratio(0, 1));
        assert_eq!(b.nnz(), 1);
    }

    #[test]
    fn eigenvalues_by_block() {
        let mut a = SparseBlockMatrix::<f64>::zeros(vec![1, 2]);
        a.set(0, 0, 0, 0.5);
        a.set(1, 0, 0, 1.0);
        a.set(1, 1, 1, 1.0);
        a.set(1, 0, 1, 2.0);
        assert!((a.min_eigenvalue() + 1.0).abs() < 1e-12);
    }
}
