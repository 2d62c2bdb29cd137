use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::wstate::check_party;

/// Target configuration of a random distillation: vertices are parties, an
/// edge `(i, j)` carries the requested probability `p_ij` of ending with an
/// EPR pair between `i` and `j`.
///
/// Edges are stored as `(min, max)` and iterate in lexicographic order; that
/// order is the edge encoding used by the SDP layout and the SDPA export.
#[derive(Clone, Debug, PartialEq)]
pub struct DistillationGraph<T = f64> {
    n_parties: usize,
    edges: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> DistillationGraph<T> {
    pub fn new(n_parties: usize) -> Self {
        Self { n_parties, edges: BTreeMap::new() }
    }

    /// Builds a graph from `(i, j, p_ij)` triples. Zero-probability entries are
    /// not edges and are skipped.
    pub fn from_edges(n_parties: usize, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut g = Self::new(n_parties);
        for (i, j, p) in edges {
            g.add_edge(i, j, p)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, p: T) -> Result<()> {
        check_party(i, self.n_parties)?;
        check_party(j, self.n_parties)?;
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at party {i}")));
        }
        if p < T::zero() {
            return Err(Error::InvalidGraph(format!("negative probability {p} on edge ({i}, {j})")));
        }
        let key = (i.min(j), i.max(j));
        if self.edges.contains_key(&key) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", key.0, key.1)));
        }
        if p > T::zero() {
            self.edges.insert(key, p);
        }
        Ok(())
    }

    /// Every pair of parties with the same probability.
    pub fn complete(n_parties: usize, p: T) -> Self {
        let mut g = Self::new(n_parties);
        for i in 0..n_parties {
            for j in i + 1..n_parties {
                g.add_edge(i, j, p.clone()).expect("valid complete graph");
            }
        }
        g
    }

    /// Every edge touches `center`.
    pub fn star(n_parties: usize, center: usize, p: T) -> Result<Self> {
        check_party(center, n_parties)?;
        let mut g = Self::new(n_parties);
        for j in (0..n_parties).filter(|&j| j != center) {
            g.add_edge(center, j, p.clone())?;
        }
        Ok(g)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges in encoding order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &T)> + '_ {
        self.edges.iter().map(|(k, v)| (*k, v))
    }

    pub fn probability(&self, i: usize, j: usize) -> Option<&T> {
        self.edges.get(&(i.min(j), i.max(j)))
    }

    /// Position of `(i, j)` in the encoding order.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.edges.keys().position(|k| *k == key)
    }

    /// The edges incident to vertex `k`.
    pub fn edges_at(&self, k: usize) -> impl Iterator<Item = ((usize, usize), &T)> + '_ {
        self.edges().filter(move |((i, j), _)| *i == k || *j == k)
    }

    pub fn total_probability(&self) -> T {
        self.edges.values().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn scaled(&self, factor: &T) -> Self {
        Self {
            n_parties: self.n_parties,
            edges: self.edges.iter().map(|(k, v)| (*k, v.clone() * factor.clone())).collect(),
        }
    }

    pub fn to_f64(&self) -> DistillationGraph<f64> {
        DistillationGraph {
            n_parties: self.n_parties,
            edges: self.edges.iter().map(|(k, v)| (*k, v.to_f64())).collect(),
        }
    }

    /// JSON form: array of `[i, j, p]` with 1-based party labels.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.edges()
                .map(|((i, j), p)| serde_json::json!([i + 1, j + 1, p.to_json()]))
                .collect(),
        )
    }

    pub fn from_json(n_parties: usize, value: &serde_json::Value) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse(format!("graph must be a JSON array of [i, j, p], got {value}")))?;
        let mut g = Self::new(n_parties);
        for item in items {
            let triple = item
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse(format!("edge must be [i, j, p], got {item}")))?;
            let label = |v: &serde_json::Value| -> Result<usize> {
                v.as_u64()
                    .filter(|&x| x >= 1)
                    .map(|x| x as usize - 1)
                    .ok_or_else(|| Error::Parse(format!("party labels are 1-based integers, got {v}")))
            };
            g.add_edge(label(&triple[0])?, label(&triple[1])?, T::from_json(&triple[2])?)?;
        }
        Ok(g)
    }
}
