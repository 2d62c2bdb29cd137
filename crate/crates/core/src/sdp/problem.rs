//! Constraint data of the separable-operation feasibility problem.
//!
//! For each edge `(i, j)` the unknown part of the (diagonal-reduced) Choi
//! matrix is a real symmetric 4×4 matrix in the basis `|m n⟩`, `m` the bit of
//! party `i` and `n` the bit of party `j`:
//!
//! ```text
//!       ⎡ x1  x2  x3  x4 ⎤          ⎡ x1  x2  x3  C  ⎤
//!   χ = ⎢ x2  A   C   x5 ⎥    χ^Γ = ⎢ x2  A   x4  x5 ⎥
//!       ⎢ x3  C   B   x6 ⎥          ⎢ x3  x4  B   x6 ⎥
//!       ⎣ x4  x5  x6  x7 ⎦          ⎣ C   x5  x6  x7 ⎦
//! ```
//!
//! with `A = p/(2x_j)`, `B = p/(2x_i)`, `C = p/(2√(x_i x_j))` fixed by the
//! outcome condition (`Np/2` each for `W_N`). The cone constraint is
//!
//! ```text
//! G0 + Σ_e Σ_m x_m^e G_m^e  =  [1 − Σ_e x1^e] ⊕ ⨁_e [1 − x7^e] ⊕ ⨁_e (χ^e ⊕ χ^eΓ)  ⪰ 0.
//! ```
//!
//! The per-party bounds `Σ_{e∋k} (A or B) ≤ 1` involve data only and are
//! reported as vertex loads.

use crate::error::{Error, Result};
use crate::protocols::DistillationGraph;
use crate::scalar::Scalar;
use crate::sdp::blocks::SparseBlockMatrix;
use crate::wstate::WClassState;

pub const VARS_PER_EDGE: usize = 7;

/// Positions of `x_m` (1-based `m`) inside the 8×8 block `χ ⊕ χ^Γ`.
pub fn f_positions(m: usize) -> [(usize, usize); 2] {
    match m {
        1 => [(0, 0), (4, 4)],
        2 => [(0, 1), (4, 5)],
        3 => [(0, 2), (4, 6)],
        4 => [(0, 3), (5, 6)],
        5 => [(1, 3), (5, 7)],
        6 => [(2, 3), (6, 7)],
        7 => [(3, 3), (7, 7)],
        _ => panic!("variable index {m} out of range 1..=7"),
    }
}

/// `F_m` as a dense 0/1 symmetric matrix.
pub fn f_matrix(m: usize) -> [[u8; 8]; 8] {
    let mut f = [[0u8; 8]; 8];
    for (i, j) in f_positions(m) {
        f[i][j] = 1;
        f[j][i] = 1;
    }
    f
}

/// Fixed Choi entries of one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeData<T> {
    pub edge: (usize, usize),
    pub p: T,
    /// `χ(01,01) = p/(2x_j)`.
    pub a: T,
    /// `χ(10,10) = p/(2x_i)`.
    pub b: T,
    /// `χ(01,10) = p/(2√(x_i x_j))`.
    pub c: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GMatrixSet<T> {
    n_parties: usize,
    edges: Vec<EdgeData<T>>,
    g0: SparseBlockMatrix<T>,
    /// `g[e][m − 1]` is `G_m` of edge `e`.
    g: Vec<Vec<SparseBlockMatrix<T>>>,
}

impl<T: Scalar> GMatrixSet<T> {
    fn from_edges(n_parties: usize, edges: Vec<EdgeData<T>>) -> Self {
        let ne = edges.len();
        let sizes: Vec<usize> = std::iter::once(1)
            .chain(std::iter::repeat_n(1, ne))
            .chain(std::iter::repeat_n(8, ne))
            .collect();
        let mut g0 = SparseBlockMatrix::zeros(sizes.clone());
        g0.set(0, 0, 0, T::one());
        let mut g = Vec::with_capacity(ne);
        for (e, d) in edges.iter().enumerate() {
            let (scalar, block) = (1 + e, 1 + ne + e);
            g0.set(scalar, 0, 0, T::one());
            for off in [0, 4] {
                g0.set(block, off + 1, off + 1, d.a.clone());
                g0.set(block, off + 2, off + 2, d.b.clone());
            }
            g0.set(block, 1, 2, d.c.clone());
            g0.set(block, 4, 7, d.c.clone());
            let mut per_edge = Vec::with_capacity(VARS_PER_EDGE);
            for m in 1..=VARS_PER_EDGE {
                let mut gm = SparseBlockMatrix::zeros(sizes.clone());
                match m {
                    1 => gm.set(0, 0, 0, -T::one()),
                    7 => gm.set(scalar, 0, 0, -T::one()),
                    _ => {}
                }
                for (i, j) in f_positions(m) {
                    gm.set(block, i, j, T::one());
                }
                per_edge.push(gm);
            }
            g.push(per_edge);
        }
        Self { n_parties, edges, g0, g }
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn edges(&self) -> &[EdgeData<T>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn n_variables(&self) -> usize {
        VARS_PER_EDGE * self.edges.len()
    }

    /// `1` followed by `|E|` ones and `|E|` eights.
    pub fn block_sizes(&self) -> &[usize] {
        self.g0.block_sizes()
    }

    pub fn g0(&self) -> &SparseBlockMatrix<T> {
        &self.g0
    }

    /// `G_m` (1-based `m`) of edge `e` (encoding order).
    pub fn g(&self, e: usize, m: usize) -> &SparseBlockMatrix<T> {
        &self.g[e][m - 1]
    }

    /// All `G_m^e` in variable order `7e + (m − 1)`.
    pub fn constraint_matrices(&self) -> impl Iterator<Item = &SparseBlockMatrix<T>> {
        self.g.iter().flatten()
    }

    /// `G0 + Σ x_v G_v`.
    pub fn evaluate(&self, x: &[T]) -> Result<SparseBlockMatrix<T>> {
        if x.len() != self.n_variables() {
            return Err(Error::DimensionMismatch { expected: self.n_variables(), found: x.len() });
        }
        let mut out = self.g0.clone();
        for (gm, v) in self.constraint_matrices().zip(x) {
            out.add_scaled(gm, v);
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> GMatrixSet<f64> {
        GMatrixSet {
            n_parties: self.n_parties,
            edges: self
                .edges
                .iter()
                .map(|d| EdgeData { edge: d.edge, p: d.p.to_f64(), a: d.a.to_f64(), b: d.b.to_f64(), c: d.c.to_f64() })
                .collect(),
            g0: self.g0.to_f64(),
            g: self.g.iter().map(|v| v.iter().map(|m| m.to_f64()).collect()).collect(),
        }
    }

    /// Reassembles a set from its raw matrices, reading the edge data back off
    /// `G0`. Used by the SDPA reader.
    pub(crate) fn from_raw(n_parties: usize, edges: Vec<(usize, usize)>, g0: SparseBlockMatrix<T>, g: Vec<Vec<SparseBlockMatrix<T>>>) -> Self {
        let ne = edges.len();
        let data = edges
            .into_iter()
            .enumerate()
            .map(|(e, edge)| {
                let block = 1 + ne + e;
                EdgeData {
                    edge,
                    p: T::zero(),
                    a: g0.get(block, 1, 1),
                    b: g0.get(block, 2, 2),
                    c: g0.get(block, 1, 2),
                }
            })
            .collect();
        Self { n_parties, edges: data, g0, g }
    }
}

/// Constraint data for the uniform state `W_N`: every fixed entry is `Np/2`.
pub fn build_g_matrices<T: Scalar>(n_parties: usize, graph: &DistillationGraph<T>) -> Result<GMatrixSet<T>> {
    if graph.n_parties() != n_parties {
        return Err(Error::DimensionMismatch { expected: n_parties, found: graph.n_parties() });
    }
    let half_n = T::from_ratio(n_parties as i64, 2);
    let edges = graph
        .edges()
        .map(|(edge, p)| {
            let v = half_n.clone() * p.clone();
            EdgeData { edge, p: p.clone(), a: v.clone(), b: v.clone(), c: v }
        })
        .collect();
    Ok(GMatrixSet::from_edges(n_parties, edges))
}

/// Feasibility problem for `state → {p_ij, EPR(i,j)}` by separable operations.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem<T = f64> {
    pub state: WClassState<T>,
    pub graph: DistillationGraph<T>,
    pub gset: GMatrixSet<T>,
}

/// Builds the problem for a state with `x0 = 0`. Every edge needs both parties
/// in the support of `state`, and `√(x_i x_j)` must be representable in `T`.
pub fn build_problem<T: Scalar>(graph: &DistillationGraph<T>, state: &WClassState<T>) -> Result<SdpProblem<T>> {
    let n = state.n_parties();
    if graph.n_parties() != n {
        return Err(Error::DimensionMismatch { expected: n, found: graph.n_parties() });
    }
    if state.x0().abs() > T::tolerance() {
        return Err(Error::NonzeroX0(state.x0().to_f64()));
    }
    let two = T::from_usize(2);
    let mut edges = Vec::with_capacity(graph.edge_count());
    for ((i, j), p) in graph.edges() {
        let (xi, xj) = (state.component(i).clone(), state.component(j).clone());
        if xi.is_zero() || xj.is_zero() {
            return Err(Error::InvalidGraph(format!(
                "edge ({}, {}) touches a party outside the support",
                i + 1,
                j + 1
            )));
        }
        let root = (xi.clone() * xj.clone())
            .sqrt()
            .ok_or_else(|| Error::NotRepresentable(format!("sqrt({xi} * {xj})")))?;
        edges.push(EdgeData {
            edge: (i, j),
            p: p.clone(),
            a: p.clone() / (two.clone() * xj),
            b: p.clone() / (two.clone() * xi),
            c: p.clone() / (two.clone() * root),
        });
    }
    Ok(SdpProblem { state: state.clone(), graph: graph.clone(), gset: GMatrixSet::from_edges(n, edges) })
}

/// Closed-form feasibility verdict with its slack values.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityVerdict<T = f64> {
    pub feasible: bool,
    /// `Σ_e C_e²`, which is `(N²/4) Σ p²` for `W_N`. Feasibility needs `≤ 1`.
    pub quadratic_load: T,
    /// Per party `Σ_{e∋k}` of its diagonal Choi entry (`(N/2) Σ_{E_k} p` for
    /// `W_N`). Feasibility needs every entry `≤ 1`.
    pub vertex_loads: Vec<T>,
    /// `(N²/(4|E|)) (Σ p)²`, a lower bound on the quadratic load for `W_N`.
    pub relaxed_bound: T,
}

impl<T: Scalar> FeasibilityVerdict<T> {
    pub fn quadratic_ok(&self) -> bool {
        self.quadratic_load <= T::one() + T::tolerance()
    }

    pub fn vertices_ok(&self) -> bool {
        self.vertex_loads.iter().all(|v| *v <= T::one() + T::tolerance())
    }

    pub fn max_vertex_load(&self) -> T {
        self.vertex_loads.iter().cloned().fold(T::zero(), Scalar::max_of)
    }
}

fn verdict_from<T: Scalar>(gset: &GMatrixSet<T>, relaxed_bound: T) -> FeasibilityVerdict<T> {
    let mut vertex_loads = vec![T::zero(); gset.n_parties()];
    let mut quadratic_load = T::zero();
    for d in gset.edges() {
        let (i, j) = d.edge;
        vertex_loads[j] = vertex_loads[j].clone() + d.a.clone();
        vertex_loads[i] = vertex_loads[i].clone() + d.b.clone();
        quadratic_load = quadratic_load + d.c.clone() * d.c.clone();
    }
    let mut v = FeasibilityVerdict { feasible: false, quadratic_load, vertex_loads, relaxed_bound };
    v.feasible = v.quadratic_ok() && v.vertices_ok();
    v
}

/// Separable feasibility of `W_N → {p_ij, EPR(i,j)}`:
/// `(N²/4) Σ p_ij² ≤ 1` and `(N/2) Σ_{E_k} p_ij ≤ 1` for every party `k`.
pub fn theorem1_check<T: Scalar>(n_parties: usize, graph: &DistillationGraph<T>) -> Result<FeasibilityVerdict<T>> {
    let gset = build_g_matrices(n_parties, graph)?;
    let ne = graph.edge_count();
    let relaxed = if ne == 0 {
        T::zero()
    } else {
        let total = graph.total_probability();
        T::from_usize(n_parties * n_parties) * total.clone() * total / T::from_usize(4 * ne)
    };
    Ok(verdict_from(&gset, relaxed))
}

/// The same criterion for a general problem (`Σ C_e² ≤ 1` plus vertex loads).
pub fn sep_criterion<T: Scalar>(problem: &SdpProblem<T>) -> FeasibilityVerdict<T> {
    verdict_from(&problem.gset, T::zero())
}

/// Variables `x7 = 1`, `x1 = C²`, all others `0`. The resulting χ and χ^Γ are
/// PSD (each has one rank-deficient 2×2 minor), so this is a feasible point
/// whenever the criterion holds.
pub fn explicit_feasible_point<T: Scalar>(gset: &GMatrixSet<T>) -> Vec<T> {
    let mut x = vec![T::zero(); gset.n_variables()];
    for (e, d) in gset.edges().iter().enumerate() {
        x[VARS_PER_EDGE * e] = d.c.clone() * d.c.clone();
        x[VARS_PER_EDGE * e + 6] = T::one();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn f_matrices_are_symmetric_zero_one() {
        let mut cover = [[0u8; 8]; 8];
        for m in 1..=7 {
            let f = f_matrix(m);
            for i in 0..8 {
                for j in 0..8 {
                    assert_eq!(f[i][j], f[j][i]);
                    assert!(f[i][j] <= 1);
                    cover[i][j] += f[i][j];
                }
            }
        }
        // no two variables share a position
        assert!(cover.iter().flatten().all(|&c| c <= 1));
    }

    #[test]
    fn w3_layout() {
        let g = DistillationGraph::complete(3, r(1, 3));
        let set = build_g_matrices(3, &g).unwrap();
        assert_eq!(set.block_sizes(), &[1, 1, 1, 1, 8, 8, 8]);
        assert_eq!(set.n_variables(), 21);
        assert_eq!(set.g0().get(4, 4, 7), r(1, 2));
        assert_eq!(set.g0().get(4, 1, 2), r(1, 2));
        assert_eq!(set.g(0, 1).get(0, 0, 0), r(-1, 1));
        assert_eq!(set.g(2, 7).get(3, 0, 0), r(-1, 1));
        let problem = build_problem(&g, &WClassState::uniform(3).unwrap()).unwrap();
        assert_eq!(problem.gset, set);
    }

    #[test]
    fn theorem1_examples() {
        let g = DistillationGraph::complete(3, r(1, 3));
        let v = theorem1_check(3, &g).unwrap();
        assert_eq!(v.quadratic_load, r(3, 4));
        assert!(v.vertex_loads.iter().all(|x| *x == r(1, 1)));
        assert!(v.feasible);
        let g = DistillationGraph::from_edges(3, [(0, 1, r(2, 3))]).unwrap();
        let v = theorem1_check(3, &g).unwrap();
        assert_eq!((v.quadratic_load.clone(), v.max_vertex_load()), (r(1, 1), r(1, 1)));
        assert!(v.feasible);
        let g = DistillationGraph::from_edges(3, [(0, 1, r(7, 10))]).unwrap();
        let v = theorem1_check(3, &g).unwrap();
        assert_eq!(v.quadratic_load, r(441, 400));
        assert!(!v.feasible);
    }

    #[test]
    fn explicit_point_is_feasible_on_the_boundary() {
        let g = DistillationGraph::from_edges(3, [(0, 1, r(2, 3))]).unwrap();
        let set = build_g_matrices(3, &g).unwrap();
        let x = explicit_feasible_point(&set);
        let m = set.evaluate(&x).unwrap();
        assert_eq!(m.get(0, 0, 0), r(0, 1));
        assert!(m.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn general_state_entries() {
        let s = WClassState::new(vec![r(1, 2), r(1, 8), r(3, 8)]).unwrap();
        let g = DistillationGraph::from_edges(3, [(0, 1, r(1, 5))]).unwrap();
        let p = build_problem(&g, &s).unwrap();
        let d = &p.gset.edges()[0];
        assert_eq!(d.a, r(4, 5));
        assert_eq!(d.b, r(1, 5));
        assert_eq!(d.c, r(2, 5));
        let bad = DistillationGraph::from_edges(3, [(0, 2, r(1, 5))]).unwrap();
        assert!(matches!(build_problem(&bad, &s), Err(Error::NotRepresentable(_))));
        let mixed = WClassState::new(vec![r(1, 2), r(1, 4), r(1, 8)]).unwrap();
        assert!(matches!(build_problem(&g, &mixed), Err(Error::NonzeroX0(_))));
    }
}
