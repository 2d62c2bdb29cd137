//! Alternating projections between the cone `ℝ₊ × ℝ₊^|E| × (S₊⁸)^|E|` and the
//! affine set `{G0 + Σ x_v G_v}`.

use nalgebra::{DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};
use crate::sdp::problem::{f_positions, sep_criterion, GMatrixSet, SdpProblem, VARS_PER_EDGE};

type Block = SMatrix<f64, 8, 8>;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Use Dykstra's correction on the cone step (converges to the projection
    /// of the start point rather than to an arbitrary feasible point).
    pub dykstra: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100_000, dykstra: false }
    }
}

/// Point of the affine set whose distance to the cone is below the tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasiblePoint {
    /// `x_m^e` at index `7e + m − 1`.
    pub variables: Vec<f64>,
    /// `G0 + Σ x_v G_v` by block.
    pub blocks: Vec<DMatrix<f64>>,
    /// `‖X − P_K(X)‖_F`.
    pub cone_residual: f64,
    /// `‖Y − P_L(Y)‖_F` for `Y = P_K(X)`.
    pub affine_residual: f64,
    pub iterations: usize,
}

impl FeasiblePoint {
    /// Largest entry of the 8×8 blocks outside the pattern of `χ ⊕ χ^Γ`
    /// (structurally zero in the affine set, so this measures only rounding).
    pub fn off_pattern_max(&self, gset: &GMatrixSet<f64>) -> f64 {
        let ne = gset.edge_count();
        let mut pattern = [[false; 8]; 8];
        for m in 1..=VARS_PER_EDGE {
            for (i, j) in f_positions(m) {
                pattern[i][j] = true;
                pattern[j][i] = true;
            }
        }
        for (i, j) in [(1, 1), (2, 2), (1, 2), (5, 5), (6, 6), (4, 7)] {
            pattern[i][j] = true;
            pattern[j][i] = true;
        }
        let mut worst = 0.0f64;
        for b in &self.blocks[1 + ne..] {
            for i in 0..8 {
                for j in 0..8 {
                    if !pattern[i][j] {
                        worst = worst.max(b[(i, j)].abs());
                    }
                }
            }
        }
        worst
    }
}

#[derive(Clone, Debug)]
struct Point {
    first: f64,
    scalars: Vec<f64>,
    blocks: Vec<Block>,
}

impl Point {
    fn dist_sq(&self, other: &Point) -> f64 {
        let mut d = (self.first - other.first).powi(2);
        for (a, b) in self.scalars.iter().zip(&other.scalars) {
            d += (a - b).powi(2);
        }
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            d += (a - b).norm_squared();
        }
        d
    }

    fn axpy(&self, other: &Point, sign: f64) -> Point {
        Point {
            first: self.first + sign * other.first,
            scalars: self.scalars.iter().zip(&other.scalars).map(|(a, b)| a + sign * b).collect(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b * sign).collect(),
        }
    }
}

fn project_psd(b: &Block) -> Block {
    let eig = b.symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return *b;
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let v = eig.eigenvectors;
    v * Block::from_diagonal(&clipped) * v.transpose()
}

fn project_cone(p: &Point) -> Point {
    Point {
        first: p.first.max(0.0),
        scalars: p.scalars.iter().map(|s| s.max(0.0)).collect(),
        blocks: p.blocks.iter().map(project_psd).collect(),
    }
}

struct Affine {
    ne: usize,
    g0: Point,
    gram: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Affine {
    fn new(gset: &GMatrixSet<f64>) -> Result<Self> {
        let ne = gset.edge_count();
        let g0_blocks = gset.g0().dense_blocks();
        let g0 = Point {
            first: g0_blocks[0][(0, 0)],
            scalars: (0..ne).map(|e| g0_blocks[1 + e][(0, 0)]).collect(),
            blocks: (0..ne).map(|e| Block::from_iterator(g0_blocks[1 + ne + e].iter().cloned())).collect(),
        };
        let mats: Vec<_> = gset.constraint_matrices().collect();
        let nv = mats.len();
        let gram = DMatrix::from_fn(nv, nv, |a, b| mats[a].trace_product(mats[b]));
        let gram = gram
            .cholesky()
            .ok_or_else(|| Error::InvalidGraph("constraint matrices are linearly dependent".into()))?;
        Ok(Self { ne, g0, gram })
    }

    /// `⟨G_v, M⟩` for every variable.
    fn adjoint(&self, m: &Point) -> DVector<f64> {
        let mut out = DVector::zeros(VARS_PER_EDGE * self.ne);
        for e in 0..self.ne {
            let b = &m.blocks[e];
            for k in 1..=VARS_PER_EDGE {
                let mut v = 0.0;
                for (i, j) in f_positions(k) {
                    v += if i == j { b[(i, j)] } else { 2.0 * b[(i, j)] };
                }
                match k {
                    1 => v -= m.first,
                    7 => v -= m.scalars[e],
                    _ => {}
                }
                out[VARS_PER_EDGE * e + k - 1] = v;
            }
        }
        out
    }

    fn evaluate(&self, x: &DVector<f64>) -> Point {
        let mut p = self.g0.clone();
        for e in 0..self.ne {
            for k in 1..=VARS_PER_EDGE {
                let v = x[VARS_PER_EDGE * e + k - 1];
                for (i, j) in f_positions(k) {
                    p.blocks[e][(i, j)] += v;
                    if i != j {
                        p.blocks[e][(j, i)] += v;
                    }
                }
                match k {
                    1 => p.first -= v,
                    7 => p.scalars[e] -= v,
                    _ => {}
                }
            }
        }
        p
    }

    fn project(&self, y: &Point) -> (DVector<f64>, Point) {
        let rhs = self.adjoint(&y.axpy(&self.g0, -1.0));
        let x = self.gram.solve(&rhs);
        let p = self.evaluate(&x);
        (x, p)
    }
}

fn to_dense(p: &Point) -> Vec<DMatrix<f64>> {
    std::iter::once(DMatrix::from_element(1, 1, p.first))
        .chain(p.scalars.iter().map(|&s| DMatrix::from_element(1, 1, s)))
        .chain(p.blocks.iter().map(|b| DMatrix::from_iterator(8, 8, b.iter().cloned())))
        .collect()
}

/// [`solve_feasibility_with`] with the default Dykstra setting.
pub fn solve_feasibility(problem: &SdpProblem<f64>, tol: f64, max_iter: usize) -> Result<FeasiblePoint> {
    solve_feasibility_with(problem, &SolverOptions { tol, max_iter, ..SolverOptions::default() })
}

/// Searches for a feasible point. The per-party vertex bounds involve problem
/// data only; when one fails the solver stops before iterating. Either way a
/// `NoConvergence` error is not a proof of infeasibility.
pub fn solve_feasibility_with(problem: &SdpProblem<f64>, opts: &SolverOptions) -> Result<FeasiblePoint> {
    let gset = &problem.gset;
    let verdict = sep_criterion(problem);
    if !verdict.vertices_ok() {
        return Err(Error::NoConvergence { iterations: 0, cone_residual: f64::NAN, affine_residual: f64::NAN });
    }
    let affine = Affine::new(gset)?;
    let ne = affine.ne;
    let zero = Point { first: 0.0, scalars: vec![0.0; ne], blocks: vec![Block::zeros(); ne] };
    let (mut x, mut xp) = affine.project(&zero);
    let mut correction = zero.clone();
    let mut cone_residual = f64::INFINITY;
    let mut affine_residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let shifted = if opts.dykstra { xp.axpy(&correction, 1.0) } else { xp.clone() };
        let y = project_cone(&shifted);
        if opts.dykstra {
            correction = shifted.axpy(&y, -1.0);
        }
        cone_residual = if opts.dykstra { xp.dist_sq(&project_cone(&xp)).sqrt() } else { xp.dist_sq(&y).sqrt() };
        let (nx, nxp) = affine.project(&y);
        affine_residual = y.dist_sq(&nxp).sqrt();
        if cone_residual < opts.tol && affine_residual < opts.tol {
            return Ok(FeasiblePoint {
                variables: x.iter().cloned().collect(),
                blocks: to_dense(&xp),
                cone_residual,
                affine_residual,
                iterations: iter,
            });
        }
        x = nx;
        xp = nxp;
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, cone_residual, affine_residual })
}
