//! Dual certificate for violations of the quadratic condition.
//!
//! `Z = Σ_e Z^e` with
//! `Z^e = [1/|E|] ⊕ (C_e² at edge e's scalar block) ⊕ (0₄ ⊕ K_e at edge e's 8×8 block)`
//! and `K_e` zero except `K(0,0) = 1`, `K(0,3) = K(3,0) = −C_e`, `K(3,3) = C_e²`.
//! `Z ⪰ 0` and `tr(Z G_m^e) = 0` for every constraint matrix, so any feasible
//! point would give `0 ≤ tr(Z X) = tr(Z G0) = 1 − Σ_e C_e²`.

use crate::error::Result;
use crate::protocols::DistillationGraph;
use crate::scalar::Scalar;
use crate::sdp::blocks::SparseBlockMatrix;
use crate::sdp::problem::{build_g_matrices, GMatrixSet};

#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate<T = f64> {
    pub z: SparseBlockMatrix<T>,
    /// `tr(Z G0)`.
    pub value: T,
}

/// Outcome of checking a certificate against a constraint set.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateCheck<T = f64> {
    /// Every `tr(Z G_m^e)` is zero (exactly, for exact `T`).
    pub orthogonal: bool,
    pub max_abs_constraint_trace: f64,
    pub min_eigenvalue: f64,
    pub value: T,
    /// `orthogonal`, `Z ⪰ 0` within the tolerance, and `tr(Z G0) < 0`.
    pub proves_infeasibility: bool,
}

/// Certificate built from the fixed entries of `gset`. An empty graph gives
/// `Z = 0`.
pub fn certificate_for<T: Scalar>(gset: &GMatrixSet<T>) -> DualCertificate<T> {
    let ne = gset.edge_count();
    let mut z = SparseBlockMatrix::zeros(gset.block_sizes().to_vec());
    if ne > 0 {
        z.set(0, 0, 0, T::one());
    }
    for (e, d) in gset.edges().iter().enumerate() {
        let (scalar, block) = (1 + e, 1 + ne + e);
        let c2 = d.c.clone() * d.c.clone();
        z.set(scalar, 0, 0, c2.clone());
        z.set(block, 4, 4, T::one());
        z.set(block, 4, 7, -d.c.clone());
        z.set(block, 7, 7, c2);
    }
    let value = z.trace_product(gset.g0());
    DualCertificate { z, value }
}

/// The certificate for `W_N` and the given graph.
pub fn build_dual_certificate<T: Scalar>(n_parties: usize, graph: &DistillationGraph<T>) -> Result<DualCertificate<T>> {
    Ok(certificate_for(&build_g_matrices(n_parties, graph)?))
}

impl<T: Scalar> DualCertificate<T> {
    pub fn verify(&self, gset: &GMatrixSet<T>, psd_tol: f64) -> CertificateCheck<T> {
        let mut orthogonal = true;
        let mut max_abs = 0.0f64;
        for g in gset.constraint_matrices() {
            let t = self.z.trace_product(g);
            if t.abs() > T::tolerance() {
                orthogonal = false;
            }
            max_abs = max_abs.max(t.to_f64().abs());
        }
        let min_eigenvalue = self.z.min_eigenvalue();
        let value = self.z.trace_product(gset.g0());
        let proves_infeasibility = orthogonal && min_eigenvalue >= -psd_tol && value < T::zero();
        CertificateCheck { orthogonal, max_abs_constraint_trace: max_abs, min_eigenvalue, value, proves_infeasibility }
    }
}
