//! Separable-operation feasibility of random EPR distillation from W-class
//! states with `x0 = 0`: constraint data, the closed-form criterion, the dual
//! certificate, a projection solver and SDPA export.

mod blocks;
mod certificate;
mod problem;
mod sdpa;
mod solver;

pub use blocks::SparseBlockMatrix;
pub use certificate::{build_dual_certificate, certificate_for, CertificateCheck, DualCertificate};
pub use problem::{
    build_g_matrices, build_problem, explicit_feasible_point, f_matrix, f_positions, sep_criterion, theorem1_check,
    EdgeData, FeasibilityVerdict, GMatrixSet, SdpProblem, VARS_PER_EDGE,
};
pub use sdpa::{export_sdpa, parse_sdpa, read_sdpa, to_sdpa_string, SdpaData};
pub use solver::{solve_feasibility, solve_feasibility_with, FeasiblePoint, SolverOptions};
