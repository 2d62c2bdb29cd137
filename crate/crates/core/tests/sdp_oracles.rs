//! Separable-feasibility constraint set, dual certificates, the projection
//! solver and SDPA files.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wdistill_core::protocols::DistillationGraph;
use wdistill_core::scalar::parse_rational;
use wdistill_core::sdp::{
    build_dual_certificate, build_g_matrices, build_problem, certificate_for, explicit_feasible_point, parse_sdpa,
    export_sdpa, read_sdpa, solve_feasibility, theorem1_check, to_sdpa_string, VARS_PER_EDGE,
};
use wdistill_core::{Error, Rational, Scalar, WClassState};

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn random_graph<R: Rng>(rng: &mut R, n: usize, max_edges: usize, den: i64) -> DistillationGraph<Rational> {
    let mut g = DistillationGraph::new(n);
    for _ in 0..rng.random_range(1..=max_edges) {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j && g.probability(i, j).is_none() {
            g.add_edge(i, j, r(rng.random_range(1..=den), den * n as i64)).unwrap();
        }
    }
    if g.is_empty() {
        g.add_edge(0, 1, r(1, 2 * n as i64)).unwrap();
    }
    g
}

/// `χ ⊕ χ^Γ` for the edge Choi matrix on `|a b⟩`, `a, b ∈ {0, 1}`, with the
/// variable entries `x` and the fixed entries `A, B, C`.
fn choi_pair(x: &[f64], a: f64, b: f64, c: f64) -> DMatrix<f64> {
    let mut chi = DMatrix::<f64>::zeros(4, 4);
    let entries = [
        ((0, 0), x[0]),
        ((0, 1), x[1]),
        ((0, 2), x[2]),
        ((0, 3), x[3]),
        ((1, 1), a),
        ((2, 2), b),
        ((1, 2), c),
        ((1, 3), x[4]),
        ((2, 3), x[5]),
        ((3, 3), x[6]),
    ];
    for ((i, j), v) in entries {
        chi[(i, j)] = v;
        chi[(j, i)] = v;
    }
    // partial transpose on the second qubit: (a b, a' b') -> (a b', a' b)
    let mut gamma = DMatrix::<f64>::zeros(4, 4);
    for row in 0..4 {
        for col in 0..4 {
            let (a1, b1, a2, b2) = (row >> 1, row & 1, col >> 1, col & 1);
            gamma[(a1 << 1 | b2, a2 << 1 | b1)] = chi[(row, col)];
        }
    }
    let mut out = DMatrix::zeros(8, 8);
    out.view_mut((0, 0), (4, 4)).copy_from(&chi);
    out.view_mut((4, 4), (4, 4)).copy_from(&gamma);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn blocks_are_choi_matrix_and_partial_transpose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=6);
        let g = random_graph(&mut rng, n, 5, 6).to_f64();
        let set = build_g_matrices(n, &g).unwrap();
        let x: Vec<f64> = (0..set.n_variables()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let blocks = set.evaluate(&x).unwrap().dense_blocks();
        let ne = set.edge_count();
        let first = 1.0 - (0..ne).map(|e| x[VARS_PER_EDGE * e]).sum::<f64>();
        prop_assert!((blocks[0][(0, 0)] - first).abs() < 1e-14);
        for (e, d) in set.edges().iter().enumerate() {
            let xe = &x[VARS_PER_EDGE * e..VARS_PER_EDGE * (e + 1)];
            prop_assert!((blocks[1 + e][(0, 0)] - (1.0 - xe[6])).abs() < 1e-14);
            let half = n as f64 / 2.0 * d.p;
            let expect = choi_pair(xe, half, half, half);
            prop_assert!((&blocks[1 + ne + e] - expect).amax() < 1e-14);
        }
    }

    #[test]
    fn certificate_algebra_is_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=8);
        let g = random_graph(&mut rng, n, 8, 5);
        let set = build_g_matrices(n, &g).unwrap();
        let cert = certificate_for(&set);
        let check = cert.verify(&set, 1e-10);
        prop_assert!(check.orthogonal);
        prop_assert_eq!(check.max_abs_constraint_trace, 0.0);
        prop_assert!(check.min_eigenvalue >= -1e-10);
        let sum_sq = g.edges().fold(r(0, 1), |acc, (_, p)| acc + p.clone() * p.clone());
        let quarter_n2 = r((n * n) as i64, 4);
        prop_assert_eq!(&check.value, &(r(1, 1) - quarter_n2.clone() * sum_sq.clone()));
        let verdict = theorem1_check(n, &g).unwrap();
        prop_assert_eq!(check.proves_infeasibility, verdict.quadratic_load > r(1, 1));
        // tr(Z X) = tr(Z G0) for every point of the affine set
        let x: Vec<Rational> = (0..set.n_variables()).map(|_| r(rng.random_range(-9..=9), 7)).collect();
        prop_assert_eq!(cert.z.trace_product(&set.evaluate(&x).unwrap()), check.value);
    }

    #[test]
    fn explicit_point_is_feasible_under_the_quadratic_condition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=8);
        let g = random_graph(&mut rng, n, 6, 4);
        let set = build_g_matrices(n, &g).unwrap();
        let verdict = theorem1_check(n, &g).unwrap();
        let blocks = set.evaluate(&explicit_feasible_point(&set)).unwrap();
        let min_eig = blocks.min_eigenvalue();
        if verdict.quadratic_ok() {
            prop_assert!(min_eig >= -1e-12, "min eigenvalue {min_eig}");
        } else {
            prop_assert!(blocks.get(0, 0, 0) < r(0, 1));
        }
    }

    #[test]
    fn sdpa_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=6);
        let g = random_graph(&mut rng, n, 5, 7).to_f64();
        let set = build_g_matrices(n, &g).unwrap();
        let text = to_sdpa_string(&set);
        let data = parse_sdpa(&text).unwrap();
        prop_assert_eq!(data.n_parties, Some(n));
        prop_assert_eq!(data.block_sizes.as_slice(), set.block_sizes());
        prop_assert!(data.objective.iter().all(|&c| c == 0.0));
        let back = data.to_gmatrix_set().unwrap();
        prop_assert_eq!(back.g0(), set.g0());
        for (a, b) in back.constraint_matrices().zip(set.constraint_matrices()) {
            prop_assert_eq!(a, b);
        }
        prop_assert_eq!(to_sdpa_string(&back), text);
    }
}

#[test]
fn three_party_boundary() {
    let g = DistillationGraph::from_edges(3, [(0, 1, r(2, 3))]).unwrap();
    let v = theorem1_check(3, &g).unwrap();
    assert!(v.feasible);
    assert_eq!(v.quadratic_load, r(1, 1));
    assert_eq!(v.max_vertex_load(), r(1, 1));

    let over = r(2, 3) + parse_rational("0.000001").unwrap();
    let g = DistillationGraph::from_edges(3, [(0, 1, over)]).unwrap();
    let v = theorem1_check(3, &g).unwrap();
    assert!(!v.feasible);
    let set = build_g_matrices(3, &g).unwrap();
    let check = build_dual_certificate(3, &g).unwrap().verify(&set, 1e-10);
    assert!(check.proves_infeasibility);
}

#[test]
fn general_state_entries() {
    let s = WClassState::new(vec![r(1, 2), r(1, 8), r(1, 8), r(1, 4)]).unwrap();
    let g = DistillationGraph::from_edges(4, [(0, 1, r(1, 10)), (1, 2, r(1, 20))]).unwrap();
    let problem = build_problem(&g, &s).unwrap();
    let d = &problem.gset.edges()[0];
    // A = p/(2 x_j), B = p/(2 x_i), C = p/(2 √(x_i x_j)) with (i, j) = (1, 2)
    assert_eq!(d.a, r(1, 10) / (r(2, 1) * r(1, 8)));
    assert_eq!(d.b, r(1, 10) / (r(2, 1) * r(1, 2)));
    assert_eq!(d.c, r(1, 10) / (r(2, 1) * r(1, 4)));

    let bad = DistillationGraph::from_edges(4, [(0, 3, r(1, 10))]).unwrap();
    assert!(matches!(build_problem(&bad, &s), Err(Error::NotRepresentable(_))));
    let float = build_problem(&bad.to_f64(), &s.to_f64()).unwrap();
    assert!((float.gset.edges()[0].c - 0.1 / (2.0 * (0.125f64).sqrt())).abs() < 1e-15);

    let with_zero = WClassState::new(vec![r(1, 2), r(1, 2), r(0, 1)]).unwrap();
    let g = DistillationGraph::from_edges(3, [(0, 2, r(1, 10))]).unwrap();
    assert!(matches!(build_problem(&g, &with_zero), Err(Error::InvalidGraph(_))));
    let with_x0 = WClassState::new(vec![r(1, 4), r(1, 4), r(1, 4)]).unwrap();
    assert!(matches!(build_problem(&g, &with_x0), Err(Error::NonzeroX0(_))));
}

fn float_problem(n: usize, edges: &[(usize, usize, f64)]) -> wdistill_core::sdp::SdpProblem<f64> {
    let g = DistillationGraph::from_edges(n, edges.iter().copied()).unwrap();
    build_problem(&g, &WClassState::uniform(n).unwrap()).unwrap()
}

#[test]
fn solver_finds_interior_points() {
    let problem = float_problem(3, &[(0, 1, 0.3), (0, 2, 0.3), (1, 2, 0.3)]);
    let fp = solve_feasibility(&problem, 1e-9, 100_000).unwrap();
    assert!(fp.cone_residual < 1e-6 && fp.affine_residual < 1e-6);
    assert!(fp.off_pattern_max(&problem.gset) < 1e-12);
    let exact = problem.gset.evaluate(&fp.variables).unwrap();
    assert!(exact.min_eigenvalue() > -1e-6);
}

#[test]
fn solver_reports_no_convergence_on_infeasible_problems() {
    // quadratic violation
    let problem = float_problem(3, &[(0, 1, 0.7)]);
    assert!(matches!(solve_feasibility(&problem, 1e-8, 5_000), Err(Error::NoConvergence { .. })));
    // vertex violation only: a star centred on party 1 of W_4
    let problem = float_problem(4, &[(0, 1, 0.2), (0, 2, 0.2), (0, 3, 0.2)]);
    let v = wdistill_core::sdp::sep_criterion(&problem);
    assert!(v.quadratic_ok() && !v.vertices_ok());
    assert!(matches!(solve_feasibility(&problem, 1e-8, 5_000), Err(Error::NoConvergence { iterations: 0, .. })));
}

#[test]
fn empty_graph_is_trivially_feasible() {
    let problem = float_problem(3, &[]);
    let fp = solve_feasibility(&problem, 1e-8, 10).unwrap();
    assert!(fp.variables.is_empty());
    let cert = certificate_for(&problem.gset);
    assert_eq!(cert.z.nnz(), 0);
    assert_eq!(cert.value, 0.0);
}

#[test]
fn sdpa_layout_and_files() {
    let problem = float_problem(3, &[(0, 1, 0.25)]);
    let text = to_sdpa_string(&problem.gset);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('"'));
    assert_eq!(lines[1], "* parties 3");
    assert_eq!(lines[2], "* edge 1 2");
    assert_eq!(lines[3], "7");
    assert_eq!(lines[4], "3");
    assert_eq!(lines[5], "1 1 8");
    assert_eq!(lines[6], "0 0 0 0 0 0 0");
    // F0 = −G0 starts with the normalisation entry
    assert_eq!(lines[7], "0 1 1 1 -1");
    // every entry line lies in the upper triangle of its block
    for l in &lines[7..] {
        let f: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert!(f[2] <= f[3]);
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w3.dat-s");
    export_sdpa(&problem.gset, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    let back = read_sdpa(&path).unwrap().to_gmatrix_set().unwrap();
    assert_eq!(back.g0(), problem.gset.g0());
}

#[test]
fn sdpa_rejects_malformed_input() {
    assert!(matches!(parse_sdpa(""), Err(Error::Sdpa(_))));
    assert!(matches!(parse_sdpa("2\n1\n1 1\n0 0\n"), Err(Error::Sdpa(_))));
    assert!(matches!(parse_sdpa("1\n1\n2\n0\n1 1 3 3 1.0\n"), Err(Error::Sdpa(_))));
    assert!(matches!(parse_sdpa("1\n1\n2\n0\n1 1 1 x\n"), Err(Error::Sdpa(_))));
    // without the comment lines the constraint set cannot be rebuilt
    let data = parse_sdpa("1\n1\n2\n0\n1 1 1 1 1.0\n").unwrap();
    assert_eq!(data.matrices.len(), 2);
    assert!(data.to_gmatrix_set().is_err());
}
