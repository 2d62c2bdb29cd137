//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wdistill_cli::cmd_gap_curve;
use wdistill_core::gap::{gap_point, locc_by_enumeration, locc_exact};
use wdistill_core::monotones::{average_change, eta, kappa, preserves_top_party, MonotoneSelector};
use wdistill_core::multicopy::{check_lemma2, entropy_nogo_check, random_operator, random_unitary};
use wdistill_core::protocols::{combing_probability, complete_probability, sep_combing_measurement, DistillationGraph, Outcome};
use wdistill_core::sampling::{random_interior_state, random_measurement, random_rational_state, random_state};
use wdistill_core::scalar::{format_significant, parse_rational};
use wdistill_core::sdp::{build_dual_certificate, build_g_matrices, build_problem, solve_feasibility, theorem1_check};
use wdistill_core::{Error, LocalMeasurement, Rational, Scalar, WClassState};

type Check = Result<String, String>;

/// Name, check and time limit in seconds.
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn closed_form(n: usize) -> f64 {
    let m = (n - 1) as f64;
    1.0 - (1.0 - 1.0 / m).powi(n as i32 - 1)
}

fn gap_curve() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("gap.csv");
    cmd_gap_curve(3, 50, &path, None).map_err(|e| e.to_string())?;
    let csv = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let mut lines = csv.lines();
    ensure(lines.next() == Some("N,locc,sep,gap"), || "bad CSV header".into())?;
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let n: usize = f[0].parse().map_err(|_| format!("bad row {line}"))?;
        let locc: f64 = f[1].parse().map_err(|_| format!("bad row {line}"))?;
        let sep: f64 = f[2].parse().map_err(|_| format!("bad row {line}"))?;
        let gap: f64 = f[3].parse().map_err(|_| format!("bad row {line}"))?;
        if n <= 12 {
            let enumerated = locc_by_enumeration(n).map_err(|e| e.to_string())?;
            let exact = locc_exact(n).map_err(|e| e.to_string())?;
            ensure(enumerated == exact, || format!("N = {n}: enumeration {enumerated} vs closed form {exact}"))?;
            ensure(f[1] == format_significant(enumerated.to_f64(), 12), || format!("N = {n}: CSV locc {}", f[1]))?;
        }
        ensure((locc - closed_form(n)).abs() < 1e-11, || format!("N = {n}: locc {locc} vs {}", closed_form(n)))?;
        ensure(sep == 1.0 && (gap - (1.0 - locc)).abs() < 1e-11, || format!("N = {n}: sep {sep}, gap {gap}"))?;
        rows += 1;
    }
    ensure(rows == 48, || format!("{rows} rows"))?;
    let far = gap_point(10_000).map_err(|e| e.to_string())?;
    let err = (far.gap - (-1.0f64).exp()).abs();
    ensure(err < 1e-4, || format!("gap at N = 10^4 is {}", far.gap))?;
    Ok(format!("48 rows, exact for N <= 12, |gap(10^4) - 1/e| = {err:.2e}"))
}

fn boundary() -> Check {
    let two_thirds = Rational::from_ratio(2, 3);
    let g = DistillationGraph::from_edges(3, [(0, 1, two_thirds.clone())]).map_err(|e| e.to_string())?;
    let v = theorem1_check(3, &g).map_err(|e| e.to_string())?;
    ensure(v.feasible, || "p = 2/3 reported infeasible".into())?;
    ensure(v.quadratic_load == Rational::from_ratio(1, 1), || format!("quadratic load {}", v.quadratic_load))?;
    ensure(v.max_vertex_load() == Rational::from_ratio(1, 1), || format!("vertex load {}", v.max_vertex_load()))?;

    let over = two_thirds + parse_rational("0.000001").map_err(|e| e.to_string())?;
    let g = DistillationGraph::from_edges(3, [(0, 1, over)]).map_err(|e| e.to_string())?;
    let v = theorem1_check(3, &g).map_err(|e| e.to_string())?;
    ensure(!v.feasible, || "p = 2/3 + 1e-6 reported feasible".into())?;
    let set = build_g_matrices(3, &g).map_err(|e| e.to_string())?;
    let cert = build_dual_certificate(3, &g).map_err(|e| e.to_string())?;
    let check = cert.verify(&set, 1e-10);
    let exact_zero = set.constraint_matrices().all(|gm| cert.z.trace_product(gm) == Rational::from_ratio(0, 1));
    ensure(exact_zero, || "some tr(Z G_m) is nonzero".into())?;
    ensure(check.min_eigenvalue >= -1e-10, || format!("min eigenvalue {}", check.min_eigenvalue))?;
    ensure(check.value < Rational::from_ratio(0, 1), || format!("tr(Z G0) = {}", check.value))?;
    ensure(check.proves_infeasibility, || "certificate not accepted".into())?;
    Ok(format!("slacks 1 and 1 at 2/3; tr(Z G0) = {} above it", check.value))
}

fn random_graph<R: Rng>(rng: &mut R, n: usize) -> DistillationGraph<f64> {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let keep = rng.random_range(1..=pairs.len().min(6));
    for k in 0..keep {
        let pick = rng.random_range(k..pairs.len());
        pairs.swap(k, pick);
    }
    let edges = pairs[..keep].iter().map(|&(i, j)| (i, j, rng.random_range(0.1..1.0)));
    DistillationGraph::from_edges(n, edges).expect("distinct edges")
}

/// Rescales so that the binding constraint sits at `target`.
fn scale_to(g: DistillationGraph<f64>, n: usize, target: f64) -> DistillationGraph<f64> {
    let v = theorem1_check(n, &g).expect("valid graph");
    let s = (target / v.quadratic_load).sqrt().min(target / v.max_vertex_load());
    g.scaled(&s)
}

fn solver_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut feasible, mut quadratic, mut vertex) = (0, 0, 0);
    let mut worst_residual = 0.0f64;
    for instance in 0..200 {
        let n = rng.random_range(3..=5);
        let target = if rng.random_bool(0.5) { 1.0 - 1e-3 } else { 1.0 + 1e-3 };
        let raw = random_graph(&mut rng, n);
        let g = scale_to(raw, n, target);
        let verdict = theorem1_check(n, &g).map_err(|e| e.to_string())?;
        let problem = build_problem(&g, &WClassState::uniform(n).unwrap()).map_err(|e| e.to_string())?;
        let solved = solve_feasibility(&problem, 1e-8, 100_000);
        let tag = || format!("instance {instance} (N = {n}, edges {:?})", g.edges().collect::<Vec<_>>());
        if verdict.feasible {
            let fp = solved.map_err(|e| format!("{}: closed form feasible, solver: {e}", tag()))?;
            let r = fp.cone_residual.max(fp.affine_residual);
            ensure(r < 1e-6, || format!("{}: residual {r:e}", tag()))?;
            worst_residual = worst_residual.max(r);
            feasible += 1;
        } else {
            ensure(matches!(solved, Err(Error::NoConvergence { .. })), || format!("{}: solver accepted an infeasible graph", tag()))?;
            if verdict.quadratic_ok() {
                vertex += 1;
            } else {
                let set = build_g_matrices(n, &g).map_err(|e| e.to_string())?;
                let check = build_dual_certificate(n, &g).map_err(|e| e.to_string())?.verify(&set, 1e-10);
                ensure(check.proves_infeasibility, || format!("{}: certificate rejected", tag()))?;
                quadratic += 1;
            }
        }
    }
    Ok(format!(
        "0 disagreements; {feasible} feasible (worst residual {worst_residual:.1e}), {quadratic} certified, {vertex} vertex-bound"
    ))
}

fn monotonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_kappa, mut worst_eta, mut preserving) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
    for _ in 0..10_000 {
        let n = rng.random_range(2..=7);
        let s = random_state(&mut rng, n);
        let m = random_measurement(&mut rng, n);
        let (b, a) = average_change(&s, &m, &MonotoneSelector::Kappa).map_err(|e| e.to_string())?;
        worst_kappa = worst_kappa.max(a - b);
        if preserves_top_party(&s, &m).map_err(|e| e.to_string())? {
            let (b, a) = average_change(&s, &m, &MonotoneSelector::Eta).map_err(|e| e.to_string())?;
            worst_eta = worst_eta.max(a - b);
            preserving += 1;
        }
    }
    ensure(worst_kappa <= 1e-10, || format!("κ rose by {worst_kappa:e}"))?;
    ensure(worst_eta <= 1e-10, || format!("η rose by {worst_eta:e}"))?;

    let mut least_drop = f64::INFINITY;
    let mut strict = 0;
    while strict < 10_000 {
        let n = rng.random_range(3..=7);
        let s = random_interior_state(&mut rng, n, 0.05);
        let (a, c): (f64, f64) = (rng.random(), rng.random());
        if (a - c).abs() < 0.1 {
            continue;
        }
        let m = LocalMeasurement::diagonal(s.sorted_indices().first(), a, c).map_err(|e| e.to_string())?;
        let (b, after) = average_change(&s, &m, &MonotoneSelector::Kappa).map_err(|e| e.to_string())?;
        least_drop = least_drop.min(b - after);
        strict += 1;
    }
    ensure(least_drop > 1e-6, || format!("smallest κ drop {least_drop:e}"))?;
    Ok(format!(
        "max Δκ {worst_kappa:.1e}, max Δη {worst_eta:.1e} over {preserving} preserving pairs, min strict drop {least_drop:.2e} (N >= 3)"
    ))
}

fn combing_and_complete() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let two = Rational::from_ratio(2, 1);
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let s = random_rational_state(&mut rng, n, 60);
        let eta_s = eta(&s);
        for k in 0..n {
            let p = combing_probability(&s, k).map_err(|e| e.to_string())?;
            let want = (two.clone() * s.component(k).clone()).min(two.clone() * eta_s.clone());
            ensure(p == want, || format!("state {:?}, party {k}: combing {p} vs {want}", s.components()))?;
        }
        let k = kappa(&s).to_f64();
        let pc = complete_probability(&s.to_f64(), 1e-3).map_err(|e| e.to_string())?;
        ensure(pc >= 0.99 * k, || format!("state {:?}: complete {pc} vs κ {k}", s.components()))?;
        if k > 0.0 {
            worst_ratio = worst_ratio.min(pc / k);
        }
    }
    Ok(format!("combing exact on 100 states, min P_complete/κ = {worst_ratio:.5}"))
}

fn separable_combing() -> Check {
    let mut worst_eig = f64::INFINITY;
    let mut summary = Vec::new();
    for n in 3..=8 {
        let m = sep_combing_measurement(n).map_err(|e| e.to_string())?;
        worst_eig = worst_eig.min(m.completion_min_eigenvalue());
        ensure(m.completion_min_eigenvalue() >= -1e-12, || format!("N = {n}: min eigenvalue {}", m.completion_min_eigenvalue()))?;
        let psi = WClassState::<f64>::psi_half(n).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for o in m.apply_to_state(&psi).map_err(|e| e.to_string())? {
            if o.probability < 1e-15 {
                continue;
            }
            total += o.probability;
            ensure(matches!(o.outcome, Some(Outcome::Epr { i: 0, .. })), || format!("N = {n}: outcome {:?}", o.outcome))?;
        }
        ensure((total - 1.0).abs() <= 1e-12, || format!("N = {n}: total {total}"))?;
        summary.push(format!("N={n} SEP 1 vs LOCC {:.4}", closed_form(n)));
    }
    Ok(format!("min completion eigenvalue {worst_eig:.1e}; {}", summary.join(", ")))
}

fn multicopy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut misclassified = 0;
    for n in 1..=3 {
        let ops: Vec<DMatrix<Complex64>> = (0..100).map(|_| random_operator(&mut rng, n)).collect();
        let report = check_lemma2(&mut rng, &ops, n, 1e-10).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("n = {n}: {report:?}"))?;
        for _ in 0..100 {
            let p: f64 = rng.random_range(0.05..1.0);
            let m = random_unitary(&mut rng, n).map(|z| z * p.sqrt());
            if !entropy_nogo_check(&m, n, 1e-9).map_err(|e| e.to_string())?.is_unitary_like() {
                misclassified += 1;
            }
            let m = random_operator(&mut rng, n);
            if entropy_nogo_check(&m, n, 1e-9).map_err(|e| e.to_string())?.is_unitary_like() {
                misclassified += 1;
            }
        }
    }
    ensure(misclassified == 0, || format!("{misclassified} misclassified operators"))?;
    Ok("lemma checks pass for n = 1..3; 0 of 600 operators misclassified".into())
}

fn headline() -> Check {
    let p = gap_point(10_000).map_err(|e| e.to_string())?;
    let pct = (100.0 * p.gap).round();
    ensure((p.gap - (-1.0f64).exp()).abs() < 1e-4 && pct == 37.0, || format!("gap {}", p.gap))?;
    Ok(format!("SEP - LOCC = {:.4} ≈ {pct}% at N = 10^4", p.gap))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("LOCC combing gap curve", gap_curve, 5),
        ("three-party boundary and certificate", boundary, 1),
        ("solver agrees with closed form", solver_agreement, 60),
        ("monotonicity of κ and η", monotonicity, 30),
        ("combing and complete protocol", combing_and_complete, 60),
        ("separable combing measurement", separable_combing, 5),
        ("multicopy lemma and no-go", multicopy, 60),
        ("asymptotic 37% gap", headline, 5),
    ];
    let mut failures = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => Err(format!("{detail}; over the {limit} s limit")),
            other => other,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if result.is_err() {
            failures += 1;
        }
        println!("criterion {}: {status} {name}: {detail} ({:.2} s)", k + 1, elapsed.as_secs_f64());
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
