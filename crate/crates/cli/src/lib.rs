//! Command implementations behind the `wdistill` binary.
//!
//! Every command returns a [`Report`] holding both the text rendering and the
//! JSON value; `main` picks one and writes it to stdout or `--output`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use wdistill_core::gap::{gap_curve, gap_curve_csv, gap_curve_svg};
use wdistill_core::monotones::{kappa, MonotoneReport};
use wdistill_core::multicopy::{check_lemma2, entropy_nogo_check, random_operator, random_unitary, NogoVerdict, MAX_COPIES};
use wdistill_core::protocols::{
    combing_distribution, default_rounds, ev_scheme, simulate_monte_carlo, DistillationGraph, Protocol,
};
use wdistill_core::scalar::format_trimmed;
use wdistill_core::sdp::{
    build_problem, certificate_for, export_sdpa, sep_criterion, solve_feasibility_with, FeasibilityVerdict,
    SdpProblem, SolverOptions,
};
use wdistill_core::{Rational, Scalar, WClassState};

/// Environment variable naming the default directory for written files.
pub const OUTPUT_DIR_ENV: &str = "WDISTILL_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(wdistill_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Domain(_) | Self::Failed(_) => 1,
        }
    }
}

impl From<wdistill_core::Error> for CliError {
    fn from(e: wdistill_core::Error) -> Self {
        match e {
            wdistill_core::Error::Parse(msg) => Self::Usage(msg),
            wdistill_core::Error::Json(err) => Self::Usage(format!("malformed JSON: {err}")),
            other => Self::Domain(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Domain(wdistill_core::Error::Io(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "wdistill", version, about = "Random EPR distillation from N-qubit W-class states")]
pub struct Cli {
    /// Print JSON instead of a text table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Destination file. For gap-curve and export-sdpa this is the data file;
    /// for the other commands the report is written here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Directory for default output files and relative --output paths.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Ev,
    Fl,
    Combing,
    Complete,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// η, κ and the component monotones of a state.
    Monotones {
        /// JSON array of components (or a file containing one); "p/q" strings select exact arithmetic.
        #[arg(long)]
        state: String,
    },
    /// Exact outcome distribution of a protocol plus a Monte Carlo run.
    Simulate {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Weak-measurement strength for fl and complete.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target party of the combing protocol (1-based).
        #[arg(long, default_value_t = 1)]
        party: usize,
        /// Round budget for fl and complete (default ⌈60/eps⌉).
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Separable feasibility of a distillation graph.
    SepFeasible {
        #[arg(long)]
        n: usize,
        /// JSON array of [i, j, p] with 1-based parties.
        #[arg(long)]
        graph: String,
        /// Initial state (default: the uniform W state).
        #[arg(long)]
        state: Option<String>,
        /// Also run the numerical projection solver.
        #[arg(long)]
        solve: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Dual certificate for the quadratic condition and its verification.
    Certificate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Writes the feasibility problem in sparse SDPA format.
    ExportSdpa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Brute-force checks of the multi-copy tilde-string lemma and the entropy condition.
    MulticopyVerify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// LOCC versus SEP combing probability of ψ½ as a CSV table.
    GapCurve {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
}

impl Report {
    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let mut s = serde_json::to_string_pretty(&self.json).unwrap_or_default();
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}

/// Parses an inline JSON argument, falling back to reading it as a file path.
pub fn read_json_arg(arg: &str) -> CliResult<Value> {
    match serde_json::from_str(arg) {
        Ok(v) => Ok(v),
        Err(inline) => {
            let path = Path::new(arg);
            if path.is_file() {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("malformed JSON in {}: {e}", path.display())))
            } else {
                Err(CliError::Usage(format!("malformed JSON: {inline}")))
            }
        }
    }
}

/// Whether any number in the value is written as a string.
fn wants_exact(v: &Value) -> bool {
    match v {
        Value::String(_) => true,
        Value::Array(items) => items.iter().any(wants_exact),
        _ => false,
    }
}

fn graph_values(v: &Value) -> Vec<Value> {
    v.as_array()
        .map(|items| items.iter().filter_map(|e| e.as_array().and_then(|t| t.get(2)).cloned()).collect())
        .unwrap_or_default()
}

fn show<T: Scalar>(v: &T) -> String {
    let decimal = format_trimmed(v.to_f64(), 12);
    if T::EXACT {
        let exact = v.to_json().as_str().map(str::to_string).unwrap_or_default();
        if !exact.is_empty() && exact != decimal {
            return format!("{decimal} [{exact}]");
        }
    }
    decimal
}

fn resolve(cli: &Cli, path: &Path) -> PathBuf {
    match &cli.output_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

/// Path of a data file: `--output` if given, else `default_name` in the output directory.
pub fn data_path(cli: &Cli, default_name: &str) -> PathBuf {
    match &cli.output {
        Some(p) => resolve(cli, p),
        None => resolve(cli, Path::new(default_name)),
    }
}

fn check_parties(n: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Monotones { state } => cmd_monotones(&read_json_arg(state)?),
        Command::Simulate { state, protocol, eps, trials, seed, party, max_rounds } => {
            cmd_simulate(&read_json_arg(state)?, *protocol, *eps, *trials, *seed, *party, *max_rounds)
        }
        Command::SepFeasible { n, graph, state, solve, tol, max_iter } => {
            check_parties(*n)?;
            let graph = read_json_arg(graph)?;
            let state = state.as_deref().map(read_json_arg).transpose()?;
            let opts = solve.then(|| SolverOptions { tol: *tol, max_iter: *max_iter, ..SolverOptions::default() });
            if wants_exact(&Value::Array(graph_values(&graph))) || state.as_ref().is_some_and(wants_exact) {
                cmd_sep_feasible::<Rational>(*n, &graph, state.as_ref(), opts.as_ref())
            } else {
                cmd_sep_feasible::<f64>(*n, &graph, state.as_ref(), opts.as_ref())
            }
        }
        Command::Certificate { n, graph, state } => {
            check_parties(*n)?;
            let graph = read_json_arg(graph)?;
            let state = state.as_deref().map(read_json_arg).transpose()?;
            if wants_exact(&Value::Array(graph_values(&graph))) || state.as_ref().is_some_and(wants_exact) {
                cmd_certificate::<Rational>(*n, &graph, state.as_ref())
            } else {
                cmd_certificate::<f64>(*n, &graph, state.as_ref())
            }
        }
        Command::ExportSdpa { n, graph, state } => {
            check_parties(*n)?;
            let graph = read_json_arg(graph)?;
            let state = state.as_deref().map(read_json_arg).transpose()?;
            let problem = load_problem::<f64>(*n, &graph, state.as_ref())?;
            cmd_export_sdpa(&problem, &data_path(cli, "sep_feasibility.dat-s"))
        }
        Command::MulticopyVerify { n, trials, seed } => cmd_multicopy_verify(*n, *trials, *seed),
        Command::GapCurve { n_min, n_max, svg } => {
            let svg = svg.as_ref().map(|p| resolve(cli, p));
            cmd_gap_curve(*n_min, *n_max, &data_path(cli, "gap_curve.csv"), svg.as_deref())
        }
    }
}

pub fn cmd_monotones(state: &Value) -> CliResult<Report> {
    let (report, exact) = if wants_exact(state) {
        let s = WClassState::<Rational>::from_json(state)?;
        let exact = json!({
            "eta": wdistill_core::monotones::eta(&s).to_json(),
            "kappa": kappa(&s).to_json(),
        });
        (MonotoneReport::new(&s), Some(exact))
    } else {
        (MonotoneReport::new(&WClassState::<f64>::from_json(state)?), None)
    };
    let mut json = serde_json::to_value(&report).map_err(wdistill_core::Error::from)?;
    if let Some(e) = exact {
        json["exact"] = e;
    }
    Ok(Report { text: report.table(), json })
}

fn protocol_for(protocol: ProtocolArg, eps: f64, party: usize, max_rounds: Option<usize>) -> CliResult<Protocol> {
    let needs_eps = matches!(protocol, ProtocolArg::Fl | ProtocolArg::Complete);
    if needs_eps && !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("--eps must lie in (0, 1), got {eps}")));
    }
    if party == 0 {
        return Err(CliError::Usage("--party is 1-based".into()));
    }
    let max_rounds = max_rounds.unwrap_or_else(|| default_rounds(eps));
    Ok(match protocol {
        ProtocolArg::Ev => Protocol::Ev,
        ProtocolArg::Fl => Protocol::FortescueLo { eps, max_rounds },
        ProtocolArg::Combing => Protocol::Combing { party: party - 1 },
        ProtocolArg::Complete => Protocol::Complete { eps, max_rounds },
    })
}

pub fn cmd_simulate(
    state: &Value,
    protocol: ProtocolArg,
    eps: f64,
    trials: u64,
    seed: u64,
    party: usize,
    max_rounds: Option<usize>,
) -> CliResult<Report> {
    let proto = protocol_for(protocol, eps, party, max_rounds)?;
    let exact_input = wants_exact(state);
    let s = if exact_input {
        WClassState::<Rational>::from_json(state)?.to_f64()
    } else {
        WClassState::<f64>::from_json(state)?
    };
    let (table, exact_json, epr_total) = match (&proto, exact_input) {
        (Protocol::Ev, true) | (Protocol::Combing { .. }, true) => {
            let rs = WClassState::<Rational>::from_json(state)?;
            let d = match proto {
                Protocol::Combing { party } => combing_distribution(&rs, party)?,
                _ => ev_scheme(&rs)?,
            };
            (d.table(), d.to_json(), show(&d.epr_total()))
        }
        _ => {
            let d = proto.enumerate(&s)?;
            (d.table(), d.to_json(), show(&d.epr_total()))
        }
    };
    let mut text = String::new();
    let _ = writeln!(text, "protocol {} on {}", proto.name(), s);
    let _ = writeln!(text, "kappa {}", format_trimmed(kappa(&s), 12));
    let _ = writeln!(text, "\nexact distribution");
    text.push_str(&table);
    let _ = writeln!(text, "EPR total {epr_total}");
    let mut json = json!({
        "protocol": proto.name(),
        "state": s.to_json(),
        "kappa": kappa(&s),
        "exact": exact_json,
        "exact_epr_total": epr_total,
    });
    if trials > 0 {
        let mc = simulate_monte_carlo(&proto, &s, trials, seed)?;
        let (f, se) = mc.epr_total();
        let _ = writeln!(text, "\nmonte carlo ({trials} trials, seed {seed})");
        text.push_str(&mc.table());
        let _ = writeln!(text, "EPR total {} ± {}", format_trimmed(f, 12), format_trimmed(se, 6));
        json["monte_carlo"] = mc.to_json();
    }
    Ok(Report { text, json })
}

fn load_problem<T: Scalar>(n: usize, graph: &Value, state: Option<&Value>) -> CliResult<SdpProblem<T>> {
    let g = DistillationGraph::<T>::from_json(n, graph)?;
    let s = match state {
        Some(v) => WClassState::<T>::from_json(v)?,
        None => WClassState::<T>::uniform(n)?,
    };
    if s.n_parties() != n {
        return Err(CliError::Usage(format!("state has {} parties but --n is {n}", s.n_parties())));
    }
    Ok(build_problem(&g, &s)?)
}

fn verdict_line<T: Scalar>(v: &FeasibilityVerdict<T>) -> String {
    if v.feasible {
        return format!(
            "FEASIBLE (quadratic slack {}, vertex slack {})",
            show(&v.quadratic_load),
            show(&v.max_vertex_load())
        );
    }
    if !v.quadratic_ok() {
        return format!("INFEASIBLE (quadratic slack {})", show(&v.quadratic_load));
    }
    let (k, load) = v
        .vertex_loads
        .iter()
        .enumerate()
        .find(|(_, load)| **load > T::one() + T::tolerance())
        .expect("an infeasible verdict violates a vertex bound");
    format!("INFEASIBLE (vertex slack {} at party {})", show(load), k + 1)
}

pub fn cmd_sep_feasible<T: Scalar>(
    n: usize,
    graph: &Value,
    state: Option<&Value>,
    solver: Option<&SolverOptions>,
) -> CliResult<Report> {
    let problem = load_problem::<T>(n, graph, state)?;
    let verdict = sep_criterion(&problem);
    let mut text = String::new();
    let line = verdict_line(&verdict);
    let _ = writeln!(text, "{line}");
    let _ = writeln!(text, "quadratic load {} (limit 1)", show(&verdict.quadratic_load));
    for (k, load) in verdict.vertex_loads.iter().enumerate() {
        let _ = writeln!(text, "vertex load party {} {}", k + 1, show(load));
    }
    let mut json = json!({
        "n_parties": n,
        "graph": problem.graph.to_json(),
        "feasible": verdict.feasible,
        "verdict": line,
        "quadratic_load": verdict.quadratic_load.to_json(),
        "vertex_loads": verdict.vertex_loads.iter().map(Scalar::to_json).collect::<Vec<_>>(),
    });
    if !verdict.quadratic_ok() {
        let cert = certificate_for(&problem.gset);
        let check = cert.verify(&problem.gset, 1e-10);
        let _ = writeln!(
            text,
            "certificate value {} ({})",
            show(&check.value),
            if check.proves_infeasibility { "verified" } else { "not verified" }
        );
        json["certificate_value"] = check.value.to_json();
        json["certificate_verified"] = check.proves_infeasibility.into();
    }
    if let Some(opts) = solver {
        let fp = build_problem(&problem.graph.to_f64(), &problem.state.to_f64())?;
        match solve_feasibility_with(&fp, opts) {
            Ok(point) => {
                let _ = writeln!(
                    text,
                    "solver: feasible point after {} iterations (cone residual {:.3e}, affine residual {:.3e})",
                    point.iterations, point.cone_residual, point.affine_residual
                );
                json["solver"] = json!({
                    "status": "feasible",
                    "iterations": point.iterations,
                    "cone_residual": point.cone_residual,
                    "affine_residual": point.affine_residual,
                    "variables": point.variables,
                });
            }
            Err(wdistill_core::Error::NoConvergence { iterations, cone_residual, affine_residual }) => {
                let _ = writeln!(text, "solver: no feasible point found after {iterations} iterations");
                json["solver"] = json!({
                    "status": "no_convergence",
                    "iterations": iterations,
                    "cone_residual": cone_residual.is_finite().then_some(cone_residual),
                    "affine_residual": affine_residual.is_finite().then_some(affine_residual),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Report { text, json })
}

pub fn cmd_certificate<T: Scalar>(n: usize, graph: &Value, state: Option<&Value>) -> CliResult<Report> {
    let problem = load_problem::<T>(n, graph, state)?;
    let cert = certificate_for(&problem.gset);
    let check = cert.verify(&problem.gset, 1e-10);
    let mut text = String::new();
    let _ = writeln!(text, "{:>6}{:>4}{:>4}{:>24}", "block", "i", "j", "Z");
    let mut entries = Vec::new();
    for ((b, i, j), v) in cert.z.entries() {
        let _ = writeln!(text, "{:>6}{:>4}{:>4}{:>24}", b + 1, i + 1, j + 1, show(v));
        entries.push(json!([b + 1, i + 1, j + 1, v.to_json()]));
    }
    let _ = writeln!(text, "tr(Z G0) {}", show(&check.value));
    let _ = writeln!(text, "max |tr(Z G)| {:e}", check.max_abs_constraint_trace);
    let _ = writeln!(text, "min eigenvalue {:e}", check.min_eigenvalue);
    let _ = writeln!(text, "proves infeasibility: {}", if check.proves_infeasibility { "yes" } else { "no" });
    let json = json!({
        "block_sizes": problem.gset.block_sizes(),
        "entries": entries,
        "value": check.value.to_json(),
        "orthogonal": check.orthogonal,
        "max_abs_constraint_trace": check.max_abs_constraint_trace,
        "min_eigenvalue": check.min_eigenvalue,
        "proves_infeasibility": check.proves_infeasibility,
    });
    Ok(Report { text, json })
}

pub fn cmd_export_sdpa(problem: &SdpProblem<f64>, path: &Path) -> CliResult<Report> {
    export_sdpa(&problem.gset, path)?;
    let text = format!(
        "wrote {} ({} variables, {} blocks)\n",
        path.display(),
        problem.gset.n_variables(),
        problem.gset.block_sizes().len()
    );
    let json = json!({
        "path": path.display().to_string(),
        "variables": problem.gset.n_variables(),
        "block_sizes": problem.gset.block_sizes(),
    });
    Ok(Report { text, json })
}

pub fn cmd_multicopy_verify(n: usize, trials: usize, seed: u64) -> CliResult<Report> {
    if n == 0 || n > MAX_COPIES {
        return Err(CliError::Usage(format!("--n must lie in 1..={MAX_COPIES}, got {n}")));
    }
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops: Vec<_> = (0..trials).map(|_| random_operator(&mut rng, n)).collect();
    let lemma = check_lemma2(&mut rng, &ops, n, tol)?;

    let mut unitary_like = 0;
    let mut worst_identity = 0.0f64;
    for _ in 0..trials {
        let p: f64 = rng.random_range(0.05..1.0);
        let m = random_unitary(&mut rng, n).map(|z| z * p.sqrt());
        if let NogoVerdict::UnitaryLike { identity_deviation, .. } = entropy_nogo_check(&m, n, 1e-9)? {
            unitary_like += 1;
            worst_identity = worst_identity.max(identity_deviation);
        }
    }
    let mut violations = 0;
    for _ in 0..trials {
        let m = random_operator(&mut rng, n);
        if !entropy_nogo_check(&m, n, 1e-9)?.is_unitary_like() {
            violations += 1;
        }
    }

    let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
    let rows = [
        ("tilde lemma (i) constant fit", lemma.part_i_pattern_consistent, format!("max deviation {:.2e}", lemma.part_i_max_deviation)),
        ("tilde lemma (i) kappa(x,x) = |S|", lemma.part_i_diagonal_is_s, String::new()),
        ("tilde lemma (ii)", lemma.part_ii_injective && lemma.part_ii_holds, String::new()),
        ("tilde lemma (iii)", lemma.part_iii_injective && lemma.part_iii_holds, String::new()),
        (
            "entropy condition, sqrt(p) U",
            unitary_like == trials && worst_identity < tol,
            format!("{unitary_like}/{trials} unitary-like, max |M'M - pI| {worst_identity:.2e}"),
        ),
        ("entropy condition, non-unital M", violations == trials, format!("{violations}/{trials} violations")),
    ];
    let mut text = format!("n = {n}, {trials} operators, seed {seed}\n");
    let mut parts = Vec::new();
    for (name, ok, detail) in &rows {
        let _ = writeln!(text, "{:<34}{}  {}", name, mark(*ok), detail);
        parts.push(json!({ "part": name, "passed": ok, "detail": detail }));
    }
    let passed = rows.iter().all(|r| r.1);
    let json = json!({ "n": n, "trials": trials, "seed": seed, "passed": passed, "parts": parts });
    let report = Report { text, json };
    if passed {
        Ok(report)
    } else {
        Err(CliError::Failed(report.text))
    }
}

pub fn cmd_gap_curve(n_min: usize, n_max: usize, csv: &Path, svg: Option<&Path>) -> CliResult<Report> {
    if n_min < 3 {
        return Err(CliError::Usage(format!("--n-min must be at least 3, got {n_min}")));
    }
    if n_max < n_min {
        return Err(CliError::Usage(format!("--n-max ({n_max}) is below --n-min ({n_min})")));
    }
    let points = gap_curve(n_min, n_max)?;
    std::fs::write(csv, gap_curve_csv(&points))?;
    if let Some(p) = svg {
        std::fs::write(p, gap_curve_svg(&points))?;
    }
    let last = points.last().expect("nonempty range");
    let text = format!(
        "wrote {} ({} rows)\nN = {}: locc {}, sep 1, gap {}\n",
        csv.display(),
        points.len(),
        last.n_parties,
        format_trimmed(last.locc_prob, 12),
        format_trimmed(last.gap, 12)
    );
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            json!({
                "n_parties": p.n_parties,
                "locc_prob": p.locc_prob,
                "sep_prob": p.sep_prob,
                "gap": p.gap,
                "locc_exact": p.locc_exact.as_ref().map(Scalar::to_json),
            })
        })
        .collect();
    Ok(Report { text, json: json!({ "path": csv.display().to_string(), "points": rows }) })
}
