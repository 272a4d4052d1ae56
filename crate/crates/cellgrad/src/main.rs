//! Batch command-line surface over the cell-network analysis library.
//!
//! Emits JSON or CSV to stdout or, with --out-dir, to files written
//! atomically (temp + rename). Outputs carry no timestamps, so reruns
//! with the same inputs and seed are byte-identical.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure,
//! 4 precondition violation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cellgrad::admissible::AdmissibleFunction;
use cellgrad::coupling::{
    check_c1_c4, coupling_from_json, CouplingFunction, CouplingSpec, PhaseCoupling,
    SelfConnection,
};
use cellgrad::flow::{self, FlowConfig, GradientSystem, Terminal};
use cellgrad::graph::CellGraph;
use cellgrad::ring::{
    self, enumerate_equilibria, ground_state_formula, ring_state_distance, Isotropy, RingFunction,
};
use cellgrad::spectra;
use cellgrad::synchrony::{self, Verdict};
use cellgrad::{Error, Result};

#[derive(Parser)]
#[command(name = "cellgrad", version, about = "Gradient systems on coupled cell networks")]
struct Cli {
    /// Seed for all randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write outputs into this directory instead of stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Degrees, regularity, bipartition, (d,m) status and Laplacian
    /// spectrum of a graph file.
    GraphInfo { graph: PathBuf },
    /// Synchronous critical points of a coupling on a regular graph,
    /// with verdicts and a wedge sweep over an (alpha, beta) grid.
    SyncClassify {
        #[arg(long)]
        graph: PathBuf,
        /// Coupling spec JSON file; omit to run only the parameter sweep.
        #[arg(long)]
        coupling: Option<PathBuf>,
        /// Sweep grid lo:hi:steps for (alpha, beta), e.g. -2:2:41.
        #[arg(long, default_value = "-2:2:41", allow_hyphen_values = true)]
        grid: String,
    },
    /// Enumerate ring equilibria with stability classification.
    RingEquilibria {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        coupling: PathBuf,
    },
    /// Closed-form ground state of a ring compared with a seeded
    /// multistart gradient-flow minimum.
    RingGroundState {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        coupling: PathBuf,
        #[arg(long, default_value_t = 200)]
        starts: usize,
    },
    /// Integrate the gradient flow of a function spec from an initial
    /// state, emitting the sampled trajectory.
    Flow {
        #[arg(long)]
        function: PathBuf,
        /// Comma-separated initial state.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1e4)]
        max_time: f64,
    },
    /// Inertia of a weighted Laplacian and the sign-based bounds on it.
    InertiaBounds {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated edge weights in canonical edge order.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Precondition(_) => 4,
            Error::Numerical(_) => 3,
            _ => 2,
        };
        std::process::exit(code);
    }
}

/// Writes atomically when an output directory is set, else to stdout.
fn emit(out_dir: &Option<PathBuf>, name: &str, content: &str) -> Result<()> {
    match out_dir {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let tmp = dir.join(format!(".{name}.tmp"));
            std::fs::write(&tmp, content)?;
            std::fs::rename(&tmp, dir.join(name))?;
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<CellGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    CellGraph::from_json_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_coupling(path: &Path) -> Result<CouplingSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    coupling_from_json(&v)
}

fn read_phase_coupling(path: &Path) -> Result<PhaseCoupling> {
    match read_coupling(path)? {
        CouplingSpec::Phase(p) => Ok(p),
        CouplingSpec::Plain(_) => Err(Error::InvalidInput(
            "this subcommand needs a phase coupling family (cosine, two_harmonic)".into(),
        )),
    }
}

fn plain_coupling(spec: CouplingSpec) -> CouplingFunction {
    match spec {
        CouplingSpec::Phase(p) => p.as_coupling(),
        CouplingSpec::Plain(c) => c,
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad number '{t}': {e}")))
        })
        .collect()
}

fn verdict_str(v: &Verdict) -> String {
    match v {
        Verdict::Minimum => "minimum".into(),
        Verdict::Maximum => "maximum".into(),
        Verdict::Degenerate => "degenerate".into(),
        Verdict::Saddle { index } => format!("saddle({index})"),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GraphInfo { graph } => graph_info(cli, graph),
        Command::SyncClassify { graph, coupling, grid } => {
            sync_classify(cli, graph, coupling.as_deref(), grid)
        }
        Command::RingEquilibria { n, coupling } => ring_equilibria(cli, *n, coupling),
        Command::RingGroundState { n, coupling, starts } => {
            ring_ground_state(cli, *n, coupling, *starts)
        }
        Command::Flow { function, x0, max_time } => flow_cmd(cli, function, x0, *max_time),
        Command::InertiaBounds { graph, weights } => inertia_bounds_cmd(cli, graph, weights),
    }
}

fn graph_info(cli: &Cli, path: &Path) -> Result<()> {
    let g = read_graph(path)?;
    let spectrum = spectra::laplacian_spectrum(&g);
    let report = json!({
        "n": g.n(),
        "edges": g.edges().len(),
        "degrees": g.degrees(),
        "regular": g.is_regular(),
        "complete": g.is_complete(),
        "bipartition": g.bipartition().map(|b| json!({"part1": b.part1, "part2": b.part2})),
        "dm_graph": g.is_dm_graph().map(|(d, m)| json!({"d": d, "m": m})),
        "laplacian_spectrum": spectrum,
    });
    emit(&cli.out_dir, "graph_info.json", &format!("{:#}\n", report))
}

fn parse_grid(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!("grid must be lo:hi:steps, got '{spec}'")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|e| Error::InvalidInput(format!("bad grid bound '{}': {e}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|e| Error::InvalidInput(format!("bad grid bound '{}': {e}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|e| Error::InvalidInput(format!("bad grid steps '{}': {e}", parts[2])))?;
    if !(hi > lo) || steps < 2 {
        return Err(Error::InvalidInput("grid needs hi > lo and steps >= 2".into()));
    }
    Ok((lo, hi, steps))
}

fn sync_classify(cli: &Cli, graph: &Path, coupling: Option<&Path>, grid: &str) -> Result<()> {
    let g = read_graph(graph)?;
    let d = g.is_regular().ok_or_else(|| {
        Error::Precondition(
            "sync-classify needs a regular graph; for K_{m,n} or (d,m)-graph closed forms see the library's kmn and two-colour spectra".into(),
        )
    })?;
    let wedge = synchrony::wedge_region(&g)?;
    let (lo, hi, steps) = parse_grid(grid)?;

    let mut rows: Vec<(String, f64, f64, f64, String, spectra::Inertia, bool)> = Vec::new();

    if let Some(cpath) = coupling {
        let phi = plain_coupling(read_coupling(cpath)?);
        let set = synchrony::find_synchronous_critical(&phi, lo, hi)?;
        if set.continuum {
            rows.push((
                "continuum".into(),
                f64::NAN,
                f64::NAN,
                f64::NAN,
                "every synchronous point is critical".into(),
                spectra::Inertia { n_minus: 0, n_zero: g.n(), n_plus: 0 },
                false,
            ));
        }
        for x0 in &set.roots {
            let c = synchrony::classify_synchronous(&g, &phi, *x0)?;
            rows.push((
                "root".into(),
                *x0,
                c.alpha,
                c.beta,
                verdict_str(&c.verdict),
                c.inertia,
                c.wedge,
            ));
        }
    }

    for i in 0..steps {
        for j in 0..steps {
            let a = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            let b = lo + (hi - lo) * j as f64 / (steps - 1) as f64;
            let mu = spectra::synchronous_hessian_spectrum(&g, a, b)?;
            let inertia = spectra::inertia_of_eigenvalues(&mu, None);
            let verdict = if inertia.n_zero > 0 {
                "degenerate".to_string()
            } else if inertia.n_minus == 0 {
                "minimum".into()
            } else if inertia.n_plus == 0 {
                "maximum".into()
            } else {
                format!("saddle({})", inertia.n_minus)
            };
            rows.push(("sweep".into(), f64::NAN, a, b, verdict, inertia, wedge.contains(a, b)));
        }
    }

    match cli.format {
        Format::Csv => {
            let mut out = String::from("kind,x0,alpha,beta,verdict,n_minus,n_zero,n_plus,wedge\n");
            for (kind, x0, a, b, v, i, w) in &rows {
                writeln!(
                    out,
                    "{kind},{x0},{a},{b},{v},{},{},{},{w}",
                    i.n_minus, i.n_zero, i.n_plus
                )
                .unwrap();
            }
            emit(&cli.out_dir, "sync_classify.csv", &out)
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(kind, x0, a, b, v, i, w)| {
                    json!({
                        "kind": kind,
                        "x0": if x0.is_nan() { serde_json::Value::Null } else { json!(x0) },
                        "alpha": if a.is_nan() { serde_json::Value::Null } else { json!(a) },
                        "beta": if b.is_nan() { serde_json::Value::Null } else { json!(b) },
                        "verdict": v,
                        "inertia": i,
                        "wedge": w,
                    })
                })
                .collect();
            let report = json!({
                "graph": graph.file_name().map(|s| s.to_string_lossy().into_owned()),
                "degree": d,
                "lambda_max": wedge.lambda_max,
                "wedge_empty": wedge.is_empty(),
                "wedge_maximal": wedge.is_maximal(),
                "rows": items,
            });
            emit(&cli.out_dir, "sync_classify.json", &format!("{:#}\n", report))
        }
    }
}

fn isotropy_fields(iso: &Isotropy) -> (String, String, String, String, String) {
    match iso {
        Isotropy::Dihedral => ("dihedral".into(), "0".into(), "".into(), "".into(), "".into()),
        Isotropy::Cyclic { m } => {
            ("cyclic".into(), m.to_string(), "".into(), "".into(), "".into())
        }
        Isotropy::Trivial { xi, eta, p, q } => (
            "trivial".into(),
            "".into(),
            p.to_string(),
            q.to_string(),
            format!("{xi},{eta}"),
        ),
    }
}

fn ring_equilibria(cli: &Cli, n: usize, coupling: &Path) -> Result<()> {
    let delta = read_phase_coupling(coupling)?;
    let rf = RingFunction::new(n, delta)?;
    let eqs = enumerate_equilibria(&rf)?;

    match cli.format {
        Format::Csv => {
            let mut out =
                String::from("isotropy,m,p,q,xi,eta,energy,n_minus,n_zero,n_plus,stable\n");
            for eq in &eqs {
                let v = ring::classify_stability(&rf, eq);
                let (iso, m, p, q, xieta) = isotropy_fields(&eq.isotropy);
                let (xi, eta) = match xieta.split_once(',') {
                    Some((a, b)) => (a.to_string(), b.to_string()),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    out,
                    "{iso},{m},{p},{q},{xi},{eta},{},{},{},{},{}",
                    eq.energy, eq.inertia.n_minus, eq.inertia.n_zero, eq.inertia.n_plus, v.stable
                )
                .unwrap();
            }
            emit(&cli.out_dir, "ring_equilibria.csv", &out)
        }
        Format::Json => {
            let items: Vec<_> = eqs
                .iter()
                .map(|eq| {
                    let v = ring::classify_stability(&rf, eq);
                    json!({
                        "isotropy": eq.isotropy,
                        "theta": eq.theta,
                        "energy": eq.energy,
                        "weights": eq.weights,
                        "inertia": eq.inertia,
                        "continuum_family": eq.continuum_family,
                        "rule": v.rule,
                        "stable": v.stable,
                        "degenerate": v.degenerate,
                    })
                })
                .collect();
            let report = json!({"n": n, "equilibria": items});
            emit(&cli.out_dir, "ring_equilibria.json", &format!("{:#}\n", report))
        }
    }
}

fn ring_ground_state(cli: &Cli, n: usize, coupling: &Path, starts: usize) -> Result<()> {
    let delta = read_phase_coupling(coupling)?;
    let report = check_c1_c4(&delta, 1024)?;
    if !report.all() {
        return Err(Error::Precondition(format!(
            "coupling fails the ring conditions: {report:?}"
        )));
    }
    let rf = RingFunction::new(n, delta)?;
    let formula = ground_state_formula(&rf)?;
    let best = flow::multistart_minimize(
        &rf,
        0.0,
        1.0,
        starts,
        cli.seed,
        &FlowConfig::default(),
        &ring_state_distance,
    )?;
    let agree = (best.best().energy - formula.energy).abs() <= 1e-6;
    let out = json!({
        "n": n,
        "starts": starts,
        "seed": cli.seed,
        "formula_energy": formula.energy,
        "formula_isotropy": formula.isotropy,
        "empirical_energy": best.best().energy,
        "empirical_theta": best.best().representative,
        "converged": best.converged,
        "clusters": best.clusters.len(),
        "agree": agree,
    });
    emit(&cli.out_dir, "ring_ground_state.json", &format!("{:#}\n", out))
}

enum FunctionSpec {
    Ring(RingFunction),
    Admissible(AdmissibleFunction),
}

/// Parses a function spec:
/// {"kind": "ring", "n": N, "coupling": {...}} or
/// {"kind": "admissible", "graph": {...}, "form": "symmetric"|"all_to_all"|
///  "bipartite_general", "coupling": {...},
///  "self_connections": {"<degree>": [coeffs...]},
///  "self_connections_part2": {...}}.
fn read_function(path: &Path) -> Result<FunctionSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let kind = v
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::InvalidInput("function spec missing \"kind\"".into()))?;
    let cspec = v
        .get("coupling")
        .ok_or_else(|| Error::InvalidInput("function spec missing \"coupling\"".into()))?;
    match kind {
        "ring" => {
            let n = v
                .get("n")
                .and_then(|n| n.as_u64())
                .ok_or_else(|| Error::InvalidInput("ring function needs \"n\"".into()))?;
            match coupling_from_json(cspec)? {
                CouplingSpec::Phase(p) => Ok(FunctionSpec::Ring(RingFunction::new(n as usize, p)?)),
                CouplingSpec::Plain(_) => {
                    Err(Error::InvalidInput("ring function needs a phase coupling".into()))
                }
            }
        }
        "admissible" => {
            let graph = CellGraph::from_json_str(
                &v.get("graph")
                    .ok_or_else(|| Error::InvalidInput("admissible spec needs \"graph\"".into()))?
                    .to_string(),
            )?;
            let phi = plain_coupling(coupling_from_json(cspec)?);
            let selfs = |key: &str| -> Result<BTreeMap<usize, SelfConnection>> {
                let mut map = BTreeMap::new();
                if let Some(obj) = v.get(key).and_then(|s| s.as_object()) {
                    for (deg, coeffs) in obj {
                        let d: usize = deg.parse().map_err(|_| {
                            Error::InvalidInput(format!("bad degree key '{deg}'"))
                        })?;
                        let c: Vec<f64> = coeffs
                            .as_array()
                            .ok_or_else(|| {
                                Error::InvalidInput("self-connection coeffs must be an array".into())
                            })?
                            .iter()
                            .map(|x| {
                                x.as_f64().ok_or_else(|| {
                                    Error::InvalidInput("bad self-connection coefficient".into())
                                })
                            })
                            .collect::<Result<_>>()?;
                        map.insert(d, SelfConnection::polynomial(&c));
                    }
                }
                Ok(map)
            };
            let form = v.get("form").and_then(|f| f.as_str()).unwrap_or("symmetric");
            let f = match form {
                "symmetric" => {
                    AdmissibleFunction::symmetric(graph, phi, selfs("self_connections")?)?
                }
                "all_to_all" => {
                    AdmissibleFunction::all_to_all(graph, phi, selfs("self_connections")?)?
                }
                "bipartite_general" => AdmissibleFunction::bipartite_general(
                    graph,
                    phi,
                    selfs("self_connections")?,
                    selfs("self_connections_part2")?,
                )?,
                other => {
                    return Err(Error::InvalidInput(format!("unknown form '{other}'")));
                }
            };
            Ok(FunctionSpec::Admissible(f))
        }
        other => Err(Error::InvalidInput(format!("unknown function kind '{other}'"))),
    }
}

fn flow_cmd(cli: &Cli, function: &Path, x0: &str, max_time: f64) -> Result<()> {
    let spec = read_function(function)?;
    let sys: &dyn GradientSystem = match &spec {
        FunctionSpec::Ring(rf) => rf,
        FunctionSpec::Admissible(f) => f,
    };
    let x0 = parse_floats(x0)?;
    let cfg = FlowConfig { max_time, ..FlowConfig::default() };
    let traj = flow::integrate(sys, &x0, &cfg)?;
    if traj.terminal == Terminal::Diverged {
        return Err(Error::Numerical("gradient flow diverged".into()));
    }
    if traj.terminal == Terminal::MaxTime {
        return Err(Error::Numerical("gradient flow did not converge before max_time".into()));
    }

    let mut out = String::from("t,");
    for i in 1..=sys.dim() {
        write!(out, "x{i},").unwrap();
    }
    out.push_str("energy,grad_norm\n");
    for s in &traj.samples {
        write!(out, "{},", s.t).unwrap();
        for v in &s.x {
            write!(out, "{v},").unwrap();
        }
        writeln!(out, "{},{}", s.energy, s.grad_norm).unwrap();
    }
    emit(&cli.out_dir, "trajectory.csv", &out)?;
    let summary = json!({
        "terminal": traj.terminal,
        "final_state": traj.x,
        "final_energy": sys.energy(&traj.x)?,
    });
    emit(&cli.out_dir, "flow_summary.json", &format!("{:#}\n", summary))
}

fn inertia_bounds_cmd(cli: &Cli, graph: &Path, weights: &str) -> Result<()> {
    let g = read_graph(graph)?;
    let w = parse_floats(weights)?;
    let l = spectra::weighted_laplacian(&g, &w)?;
    let inertia = l.inertia(None);
    let bounds = spectra::inertia_bounds(&g, &l.weight_signs(0.0))?;
    let out = json!({
        "weights": w,
        "eigenvalues": l.eigenvalues(),
        "inertia": inertia,
        "bounds": bounds,
        "inside": bounds.contains(&inertia),
    });
    emit(&cli.out_dir, "inertia_bounds.json", &format!("{:#}\n", out))
}
