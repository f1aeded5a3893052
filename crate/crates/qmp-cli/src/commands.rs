//! Subcommand implementations producing JSON or CSV.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::{json, Value};

use qmp_core::counting::{contingency_count, VectorPartitionProblem};
use qmp_core::dh::{self, PiecewiseDensity};
use qmp_core::exact::{fmt_q, q_to_f64, qi, Q};
use qmp_core::flow::{flow_to_minimum, polytope_refine, FlowOptions, PureState, RefineOptions, ShiftedOptions};
use qmp_core::lattice::{sym_weights, tensor_weights, YoungDiagram};
use qmp_core::moment_polytope::{marginal_polytope, FacetSource, PolytopeOptions};
use qmp_core::multiplicities::{kronecker, littlewood_richardson, stretch};
use qmp_core::polytope::{HalfSpace, Polytope};
use qmp_core::stabilizer::{
    classical_model_entropies, entropy_vector, parse_generators, stabilizer_sweep, subset_parties, InequalityFamily, PhaseSpace, Submodule,
};

use crate::manifest::RunManifest;
use crate::{Cli, CliError, Command, CountCommand, FlowCommand, Format, Result, StabCommand, EXIT_NONCONVERGENCE, EXIT_OK};

/// Result of a subcommand before serialization.
struct Output {
    json: Value,
    /// Rows for `--format csv`, header first.
    csv: Vec<Vec<String>>,
    code: i32,
}

impl Output {
    fn new(json: Value, csv: Vec<Vec<String>>) -> Self {
        Output { json, csv, code: EXIT_OK }
    }
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Kron(_) => "kron",
        Command::Lr(_) => "lr",
        Command::Stretch(_) => "stretch",
        Command::Count(CountCommand::Tables { .. }) => "count tables",
        Command::Count(CountCommand::Vpp { .. }) => "count vpp",
        Command::Polytope(_) => "polytope",
        Command::Dh(_) => "dh",
        Command::Stab(StabCommand::Sweep { .. }) => "stab sweep",
        Command::Stab(StabCommand::Entropy { .. }) => "stab entropy",
        Command::Flow(f) if f.refine.is_some() => "flow refine",
        Command::Flow(_) => "flow",
    }
}

pub fn execute(cli: &Cli, argv: &[String]) -> Result<i32> {
    let started = Instant::now();
    let mut manifest = RunManifest::new(subcommand_name(&cli.command), argv, cli.global.seed);
    let out = match &cli.command {
        Command::Kron(t) => {
            let (a, b, c) = (diagram(&t.alpha)?, diagram(&t.beta)?, diagram(&t.gamma)?);
            let v = kronecker(&a, &b, &c).to_string();
            Output::new(json!({"value": v, "k": a.boxes()}), vec![vec!["k".into(), "value".into()], vec![a.boxes().to_string(), v]])
        }
        Command::Lr(t) => {
            let (a, b, l) = (diagram(&t.alpha)?, diagram(&t.beta)?, diagram(&t.lambda)?);
            let v = littlewood_richardson(&a, &b, &l).to_string();
            Output::new(json!({"value": v, "k": l.boxes()}), vec![vec!["k".into(), "value".into()], vec![l.boxes().to_string(), v]])
        }
        Command::Stretch(s) => {
            let t = &s.triple;
            let (a, b, c) = (diagram(&t.alpha)?, diagram(&t.beta)?, diagram(&t.gamma)?);
            let values = stretch(&a, &b, &c, s.kmax);
            let mut csv = vec![vec!["k".into(), "value".into()]];
            let items: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    csv.push(vec![(i + 1).to_string(), v.to_string()]);
                    json!({"k": i + 1, "value": v.to_string()})
                })
                .collect();
            Output::new(json!({"values": items, "kmax": s.kmax}), csv)
        }
        Command::Count(CountCommand::Tables { k, a, b, c }) => {
            let v = contingency_count(*k, &int_list(a)?, &int_list(b)?, &int_list(c)?).to_string();
            Output::new(json!({"value": v, "k": k}), vec![vec!["value".into()], vec![v]])
        }
        Command::Count(CountCommand::Vpp { columns, target }) => {
            let cols: Vec<Vec<i64>> = serde_json::from_str(columns).map_err(|e| CliError::Input(format!("--columns: {e}")))?;
            let p = VectorPartitionProblem::new(cols, int_list(target)?)?;
            let v = p.count().to_string();
            Output::new(json!({"value": v}), vec![vec!["value".into()], vec![v]])
        }
        Command::Polytope(p) => polytope_cmd(&dims(&p.dims)?, p.trials, cli.global.seed)?,
        Command::Dh(args) => dh_cmd(args, &mut manifest)?,
        Command::Stab(StabCommand::Sweep { n, d, ineq, emit }) => sweep_cmd(*n, *d, ineq, emit.as_deref(), &mut manifest)?,
        Command::Stab(StabCommand::Entropy { n, d, gens }) => entropy_cmd(*n, *d, gens)?,
        Command::Flow(f) => match &f.refine {
            Some(FlowCommand::Refine { state, dims, max_rounds }) => refine_cmd(state, dims.as_deref(), *max_rounds, cli.global.seed)?,
            None => flow_cmd(&f.run, &mut manifest)?,
        },
    };
    manifest.finish(started, cli.global.timing);
    let text = match cli.global.format {
        Format::Json => {
            let mut doc = out.json;
            doc["manifest"] = manifest.to_json();
            let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv_text(&out.csv),
    };
    match &cli.global.out {
        Some(path) => {
            write_file(path, &text)?;
            if cli.global.format == Format::Csv {
                write_sidecar(path, &manifest)?;
            }
        }
        None => print!("{text}"),
    }
    Ok(out.code)
}

fn csv_text(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes `<path>.manifest.json` next to a CSV artifact.
fn write_sidecar(path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut p = path.as_os_str().to_owned();
    p.push(".manifest.json");
    let text = serde_json::to_string_pretty(&manifest.to_json()).expect("manifest serializes") + "\n";
    write_file(Path::new(&p), &text)
}

fn diagram(s: &str) -> Result<YoungDiagram> {
    Ok(YoungDiagram::from_str(s)?)
}

fn int_list(s: &str) -> Result<Vec<i64>> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if t.trim().is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Input(format!("bad integer list '{s}'")))).collect()
}

fn dims(s: &str) -> Result<Vec<usize>> {
    let v = int_list(s)?;
    if v.is_empty() || v.iter().any(|&d| d < 1) {
        return Err(CliError::Input(format!("bad dimensions '{s}'")));
    }
    Ok(v.into_iter().map(|d| d as usize).collect())
}

fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn halfspace_json(h: &HalfSpace) -> Value {
    json!({"normal": qs(&h.normal), "offset": fmt_q(&h.offset)})
}

/// Lifts an inequality from reduced to full spectrum coordinates by padding each block.
fn pad_reduced(h: &[Q], dims: &[usize]) -> Vec<Q> {
    let mut out = Vec::new();
    let mut pos = 0;
    for &d in dims {
        out.extend_from_slice(&h[pos..pos + d - 1]);
        out.push(qi(0));
        pos += d - 1;
    }
    out
}

/// Facets and vertices in the output convention: max eigenvalues for qubits, full spectra otherwise.
fn polytope_json(dims: &[usize], facets: Vec<Value>, poly: &Polytope, full_vertices: Vec<Vec<Q>>) -> Value {
    let qubits = dims.iter().all(|&d| d == 2);
    let mut vertices: Vec<Vec<Q>> = if qubits { poly.vertices.clone() } else { full_vertices };
    vertices.sort();
    json!({
        "dims": dims,
        "coordinates": if qubits { "max-eigenvalue" } else { "full-spectrum" },
        "facets": facets,
        "vertices": vertices.iter().map(|v| qs(v)).collect::<Vec<_>>(),
    })
}

fn polytope_csv(v: &Value) -> Vec<Vec<String>> {
    let verts = v["vertices"].as_array().expect("vertices");
    let width = verts.first().and_then(|x| x.as_array()).map_or(0, |x| x.len());
    let mut rows = vec![(1..=width).map(|i| format!("x{i}")).collect()];
    for x in verts {
        rows.push(x.as_array().expect("vertex").iter().map(|c| c.as_str().unwrap_or_default().to_string()).collect());
    }
    rows
}

fn polytope_cmd(dims: &[usize], trials: usize, seed: u64) -> Result<Output> {
    let mp = marginal_polytope(dims, &PolytopeOptions { trials, seed, samples: 0 })?;
    let qubits = dims.iter().all(|&d| d == 2);
    let ws = tensor_weights(dims)?;
    let facets: Vec<Value> = mp
        .facets
        .iter()
        .map(|f| {
            let h = f.halfspace.normalized();
            let normal = if qubits { h.normal.clone() } else { pad_reduced(&h.normal, dims) };
            let (source, witness) = match &f.source {
                FacetSource::Ressayre { witness, .. } => {
                    let assignment: Vec<Value> = witness
                        .assignment
                        .iter()
                        .map(|(&i, &a)| json!({"weight": i, "basis": ws.tensor_index(&ws.weights[i]), "amplitude": a}))
                        .collect();
                    ("ressayre", json!({"assignment": assignment, "determinant": fmt_q(&witness.determinant)}))
                }
                FacetSource::Bound => ("bound", Value::Null),
            };
            json!({"H": qs(&normal), "c": fmt_q(&h.offset), "source": source, "witness": witness})
        })
        .collect();
    let mut v = polytope_json(dims, facets, &mp.polytope, mp.full_vertices());
    v["candidates"] = json!(mp.candidates);
    v["valid_candidates"] = json!(mp.valid);
    let csv = polytope_csv(&v);
    Ok(Output::new(v, csv))
}

fn density_for(args: &crate::DhArgs) -> Result<(PiecewiseDensity, Vec<Value>, String)> {
    let (ws, label) = match (&args.dims, args.sym) {
        (Some(d), None) => (tensor_weights(&dims(d)?)?, format!("tensor {d}")),
        (None, Some(n)) => (sym_weights(2, n)?, format!("Sym^{n}(C^2)")),
        _ => return Err(CliError::Usage("dh needs exactly one of --dims or --sym".into())),
    };
    if args.abelian {
        return Ok((dh::chamber_polynomials(&ws)?, Vec::new(), label));
    }
    // Both marginals of a bipartite pure state share their spectrum; use the first one.
    let na = match ws.group.dims().as_slice() {
        &[a, b] if args.sym.is_none() => dh::bipartite_density(a, b)?,
        _ => dh::non_abelian_density(&ws)?,
    };
    let singular = na
        .singular
        .iter()
        .map(|s| json!({"wall": halfspace_json(&s.wall), "transverse_roots": s.transverse, "order": s.order}))
        .collect();
    Ok((na.density, singular, label))
}

fn dh_cmd(args: &crate::DhArgs, manifest: &mut RunManifest) -> Result<Output> {
    let (density, singular, label) = density_for(args)?;
    let dec = &density.decomposition;
    manifest.record("dh_measure", "chambers", dec.chambers.len() as u64);
    let chambers: Vec<Value> = dec
        .chambers
        .iter()
        .zip(&density.pieces)
        .map(|(c, p)| {
            let terms: Vec<Value> =
                dh::poly_terms(&p.poly).iter().map(|(e, q)| json!({"exponents": e, "coefficient": fmt_q(q)})).collect();
            let mut verts = c.vertices.clone();
            verts.sort();
            json!({
                "halfspaces": c.halfspaces.iter().map(halfspace_json).collect::<Vec<_>>(),
                "equalities": c.equalities.iter().map(halfspace_json).collect::<Vec<_>>(),
                "vertices": verts.iter().map(|v| qs(v)).collect::<Vec<_>>(),
                "polynomial": terms,
            })
        })
        .collect();
    let emitted = json!({
        "representation": label,
        "density": if args.abelian { "abelian" } else { "eigenvalue" },
        "coordinates": {"kind": format!("{:?}", dec.coords.kind).to_lowercase(), "dim": dec.coords.dim()},
        "chambers": chambers,
        "singular_walls": singular,
        "total_mass": fmt_q(&density.total_mass()),
    });
    if let Some(path) = &args.emit {
        let mut doc = emitted.clone();
        doc["manifest"] = manifest.to_json();
        write_file(path, &(serde_json::to_string_pretty(&doc).expect("serializes") + "\n"))?;
    }
    let mut samples = 0;
    if let Some(path) = &args.sample {
        let text = sample_grid(&density, args.grid)?;
        samples = text.lines().count() - 1;
        write_file(path, &text)?;
        write_sidecar(path, manifest)?;
    }
    let summary = json!({
        "representation": emitted["representation"],
        "density": emitted["density"],
        "coordinates": emitted["coordinates"],
        "chambers": dec.chambers.len(),
        "nonzero_chambers": density.pieces.iter().filter(|p| !p.poly.is_zero()).count(),
        "singular_walls": emitted["singular_walls"],
        "total_mass": emitted["total_mass"],
        "samples": samples,
    });
    let csv = vec![
        vec!["chambers".into(), "total_mass".into()],
        vec![dec.chambers.len().to_string(), fmt_q(&density.total_mass())],
    ];
    Ok(Output::new(summary, csv))
}

/// Density on a regular grid over the bounding box of the region.
fn sample_grid(density: &PiecewiseDensity, grid: u32) -> Result<String> {
    if grid == 0 {
        return Err(CliError::Input("--grid must be positive".into()));
    }
    let region = &density.decomposition.region;
    let r = region.ambient;
    let lo: Vec<Q> = (0..r).map(|i| region.vertices.iter().map(|v| v[i].clone()).min().expect("vertices")).collect();
    let hi: Vec<Q> = (0..r).map(|i| region.vertices.iter().map(|v| v[i].clone()).max().expect("vertices")).collect();
    let mut out = String::new();
    let header: Vec<String> = (1..=r).map(|i| format!("y{i}")).chain(["value_num".into(), "value_den".into()]).collect();
    writeln!(out, "{}", header.join(",")).expect("string write");
    let total = (grid as u64 + 1).pow(r as u32);
    for mut idx in 0..total {
        let y: Vec<Q> = (0..r)
            .map(|i| {
                let step = (idx % (grid as u64 + 1)) as i64;
                idx /= grid as u64 + 1;
                &lo[i] + (&hi[i] - &lo[i]) * Q::new(step.into(), (grid as i64).into())
            })
            .collect();
        let v = density.eval(&y);
        let cells: Vec<String> = y.iter().map(fmt_q).chain([v.numer().to_string(), v.denom().to_string()]).collect();
        writeln!(out, "{}", cells.join(",")).expect("string write");
    }
    Ok(out)
}

fn families(spec: &str) -> Result<Vec<InequalityFamily>> {
    Ok(spec.split(',').filter(|s| !s.trim().is_empty()).map(InequalityFamily::parse).collect::<qmp_core::Result<Vec<_>>>()?)
}

fn subset_label(s: u32) -> String {
    format!("S_{}", subset_parties(s).iter().map(|p| p.to_string()).collect::<String>())
}

fn sweep_cmd(n: usize, d: i64, ineq: &str, emit: Option<&Path>, manifest: &mut RunManifest) -> Result<Output> {
    let fams = families(ineq)?;
    let report = stabilizer_sweep(n, d, &fams)?;
    manifest.record("stabilizer", "submodules", report.submodules as u64);
    manifest.record("stabilizer", "distinct_vectors", report.vectors.len() as u64);
    let mut csv = vec![vec!["family".into(), "instances".into(), "min_slack".into(), "violations".into(), "balanced".into()]];
    let fam_json: Vec<Value> = report
        .families
        .iter()
        .map(|f| {
            let min = f.min_slack.as_ref().map(|s| s.display_log_d(d));
            csv.push(vec![
                f.family.name().into(),
                f.instances.to_string(),
                min.clone().unwrap_or_default(),
                f.violations.to_string(),
                f.balanced.to_string(),
            ]);
            json!({
                "family": f.family.name(),
                "instances": f.instances,
                "balanced": f.balanced,
                "min_slack": min,
                "violations": f.violations,
                "argmin": f.argmin.as_ref().map(|(q, i)| json!({"inequality": q, "vector": i})),
            })
        })
        .collect();
    if let Some(path) = emit {
        let all = (1u32 << n) - 1;
        let mut text = String::new();
        let header: Vec<String> = std::iter::once("index".to_string()).chain((1..=all).map(subset_label)).collect();
        writeln!(text, "{}", header.join(",")).expect("string write");
        for (i, v) in report.vectors.iter().enumerate() {
            let cells: Vec<String> = std::iter::once(i.to_string()).chain((1..=all).map(|s| v.get(s).display_log_d(d))).collect();
            writeln!(text, "{}", cells.join(",")).expect("string write");
        }
        write_file(path, &text)?;
        write_sidecar(path, manifest)?;
    }
    Ok(Output::new(
        json!({
            "n": n,
            "d": d,
            "units": "log_d",
            "submodules": report.submodules,
            "distinct_vectors": report.vectors.len(),
            "families": fam_json,
        }),
        csv,
    ))
}

fn entropy_cmd(n: usize, d: i64, gens: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(gens).map_err(|source| CliError::Io { path: gens.display().to_string(), source })?;
    let m = Submodule::span(PhaseSpace::new(n, d)?, &parse_generators(&text)?)?;
    let s = entropy_vector(&m)?;
    let h = classical_model_entropies(&m)?;
    let all = (1u32 << n) - 1;
    let mut csv = vec![vec!["subset".into(), "S".into(), "H".into()]];
    let mut sv = serde_json::Map::new();
    let mut hv = serde_json::Map::new();
    for i in 1..=all {
        let label = subset_label(i);
        csv.push(vec![label.clone(), s.get(i).display_log_d(d), h.get(i).display_log_d(d)]);
        sv.insert(label.clone(), json!(s.get(i).display_log_d(d)));
        hv.insert(label, json!(h.get(i).display_log_d(d)));
    }
    Ok(Output::new(
        json!({
            "n": n,
            "d": d,
            "units": "log_d",
            "cardinality": m.cardinality().to_string(),
            "lagrangian": m.is_lagrangian(),
            "generators": m.generators(),
            "entropies": sv,
            "classical_entropies": hv,
        }),
        csv,
    ))
}

fn load_state(path: &Path, dims_arg: Option<&str>) -> Result<PureState> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let dims = match dims_arg {
        Some(d) => dims(d)?,
        None => {
            let n = pairs.len().trailing_zeros() as usize;
            if pairs.len() < 2 || 1 << n != pairs.len() {
                return Err(CliError::Input(format!("{} amplitudes is not a qubit system; pass --dims", pairs.len())));
            }
            vec![2; n]
        }
    };
    Ok(PureState::new(dims, pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())?)
}

fn flow_cmd(args: &crate::FlowRunArgs, manifest: &mut RunManifest) -> Result<Output> {
    let path = args.state.as_deref().ok_or_else(|| CliError::Usage("flow needs --state".into()))?;
    let psi = load_state(path, args.dims.as_deref())?;
    let res = flow_to_minimum(&psi, &FlowOptions { dt: args.dt, max_steps: args.max_steps, ..FlowOptions::default() });
    let last = res.trace.points.last().expect("trace has the start point");
    manifest.record("flow", "steps", last.step as u64);
    let header: Vec<String> =
        std::iter::once("step".to_string()).chain((1..=last.lambda.len()).map(|i| format!("lambda_{i}"))).chain(["norm2".into(), "entropy".into()]).collect();
    let mut rows = vec![header];
    for p in &res.trace.points {
        rows.push(
            std::iter::once(p.step.to_string())
                .chain(p.lambda.iter().map(|x| format!("{x:.12e}")))
                .chain([format!("{:.12e}", p.norm2), format!("{:.12e}", p.entropy)])
                .collect(),
        );
    }
    if let Some(emit) = &args.emit {
        write_file(emit, &csv_text(&rows))?;
        write_sidecar(emit, manifest)?;
    }
    let json = json!({
        "converged": res.converged,
        "monotone": res.trace.is_monotone(),
        "steps": last.step,
        "initial_lambda": res.trace.points[0].lambda,
        "lambda": last.lambda,
        "norm2": last.norm2,
        "linear_entropy": last.entropy,
        "state": res.state.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
    });
    let mut out = Output::new(json, rows);
    if !res.converged {
        eprintln!("error: flow did not converge within {} steps (last ‖μ‖² = {:e})", last.step, last.norm2);
        out.code = EXIT_NONCONVERGENCE;
    }
    Ok(out)
}

fn refine_cmd(state: &Path, dims_arg: Option<&str>, max_rounds: usize, seed: u64) -> Result<Output> {
    let psi = load_state(state, dims_arg)?;
    let opts = RefineOptions { max_rounds, shifted: ShiftedOptions { seed, ..ShiftedOptions::default() }, ..RefineOptions::default() };
    let res = polytope_refine(&psi, &opts)?;
    let facets: Vec<Value> = res
        .polytope
        .halfspaces
        .iter()
        .map(|h| {
            let h = h.normalized();
            json!({"H": qs(&h.normal), "c": fmt_q(&h.offset), "source": "refine", "witness": Value::Null})
        })
        .collect();
    let mut v = polytope_json(psi.dims(), facets, &res.polytope, Vec::new());
    v["complete"] = json!(res.complete);
    v["rounds"] = json!(res.rounds);
    v["volume_f64"] = json!(q_to_f64(&res.polytope.volume()));
    let csv = polytope_csv(&v);
    Ok(Output::new(v, csv))
}
