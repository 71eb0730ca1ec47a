//! `paulipath` command-line tool.
//!
//! Physics parameters always come from a TOML config file; parameter vectors
//! come from JSON files. Results go to stdout as JSON unless `--out` is given.
//! Set `PAULIPATH_THREADS` to size the worker pool.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use paulipath::config::Config;
use paulipath::measure::{
    bond_expectations, default_tee_regions, site_expectations, string_expectations, tomography,
    topological_entropy_from,
};
use paulipath::models::{plaquettes, Model};
use paulipath::oracle::{
    exact_ground_energy_small, exact_kitaev_energy, exact_tfim_energy, kitaev_flux_free_minimum,
    kitaev_sector_energies, statevector_expectation,
};
use paulipath::qasm::{parse_qasm, to_qasm, to_qasm_measured};
use paulipath::run::{exact_reference, load_params, sweep_in_dir, train_in_dir, Problem};
use paulipath::topo::{ancilla_phase, braid_spec, braiding_phase, controlled_braid_circuit, BraidKind};
use paulipath::{Circuit, Clifford, Pauli};

#[derive(Parser)]
#[command(name = "paulipath", version, about = "Pauli path simulation and variational training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one configuration into a run directory.
    Train {
        config: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Train every point of the config's `[sweep]` grid with warm starts.
    Sweep {
        config: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Energy of a parameter file, or of a QASM circuit with `--qasm`.
    Evaluate(EvaluateArgs),
    /// Magnetizations, bond correlators and plaquette values.
    Observables(StateArgs),
    /// Reduced density matrix of a region, with optional entanglement entropy.
    Tomography(TomographyArgs),
    /// Braiding phases of the anyon exchanges.
    Braid(BraidArgs),
    /// Exact reference energies.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// OpenQASM 2.0 for the trained state or a braiding interferometer.
    ExportQasm(ExportArgs),
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, short)]
    config: PathBuf,
    /// JSON θ, bare array or `{"theta": [...]}`; defaults to `ansatz.init`.
    #[arg(long, short)]
    params: Option<PathBuf>,
    /// Truncation threshold; defaults to `report.delta_c`.
    #[arg(long)]
    delta_c: Option<f64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Evaluate this QASM circuit instead of the ansatz.
    #[arg(long, conflicts_with = "params")]
    qasm: Option<PathBuf>,
    /// Write the per-gate term count trace as CSV.
    #[arg(long)]
    gate_trace: Option<PathBuf>,
}

#[derive(Args)]
struct TomographyArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Comma-separated qubit list.
    #[arg(long, value_delimiter = ',')]
    region: Vec<usize>,
    /// Topological entropy over regions A, B, C instead of one region.
    #[arg(long)]
    tee: bool,
    #[arg(long, value_delimiter = ',', requires = "tee")]
    a: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', requires = "tee")]
    b: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', requires = "tee")]
    c: Option<Vec<usize>>,
    /// Also write the Pauli coefficients in text form.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum KindArg {
    Em,
    Epsi,
    Mpsi,
    All,
}

impl KindArg {
    fn kinds(self) -> Vec<BraidKind> {
        match self {
            KindArg::Em => vec![BraidKind::Em],
            KindArg::Epsi => vec![BraidKind::Epsi],
            KindArg::Mpsi => vec![BraidKind::Mpsi],
            KindArg::All => BraidKind::ALL.to_vec(),
        }
    }
}

#[derive(Args)]
struct BraidArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_enum, default_value = "all")]
    kind: KindArg,
    /// Also read the phase off a simulated ancilla (small lattices only).
    #[arg(long)]
    ancilla: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum Basis {
    X,
    Y,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long, short)]
    params: Option<PathBuf>,
    /// Emit the controlled braid circuit for this exchange.
    #[arg(long, value_enum)]
    braid: Option<KindArg>,
    /// Ancilla measurement basis for `--braid`.
    #[arg(long, value_enum, default_value = "x", requires = "braid")]
    basis: Basis,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Periodic transverse-field chain at g_z = 0.
    Tfim { n: usize, gx: f64 },
    /// Kitaev honeycomb torus, flux-free sector.
    Kitaev {
        nx: usize,
        ny: usize,
        jx: f64,
        jy: f64,
        jz: f64,
        /// Print all four fermion boundary sectors.
        #[arg(long)]
        sectors: bool,
    },
    /// Exact ground energy of a config's model by whatever solver applies.
    Config { config: PathBuf },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = configure_threads().and_then(|()| dispatch(Cli::parse())) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PAULIPATH_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("PAULIPATH_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, out } => {
            let (cfg, text) = load_config(&config)?;
            let warm = cfg.ansatz.init.as_deref().map(load_params).transpose()?;
            let r = train_in_dir(&cfg, &text, &out, warm)?;
            emit(&serde_json::to_value(&r)?, None)
        }
        Command::Sweep { config, out } => {
            let (cfg, text) = load_config(&config)?;
            let rows = sweep_in_dir(&cfg, &text, &out)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            log::info!("sweep finished: {} points, {failed} failed", rows.len());
            println!("{}", out.join("sweep.csv").display());
            Ok(())
        }
        Command::Evaluate(a) => evaluate(a),
        Command::Observables(a) => observables(a),
        Command::Tomography(a) => tomography_cmd(a),
        Command::Braid(a) => braid(a),
        Command::Oracle { which } => oracle(which),
        Command::ExportQasm(a) => export_qasm(a),
    }
}

fn load_config(path: &Path) -> Result<(Config, String)> {
    Config::load(path).with_context(|| format!("loading {}", path.display()))
}

struct Loaded {
    cfg: Config,
    problem: Problem,
    theta: Vec<f64>,
    delta_c: f64,
}

fn load_state(a: &StateArgs) -> Result<Loaded> {
    let (cfg, _) = load_config(&a.config)?;
    let problem = Problem::from_config(&cfg)?;
    let path = a
        .params
        .clone()
        .or_else(|| cfg.ansatz.init.clone())
        .context("no parameter file: pass --params or set ansatz.init")?;
    let theta = load_params(&path)?;
    let want = problem.circuit.param_count();
    if theta.len() != want {
        bail!(
            "{} holds {} parameters but the ansatz with reps = {} needs {want}",
            path.display(),
            theta.len(),
            cfg.ansatz.reps
        );
    }
    let delta_c = a.delta_c.unwrap_or(cfg.report.delta_c);
    Ok(Loaded {
        cfg,
        problem,
        theta,
        delta_c,
    })
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let (circuit, theta, cfg, problem, delta_c) = match &a.qasm {
        Some(q) => {
            let (cfg, _) = load_config(&a.state.config)?;
            let problem = Problem::from_config(&cfg)?;
            let text = fs::read_to_string(q).with_context(|| format!("reading {}", q.display()))?;
            let c = parse_qasm(&text).with_context(|| format!("parsing {}", q.display()))?;
            let d = a.state.delta_c.unwrap_or(cfg.report.delta_c);
            (c, Vec::new(), cfg, problem, d)
        }
        None => {
            let l = load_state(&a.state)?;
            (l.problem.circuit.clone(), l.theta, l.cfg, l.problem, l.delta_c)
        }
    };
    if circuit.n() != problem.cost.n() {
        bail!("circuit has {} qubits, model has {}", circuit.n(), problem.cost.n());
    }
    let h = cfg.model.hamiltonian()?.operator;
    let engine = if a.gate_trace.is_some() {
        problem.engine.recording()
    } else {
        problem.engine
    };
    let (evolved, stats) = engine.evolve(&h, &circuit, &theta, delta_c)?;
    let energy = match circuit.initial_state() {
        paulipath::InitialState::AllZero => evolved.expectation_zero(),
        paulipath::InitialState::AllPlus => evolved.expectation_plus(),
    };
    if let Some(p) = &a.gate_trace {
        stats
            .write_csv(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let mut v = json!({
        "model": cfg.model,
        "delta_c": delta_c,
        "energy": energy,
        "max_terms": stats.max_terms,
    });
    if a.qasm.is_some() && circuit.n() <= STATEVECTOR_LIMIT {
        v["oracle_energy"] = json!(statevector_expectation(&circuit, &theta, &h)?);
    }
    if cfg.report.exact {
        if let Some(e0) = exact_reference(&cfg.model)? {
            v["exact_energy"] = json!(e0);
            v["relative_error"] = json!((energy - e0) / e0.abs());
        }
    }
    emit(&v, a.state.out.as_deref())
}

const STATEVECTOR_LIMIT: usize = 24;

fn observables(a: StateArgs) -> Result<()> {
    let l = load_state(&a)?;
    let (e, c, th, d) = (&l.problem.engine, &l.problem.circuit, &l.theta[..], l.delta_c);
    let mut sites = serde_json::Map::new();
    for (name, p) in [("x", Pauli::X), ("y", Pauli::Y), ("z", Pauli::Z)] {
        let s = site_expectations(e, c, th, p, d)?;
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        sites.insert(name.into(), json!({ "mean": mean, "sites": s }));
    }
    let lat = l.cfg.model.lattice()?;
    let bonds = lat.bonds();
    let vals = bond_expectations(e, c, th, bonds, d)?;
    let bonds: Vec<Value> = bonds
        .iter()
        .zip(&vals)
        .map(|(b, v)| json!({ "a": b.a, "b": b.b, "kind": b.kind, "value": v }))
        .collect();
    let mut v = json!({
        "model": l.cfg.model,
        "delta_c": d,
        "energy": e.expectation(c, &l.cfg.model.hamiltonian()?.operator, th, d)?,
        "magnetization": sites,
        "bonds": bonds,
    });
    if let Model::Kitaev { nx, ny, .. } = l.cfg.model {
        v["plaquettes"] = json!(string_expectations(e, c, th, &plaquettes(nx, ny)?, d)?);
    }
    emit(&v, a.out.as_deref())
}

fn tomography_cmd(a: TomographyArgs) -> Result<()> {
    let l = load_state(&a.state)?;
    let (e, c, th, d) = (&l.problem.engine, &l.problem.circuit, &l.theta[..], l.delta_c);
    if a.tee {
        let nx = l.cfg.model.lattice()?.nx();
        let [da, db, dc] = default_tee_regions(nx);
        let (ra, rb, rc) = (a.a.unwrap_or(da), a.b.unwrap_or(db), a.c.unwrap_or(dc));
        let abc: Vec<usize> = ra.iter().chain(&rb).chain(&rc).copied().collect();
        let rho = tomography(e, c, th, &abc, d)?;
        let t = topological_entropy_from(&rho, &ra, &rb, &rc)?;
        if let Some(p) = &a.dump {
            fs::write(p, rho.dump())?;
        }
        let v = json!({
            "delta_c": d,
            "regions": { "a": ra, "b": rb, "c": rc },
            "s_topo": t.s_topo,
            "entropies": {
                "a": t.entropies[0], "b": t.entropies[1], "c": t.entropies[2],
                "ab": t.entropies[3], "ac": t.entropies[4], "bc": t.entropies[5],
                "abc": t.entropies[6],
            },
        });
        return emit(&v, a.state.out.as_deref());
    }
    if a.region.is_empty() {
        bail!("pass --region or --tee");
    }
    let rho = tomography(e, c, th, &a.region, d)?;
    if let Some(p) = &a.dump {
        fs::write(p, rho.dump())?;
    }
    let m = rho.matrix();
    let re: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
    let im: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect();
    let v = json!({
        "delta_c": d,
        "region": rho.region(),
        "coefficients": rho.coefficients(),
        "entropy": rho.entropy()?,
        "trace": rho.trace().re,
        "matrix_re": re,
        "matrix_im": im,
    });
    emit(&v, a.state.out.as_deref())
}

fn kitaev_dims(m: &Model) -> Result<(usize, usize)> {
    match *m {
        Model::Kitaev { nx, ny, .. } => Ok((nx, ny)),
        _ => bail!("braiding needs a kitaev model"),
    }
}

fn braid(a: BraidArgs) -> Result<()> {
    let l = load_state(&a.state)?;
    let (nx, ny) = kitaev_dims(&l.cfg.model)?;
    let mut phases = serde_json::Map::new();
    for kind in a.kind.kinds() {
        let spec = braid_spec(kind, nx, ny)?;
        let z = braiding_phase(&l.problem.engine, &l.problem.circuit, &l.theta, &spec, l.delta_c)?;
        let mut entry = json!({ "re": z.re, "im": z.im, "abs": z.norm() });
        if a.ancilla {
            if nx * ny + 1 > STATEVECTOR_LIMIT {
                bail!("--ancilla simulates {} qubits densely; limit is {STATEVECTOR_LIMIT}", nx * ny + 1);
            }
            let w = ancilla_phase(&l.problem.circuit, &l.theta, &spec)?;
            entry["ancilla"] = json!({ "re": w.re, "im": w.im });
        }
        phases.insert(kind.name().into(), entry);
    }
    let v = json!({ "model": l.cfg.model, "delta_c": l.delta_c, "phases": phases });
    emit(&v, a.state.out.as_deref())
}

fn oracle(which: OracleCmd) -> Result<()> {
    let v = match which {
        OracleCmd::Tfim { n, gx } => json!({ "model": "tfim1d", "n": n, "gx": gx, "energy": exact_tfim_energy(n, gx)? }),
        OracleCmd::Kitaev { nx, ny, jx, jy, jz, sectors } => {
            let mut v = json!({
                "model": "kitaev", "nx": nx, "ny": ny, "jx": jx, "jy": jy, "jz": jz,
                "energy": exact_kitaev_energy(nx, ny, jx, jy, jz)?,
            });
            if sectors {
                v["sectors"] = json!(kitaev_sector_energies(nx, ny, jx, jy, jz)?);
                v["minimum"] = json!(kitaev_flux_free_minimum(nx, ny, jx, jy, jz)?);
            }
            v
        }
        OracleCmd::Config { config } => {
            let (cfg, _) = load_config(&config)?;
            let e = match exact_reference(&cfg.model)? {
                Some(e) => e,
                None => exact_ground_energy_small(&cfg.model.hamiltonian()?.operator)?,
            };
            json!({ "model": cfg.model, "energy": e })
        }
    };
    emit(&v, None)
}

fn export_qasm(a: ExportArgs) -> Result<()> {
    let l = load_state(&StateArgs {
        config: a.config.clone(),
        params: a.params.clone(),
        delta_c: None,
        out: None,
    })?;
    let text = match a.braid {
        None => to_qasm(&l.problem.circuit, &l.theta)?,
        Some(KindArg::All) => bail!("--braid takes a single exchange"),
        Some(k) => {
            let (nx, ny) = kitaev_dims(&l.cfg.model)?;
            let spec = braid_spec(k.kinds()[0], nx, ny)?;
            let mut c: Circuit = controlled_braid_circuit(&l.problem.circuit, &l.theta, &spec)?;
            let anc = c.n() - 1;
            match a.basis {
                Basis::X => c.append_clifford(Clifford::H(anc))?,
                Basis::Y => c.extend_cliffords([Clifford::Sdg(anc), Clifford::H(anc)])?,
            };
            to_qasm_measured(&c, &[], &[anc])?
        }
    };
    match &a.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
