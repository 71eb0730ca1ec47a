//! Training runs, sweeps and their on-disk artifacts.
//!
//! A run directory holds `config.toml` (verbatim copy), `meta.json`,
//! `trace.csv`, `checkpoint.json`, `params.json` and `report.json`.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::config::Config;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::models::{proxy_hamiltonian, Model};
use crate::operator::SparseOperator;
use crate::optimizer::{train, write_trace_csv, TrainOptions, TrainResult};
use crate::oracle::{exact_ground_energy_small, exact_kitaev_energy, exact_tfim_energy, MAX_LANCZOS_QUBITS};

/// Circuit, cost operator and engine for one configuration.
#[derive(Clone, Debug)]
pub struct Problem {
    pub model: Model,
    pub circuit: Circuit,
    /// Operator minimized during training (proxy or full).
    pub cost: SparseOperator,
    pub engine: Engine,
}

impl Problem {
    pub fn new(model: &Model, reps: usize, proxy: bool, shards: usize) -> Result<Self> {
        let cost = if proxy {
            proxy_hamiltonian(model)?.operator
        } else {
            model.hamiltonian()?.operator
        };
        Ok(Self {
            model: model.clone(),
            circuit: model.ansatz(reps)?,
            cost,
            engine: Engine::sharded(shards),
        })
    }

    pub fn from_config(cfg: &Config) -> Result<Self> {
        Self::new(&cfg.model, cfg.ansatz.reps, cfg.ansatz.proxy, cfg.optimizer.shards)
    }

    pub fn energy(&self, theta: &[f64], delta_c: f64) -> Result<f64> {
        self.engine.expectation(&self.circuit, &self.cost, theta, delta_c)
    }
}

/// Exact ground energy where a solver applies: the free-fermion formula for
/// the chain at `g_z = 0`, the zero-flux sector with periodic fermions for
/// Kitaev, and Lanczos up to 20 qubits otherwise.
pub fn exact_reference(model: &Model) -> Result<Option<f64>> {
    match *model {
        Model::Tfim1d { n, gx, gz } if gz == 0.0 && n % 2 == 0 && n >= 4 => Ok(Some(exact_tfim_energy(n, gx)?)),
        Model::Kitaev { nx, ny, jx, jy, jz } => Ok(Some(exact_kitaev_energy(nx, ny, jx, jy, jz)?)),
        _ if model.n() <= MAX_LANCZOS_QUBITS => Ok(Some(exact_ground_energy_small(&model.hamiltonian()?.operator)?)),
        _ => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: Model,
    pub reps: usize,
    pub proxy: bool,
    pub energy_train_delta: f64,
    pub train_delta_c: f64,
    pub energy_report_delta: f64,
    pub report_delta_c: f64,
    pub exact_energy: Option<f64>,
    pub relative_error: Option<f64>,
    pub iterations: usize,
    pub seed: u64,
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub version: String,
    pub model: Model,
}

/// Parameters as a bare JSON array or as `{"theta": [...]}`.
pub fn load_params(path: &Path) -> Result<Vec<f64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Params {
        Bare(Vec<f64>),
        Wrapped { theta: Vec<f64> },
    }
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read parameter file {}: {e}", path.display())))?;
    let p: Params = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("parameter file {}: {e}", path.display())))?;
    Ok(match p {
        Params::Bare(v) | Params::Wrapped { theta: v } => v,
    })
}

pub fn write_params(path: &Path, theta: &[f64]) -> Result<()> {
    let text = serde_json::to_string_pretty(&serde_json::json!({ "theta": theta }))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(v)? + "\n")?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn relative_error(e: f64, exact: Option<f64>) -> Option<f64> {
    exact.map(|e0| (e - e0) / e0.abs())
}

/// Train one configuration, writing every artifact into `dir`.
pub fn train_in_dir(cfg: &Config, config_text: &str, dir: &Path, warm: Option<Vec<f64>>) -> Result<RunReport> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config_text)?;
    write_json(
        &dir.join("meta.json"),
        &Meta {
            seed: cfg.optimizer.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            model: cfg.model.clone(),
        },
    )?;
    let problem = Problem::from_config(cfg)?;
    let p = problem.circuit.param_count();
    let theta0 = match (warm, &cfg.ansatz.init) {
        (Some(t), _) => t,
        (None, Some(path)) => load_params(path)?,
        (None, None) => vec![0.0; p],
    };
    if theta0.len() != p {
        return Err(Error::Dimension {
            expected: p,
            found: theta0.len(),
        });
    }
    let opts = TrainOptions {
        hyper: cfg.optimizer.hyper(),
        schedule: cfg.schedule(),
        seed: cfg.optimizer.seed,
        record_every: cfg.optimizer.record_every,
        report_delta_c: cfg.report.delta_c,
        parallel_spsa: cfg.optimizer.parallel_spsa,
    };
    let checkpoint_path = dir.join("checkpoint.json");
    let cost = |th: &[f64], d: f64| problem.energy(th, d);
    let result: TrainResult = train(&cost, theta0, &opts, |c| write_json(&checkpoint_path, c))?;
    let mut trace = fs::File::create(dir.join("trace.csv"))?;
    write_trace_csv(&result.trace, &mut trace)?;
    trace.flush()?;
    write_params(&dir.join("params.json"), &result.theta)?;
    let exact = if cfg.report.exact {
        exact_reference(&cfg.model)?
    } else {
        None
    };
    let report = RunReport {
        model: cfg.model.clone(),
        reps: cfg.ansatz.reps,
        proxy: cfg.ansatz.proxy,
        energy_train_delta: result.energy_train,
        train_delta_c: result.train_delta_c,
        energy_report_delta: result.energy_report,
        report_delta_c: result.report_delta_c,
        exact_energy: exact,
        relative_error: relative_error(result.energy_report, exact),
        iterations: result.iterations,
        seed: cfg.optimizer.seed,
        theta: result.theta,
    };
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub energy: Option<f64>,
    pub exact_energy: Option<f64>,
    pub relative_error: Option<f64>,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub status: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

/// Train each grid point in order, one subdirectory per point, passing each
/// converged θ on as the next warm start. A failed point is recorded and
/// the sweep continues from the last good parameters.
pub fn sweep_in_dir(cfg: &Config, config_text: &str, dir: &Path) -> Result<Vec<SweepRow>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("configuration has no [sweep] section".into()))?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config_text)?;
    let mut rows = Vec::new();
    let mut warm: Option<Vec<f64>> = None;
    for (i, &v) in sweep.values.iter().enumerate() {
        let start = Instant::now();
        let mut point = cfg.clone();
        point.sweep = None;
        let outcome = cfg.model.with_coupling(&sweep.param, v).and_then(|m| {
            point.model = m;
            let text = point.to_toml()?;
            train_in_dir(&point, &text, &dir.join(format!("point_{i:03}")), warm.clone())
        });
        let wall = start.elapsed().as_secs_f64();
        match outcome {
            Ok(r) => {
                log::info!("{} = {v}: energy {:.10}", sweep.param, r.energy_report_delta);
                if sweep.warm_start {
                    warm = Some(r.theta.clone());
                }
                rows.push(SweepRow {
                    value: v,
                    energy: Some(r.energy_report_delta),
                    exact_energy: r.exact_energy,
                    relative_error: r.relative_error,
                    iterations: r.iterations,
                    wall_seconds: wall,
                    status: "ok".into(),
                });
            }
            Err(e) => {
                log::error!("{} = {v} failed: {e}", sweep.param);
                rows.push(SweepRow {
                    value: v,
                    energy: None,
                    exact_energy: None,
                    relative_error: None,
                    iterations: 0,
                    wall_seconds: wall,
                    status: format!("error: {e}").replace(',', ";"),
                });
            }
        }
    }
    let mut f = fs::File::create(dir.join("sweep.csv"))?;
    writeln!(f, "{},energy,exact_energy,relative_error,iterations,wall_seconds,status", sweep.param)?;
    for r in &rows {
        writeln!(
            f,
            "{},{},{},{},{},{:.3},{}",
            r.value,
            opt(r.energy),
            opt(r.exact_energy),
            opt(r.relative_error),
            r.iterations,
            r.wall_seconds,
            r.status
        )?;
    }
    Ok(rows)
}
