//! Run configuration, read from TOML.
//!
//! ```toml
//! [model]
//! model = "tfim1d"      # tfim1d | ising_square | ising_heavyhex | kitaev
//! n = 12
//! gx = 1.0
//! gz = 0.0
//!
//! [ansatz]
//! reps = 6
//! proxy = false
//!
//! [optimizer]
//! seed = 1
//!
//! [[schedule.stage]]
//! iterations = 2000
//! delta_c = 1e-4
//!
//! [report]
//! delta_c = 1e-5
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Model;
use crate::optimizer::{Hyper, Schedule, Stage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub reps: usize,
    /// Train on the few-term translation-invariant surrogate.
    #[serde(default)]
    pub proxy: bool,
    /// Warm-start parameter file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub eta: f64,
    pub delta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
    pub record_every: usize,
    pub parallel_spsa: bool,
    /// Hash shards for the propagation kernel; 1 is serial.
    pub shards: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let h = Hyper::default();
        Self {
            eta: h.eta,
            delta: h.delta,
            beta1: h.beta1,
            beta2: h.beta2,
            eps: h.eps,
            seed: 0,
            record_every: 10,
            parallel_spsa: true,
            shards: 1,
        }
    }
}

impl OptimizerConfig {
    pub fn hyper(&self) -> Hyper {
        Hyper {
            eta: self.eta,
            delta: self.delta,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub stage: Vec<Stage>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub delta_c: f64,
    /// Compute the exact reference energy when a solver is available.
    pub exact: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            delta_c: 1e-4,
            exact: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: String,
    pub values: Vec<f64>,
    /// Chain each converged θ into the next point.
    #[serde(default = "yes")]
    pub warm_start: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Model,
    pub ansatz: AnsatzConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub report: ReportConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and validate; a relative `ansatz.init` is resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })?;
        if let Some(init) = &cfg.ansatz.init {
            if init.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.ansatz.init = Some(base.join(init));
            }
        }
        Ok((cfg, text))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            stages: self.schedule.stage.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ansatz.reps == 0 {
            return Err(Error::Config("ansatz.reps must be at least 1".into()));
        }
        self.optimizer
            .hyper()
            .validate()
            .map_err(|e| Error::Config(format!("optimizer: {e}")))?;
        if self.optimizer.shards == 0 {
            return Err(Error::Config("optimizer.shards must be at least 1".into()));
        }
        self.schedule().validate()?;
        if !(self.report.delta_c >= 0.0 && self.report.delta_c.is_finite()) {
            return Err(Error::Config("report.delta_c must be non-negative".into()));
        }
        self.model
            .lattice()
            .map_err(|e| Error::Config(format!("model: {e}")))?;
        if let Model::Kitaev { nx, ny, .. } = self.model {
            if nx < 4 || ny < 4 {
                return Err(Error::Config("model: kitaev needs nx, ny ≥ 4".into()));
            }
        }
        if self.ansatz.proxy && matches!(self.model, Model::IsingHeavyHex { .. }) {
            return Err(Error::Config("ansatz.proxy is not available on the heavy-hex lattice".into()));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::Config("sweep.values is empty".into()));
            }
            self.model
                .with_coupling(&s.param, s.values[0])
                .map_err(|e| Error::Config(format!("sweep.param: {e}")))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
model = "tfim1d"
n = 12
gx = 1.0
gz = 0.0

[ansatz]
reps = 6

[[schedule.stage]]
iterations = 100
delta_c = 1e-3

[[schedule.stage]]
iterations = 50
delta_c = 1e-4
eta = 0.0005
"#;

    #[test]
    fn parses_with_defaults() {
        let c = Config::from_toml_str(BASE).unwrap();
        assert_eq!(c.model, Model::Tfim1d { n: 12, gx: 1.0, gz: 0.0 });
        assert_eq!(c.ansatz.reps, 6);
        assert_eq!(c.optimizer.hyper(), Hyper::default());
        assert_eq!(c.schedule().total_iterations(), 150);
        assert_eq!(c.schedule.stage[1].eta, Some(0.0005));
        assert_eq!(c.report.delta_c, 1e-4);
        let again = Config::from_toml_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn missing_reps_is_named() {
        let text = BASE.replace("reps = 6", "");
        let e = Config::from_toml_str(&text).unwrap_err().to_string();
        assert!(e.contains("reps"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = BASE.replace("reps = 6", "reps = 6\nrepz = 2");
        assert!(Config::from_toml_str(&text).unwrap_err().to_string().contains("repz"));
        let text = BASE.replace("gz = 0.0", "gz = 0.0\njx = 1.0");
        assert!(Config::from_toml_str(&text).is_err());
        let text = BASE.replace("\"tfim1d\"", "\"tfim2d\"");
        assert!(Config::from_toml_str(&text).is_err());
    }

    #[test]
    fn semantic_validation() {
        assert!(Config::from_toml_str(&BASE.replace("reps = 6", "reps = 0")).is_err());
        assert!(Config::from_toml_str(&BASE.replace("iterations = 100", "iterations = 0")).is_err());
        let k = r#"
[model]
model = "kitaev"
nx = 8
ny = 6
jx = 0.3
jy = 0.3
jz = 1.0
[ansatz]
reps = 5
proxy = true
[[schedule.stage]]
iterations = 10
delta_c = 1e-3
[sweep]
param = "j"
values = [0.3, 0.35]
"#;
        let c = Config::from_toml_str(k).unwrap();
        assert!(c.ansatz.proxy);
        assert!(c.sweep.as_ref().unwrap().warm_start);
        assert!(Config::from_toml_str(&k.replace("param = \"j\"", "param = \"gx\"")).is_err());
        assert!(Config::from_toml_str(&k.replace("nx = 8", "nx = 2")).is_err());
    }
}
