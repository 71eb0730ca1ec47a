//! SPSA gradient estimates fed to ADAM, and the staged training loop.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyper {
    pub eta: f64,
    /// Norm of the SPSA perturbation.
    pub delta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for Hyper {
    fn default() -> Self {
        Self {
            eta: 0.001,
            delta: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-5,
        }
    }
}

impl Hyper {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eta > 0.0
            && self.delta > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0
            && [self.eta, self.delta, self.eps].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid optimizer hyperparameters {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub theta: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub hyper: Hyper,
}

impl OptimizerState {
    pub fn new(theta: Vec<f64>, hyper: Hyper) -> Self {
        let p = theta.len();
        Self {
            theta,
            m: vec![0.0; p],
            v: vec![0.0; p],
            t: 0,
            hyper,
        }
    }

    pub fn from_checkpoint(c: &Checkpoint, hyper: Hyper) -> Result<Self> {
        let p = c.theta.len();
        if c.m.len() != p || c.v.len() != p {
            return Err(Error::Dimension {
                expected: p,
                found: c.m.len().min(c.v.len()),
            });
        }
        Ok(Self {
            theta: c.theta.clone(),
            m: c.m.clone(),
            v: c.v.clone(),
            t: c.t,
            hyper,
        })
    }

    /// One bias-corrected ADAM step with the default learning rate.
    pub fn adam_update(&mut self, g: &[f64]) -> Result<()> {
        self.adam_update_eta(g, self.hyper.eta)
    }

    pub fn adam_update_eta(&mut self, g: &[f64], eta: f64) -> Result<()> {
        if g.len() != self.theta.len() {
            return Err(Error::Dimension {
                expected: self.theta.len(),
                found: g.len(),
            });
        }
        let Hyper { beta1, beta2, eps, .. } = self.hyper;
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for (((th, m), v), &gi) in self.theta.iter_mut().zip(&mut self.m).zip(&mut self.v).zip(g) {
            *m = beta1 * *m + (1.0 - beta1) * gi;
            *v = beta2 * *v + (1.0 - beta2) * gi * gi;
            let mh = *m / c1;
            let vh = *v / c2;
            *th -= eta * mh / (vh.sqrt() + eps);
        }
        Ok(())
    }
}

/// `delta · χ/‖χ‖₂` with `χ` uniform on `[-1, 1]^p`.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R, p: usize, delta: f64) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::Parameter("cannot perturb an empty parameter vector".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("perturbation norm must be positive, got {delta}")));
    }
    loop {
        let chi: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = chi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(chi.into_iter().map(|x| delta * x / norm).collect());
        }
    }
}

/// Two-evaluation gradient estimate `[C(θ+d) − C(θ−d)] / (2‖d‖) · d/‖d‖`.
///
/// With `parallel` the two evaluations run concurrently; the result does not
/// depend on it.
pub fn spsa_gradient<F>(cost: &F, theta: &[f64], direction: &[f64], parallel: bool) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if direction.len() != theta.len() {
        return Err(Error::Dimension {
            expected: theta.len(),
            found: direction.len(),
        });
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Parameter("perturbation direction has zero norm".into()));
    }
    let plus: Vec<f64> = theta.iter().zip(direction).map(|(t, d)| t + d).collect();
    let minus: Vec<f64> = theta.iter().zip(direction).map(|(t, d)| t - d).collect();
    let (cp, cm) = if parallel {
        rayon::join(|| cost(&plus), || cost(&minus))
    } else {
        (cost(&plus), cost(&minus))
    };
    let (cp, cm) = (cp?, cm?);
    if !cp.is_finite() || !cm.is_finite() {
        return Err(Error::NonFinite(format!("cost values {cp}, {cm}")));
    }
    let scale = (cp - cm) / (2.0 * norm * norm);
    Ok(direction.iter().map(|d| scale * d).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub iterations: usize,
    pub delta_c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub stages: Vec<Stage>,
}

impl Schedule {
    pub fn single(iterations: usize, delta_c: f64) -> Self {
        Self {
            stages: vec![Stage {
                iterations,
                delta_c,
                eta: None,
            }],
        }
    }

    pub fn total_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.iterations).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Config("schedule has no stages".into()));
        }
        for (i, s) in self.stages.iter().enumerate() {
            if s.iterations == 0 {
                return Err(Error::Config(format!("schedule.stage[{i}].iterations must be positive")));
            }
            if !(s.delta_c >= 0.0 && s.delta_c.is_finite()) {
                return Err(Error::Config(format!("schedule.stage[{i}].delta_c must be non-negative")));
            }
            if let Some(eta) = s.eta {
                if !(eta > 0.0 && eta.is_finite()) {
                    return Err(Error::Config(format!("schedule.stage[{i}].eta must be positive")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub theta: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub stage: usize,
    pub best_energy: f64,
    pub best_theta: Vec<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub energy: f64,
    pub delta_c: f64,
    pub wall: f64,
}

/// Write the trace as `iteration,energy,delta_c,wall`.
pub fn write_trace_csv<W: std::io::Write>(trace: &[TracePoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "iteration,energy,delta_c,wall")?;
    for p in trace {
        writeln!(w, "{},{:.17e},{:e},{:.6}", p.iteration, p.energy, p.delta_c, p.wall)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct TrainOptions {
    pub hyper: Hyper,
    pub schedule: Schedule,
    pub seed: u64,
    /// Record an energy every this many iterations (and at each stage end).
    pub record_every: usize,
    /// Threshold for the final re-evaluation.
    pub report_delta_c: f64,
    pub parallel_spsa: bool,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    /// Parameters selected by the report-threshold comparison.
    pub theta: Vec<f64>,
    pub final_theta: Vec<f64>,
    pub best_theta: Vec<f64>,
    /// Energy of `theta` at the last stage's threshold.
    pub energy_train: f64,
    pub train_delta_c: f64,
    /// Energy of `theta` at the report threshold.
    pub energy_report: f64,
    pub report_delta_c: f64,
    pub iterations: usize,
    pub trace: Vec<TracePoint>,
    pub state: OptimizerState,
}

/// Staged SPSA + ADAM minimization of `cost(θ, δ_c)`.
///
/// `sink` receives a checkpoint at every recorded iteration; a non-finite
/// energy aborts the run after the last good checkpoint has been delivered.
pub fn train<F, S>(cost: &F, theta0: Vec<f64>, opts: &TrainOptions, mut sink: S) -> Result<TrainResult>
where
    F: Fn(&[f64], f64) -> Result<f64> + Sync,
    S: FnMut(&Checkpoint) -> Result<()>,
{
    opts.hyper.validate()?;
    opts.schedule.validate()?;
    crate::operator::check_delta(opts.report_delta_c)?;
    let record_every = opts.record_every.max(1);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut state = OptimizerState::new(theta0, opts.hyper);
    let p = state.theta.len();

    let finite = |e: f64, it: usize| {
        if e.is_finite() {
            Ok(e)
        } else {
            Err(Error::NonFinite(format!("energy {e} at iteration {it}")))
        }
    };
    let first_delta = opts.schedule.stages[0].delta_c;
    let e0 = finite(cost(&state.theta, first_delta)?, 0)?;
    let mut trace = vec![TracePoint {
        iteration: 0,
        energy: e0,
        delta_c: first_delta,
        wall: start.elapsed().as_secs_f64(),
    }];
    let mut best = (e0, state.theta.clone());
    let mut iteration = 0;

    for (si, stage) in opts.schedule.stages.iter().enumerate() {
        let eta = stage.eta.unwrap_or(opts.hyper.eta);
        let stage_cost = |th: &[f64]| cost(th, stage.delta_c);
        for k in 0..stage.iterations {
            let g = if p == 0 {
                Vec::new()
            } else {
                let d = sample_direction(&mut rng, p, opts.hyper.delta)?;
                spsa_gradient(&stage_cost, &state.theta, &d, opts.parallel_spsa)?
            };
            state.adam_update_eta(&g, eta)?;
            iteration += 1;
            if iteration % record_every == 0 || k + 1 == stage.iterations {
                let e = finite(stage_cost(&state.theta)?, iteration)?;
                trace.push(TracePoint {
                    iteration,
                    energy: e,
                    delta_c: stage.delta_c,
                    wall: start.elapsed().as_secs_f64(),
                });
                if e < best.0 {
                    best = (e, state.theta.clone());
                }
                log::debug!("iteration {iteration} stage {si} energy {e:.10}");
                sink(&Checkpoint {
                    theta: state.theta.clone(),
                    m: state.m.clone(),
                    v: state.v.clone(),
                    t: state.t,
                    stage: si,
                    best_energy: best.0,
                    best_theta: best.1.clone(),
                })?;
            }
        }
    }

    let train_delta_c = opts.schedule.stages.last().expect("validated").delta_c;
    let final_report = finite(cost(&state.theta, opts.report_delta_c)?, iteration)?;
    let best_report = if best.1 == state.theta {
        final_report
    } else {
        finite(cost(&best.1, opts.report_delta_c)?, iteration)?
    };
    let theta = if best_report < final_report {
        best.1.clone()
    } else {
        state.theta.clone()
    };
    let energy_report = final_report.min(best_report);
    let energy_train = finite(cost(&theta, train_delta_c)?, iteration)?;
    Ok(TrainResult {
        theta,
        final_theta: state.theta.clone(),
        best_theta: best.1,
        energy_train,
        train_delta_c,
        energy_report,
        report_delta_c: opts.report_delta_c,
        iterations: iteration,
        trace,
        state,
    })
}
