use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{run_trajectories, Execution, NoiseKind, NoiseModel, Normalization, RunConfig};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::vqa::ansatz::{Ansatz, RingAnsatz};
use crate::vqa::cost::{
    approximation_ratio, energy, energy_stderr, maxcut_cost, relative_error, CostOperator, Graph,
};
use crate::vqa::optimizer::{NelderMead, Optimizer, Termination};

const INIT_TAG: u64 = u64::MAX;
const FINAL_TAG: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    /// Objective evaluations allowed.
    pub max_iters: usize,
    pub seed: u64,
    pub n_samples: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            max_iters: 500,
            seed: 0,
            n_samples: 500,
        }
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub params: Vec<f64>,
    pub energy: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRun {
    pub trace: Vec<TraceStep>,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Energy at the final parameters, re-estimated on a fresh stream so it
    /// is not biased by the optimizer keeping its luckiest evaluation.
    pub final_energy: f64,
    pub final_energy_stderr: f64,
    pub optimum: f64,
    pub relative_error: f64,
    pub approximation_ratio: f64,
    pub termination: Termination,
}

/// Energy of the ansatz at `params`, dual-rail postselected and normalized.
/// A noiseless model needs a single trajectory, whatever `n_samples` says.
pub fn evaluate_energy(
    ansatz: &dyn Ansatz,
    params: &[f64],
    cost: &CostOperator,
    noise: &NoiseModel,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(evaluate_energy_with_stderr(ansatz, params, cost, noise, n_samples, seed)?.0)
}

/// [`evaluate_energy`] together with its Monte-Carlo standard error.
pub fn evaluate_energy_with_stderr(
    ansatz: &dyn Ansatz,
    params: &[f64],
    cost: &CostOperator,
    noise: &NoiseModel,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let circuit = ansatz.circuit(params)?;
    let n = if noise.is_noiseless() { 1 } else { n_samples };
    let rho = run_trajectories(&circuit, noise, &RunConfig::new(n, seed).normalized(Normalization::Trace))?;
    Ok((energy(&rho, cost)?, energy_stderr(&rho, cost)?))
}

/// Minimize the cut energy of `graph` with the default ring ansatz and
/// simplex optimizer.
pub fn optimize(graph: &Graph, noise: &NoiseModel, cfg: &OptimizeConfig) -> Result<OptimizationRun> {
    let ansatz = RingAnsatz {
        qubits: graph.n_vertices,
        ..Default::default()
    };
    let optimizer = NelderMead {
        max_evals: cfg.max_iters,
        ..Default::default()
    };
    optimize_with(&ansatz, &optimizer, graph, noise, cfg)
}

/// Random initial parameters in `[0, 2π)`, then local minimization. Every
/// evaluation draws its trajectories from its own seed derived from
/// `cfg.seed` and the evaluation index.
pub fn optimize_with(
    ansatz: &dyn Ansatz,
    optimizer: &dyn Optimizer,
    graph: &Graph,
    noise: &NoiseModel,
    cfg: &OptimizeConfig,
) -> Result<OptimizationRun> {
    noise.validate()?;
    if cfg.n_samples == 0 {
        return Err(Error::Config("n_samples must be positive".into()));
    }
    if ansatz.qubits() != graph.n_vertices {
        return Err(Error::Config(format!(
            "ansatz has {} qubits, graph {} vertices",
            ansatz.qubits(),
            graph.n_vertices
        )));
    }
    let cost = maxcut_cost(graph)?;
    let optimum = cost.minimum();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, INIT_TAG));
    let x0: Vec<f64> = (0..ansatz.n_params())
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();

    let mut trace = Vec::new();
    let mut objective = |x: &[f64]| -> Result<f64> {
        let step = trace.len();
        let e = evaluate_energy(ansatz, x, &cost, noise, cfg.n_samples, derive_seed(cfg.seed, step as u64))?;
        trace.push(TraceStep {
            step,
            params: x.to_vec(),
            energy: e,
            relative_error: relative_error(e, optimum),
        });
        Ok(e)
    };
    let min = optimizer.minimize(&mut objective, &x0);
    let (final_energy, final_energy_stderr) = if min.value.is_finite() {
        evaluate_energy_with_stderr(ansatz, &min.x, &cost, noise, cfg.n_samples, derive_seed(cfg.seed, FINAL_TAG))?
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(OptimizationRun {
        trace,
        initial_params: x0,
        final_params: min.x,
        final_energy,
        final_energy_stderr,
        optimum,
        relative_error: relative_error(final_energy, optimum),
        approximation_ratio: approximation_ratio(final_energy, optimum)?,
        termination: min.termination,
    })
}

/// Variational experiment file: restarts of the optimizer for every noise
/// scenario and probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqaConfig {
    #[serde(default = "Graph::square")]
    pub graph: Graph,
    #[serde(default = "all_kinds")]
    pub noise_types: Vec<NoiseKind>,
    pub probabilities: Vec<f64>,
    /// Also run the noiseless optimization.
    #[serde(default = "yes")]
    pub noiseless: bool,
    #[serde(default = "five")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "five_hundred")]
    pub n_samples: usize,
    #[serde(default = "five_hundred")]
    pub max_iters: usize,
}

fn all_kinds() -> Vec<NoiseKind> {
    NoiseKind::ALL.to_vec()
}
fn yes() -> bool {
    true
}
fn five() -> usize {
    5
}
fn five_hundred() -> usize {
    500
}

impl VqaConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: VqaConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        for &p in &self.probabilities {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::Probability(p));
            }
        }
        if self.restarts == 0 || self.n_samples == 0 || self.max_iters == 0 {
            return Err(Error::Config("restarts, n_samples and max_iters must be positive".into()));
        }
        Ok(())
    }

    /// `(scenario, p)` pairs in run order.
    pub fn scenarios(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        if self.noiseless {
            out.push(("noiseless".to_string(), 0.0));
        }
        for kind in &self.noise_types {
            for &p in &self.probabilities {
                out.push((kind.label().to_string(), p));
            }
        }
        out
    }
}

fn scenario_model(name: &str, p: f64) -> Result<NoiseModel> {
    if name == "noiseless" {
        Ok(NoiseModel::noiseless())
    } else {
        Ok(name.parse::<NoiseKind>()?.model(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqaRunRecord {
    pub scenario: String,
    pub p: f64,
    pub restart: usize,
    pub run: OptimizationRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub p: f64,
    pub median_approximation_ratio: f64,
    pub median_relative_error: f64,
    pub approximation_ratios: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub final_energies: Vec<f64>,
    pub final_energy_stderrs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqaReport {
    pub config: VqaConfig,
    pub summary: Vec<ScenarioSummary>,
    #[serde(skip)]
    pub runs: Vec<VqaRunRecord>,
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Run every `(scenario, p, restart)` optimization. Restart `r` uses the
/// same initial parameters and evaluation seeds in every scenario, so
/// scenario comparisons are paired. Jobs run concurrently under
/// [`Execution::Parallel`]; results do not depend on the thread count.
pub fn run_vqa(cfg: &VqaConfig, execution: Execution) -> Result<VqaReport> {
    cfg.validate()?;
    let scenarios = cfg.scenarios();
    let jobs: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|s| (0..cfg.restarts).map(move |r| (s, r)))
        .collect();
    let work = |&(s, r): &(usize, usize)| -> Result<VqaRunRecord> {
        let (name, p) = &scenarios[s];
        let opt = OptimizeConfig {
            max_iters: cfg.max_iters,
            seed: derive_seed(cfg.seed, r as u64),
            n_samples: cfg.n_samples,
        };
        let run = optimize(&cfg.graph, &scenario_model(name, *p)?, &opt)?;
        Ok(VqaRunRecord {
            scenario: name.clone(),
            p: *p,
            restart: r,
            run,
        })
    };
    let runs: Vec<Result<VqaRunRecord>> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(work).collect()
        }
        _ => jobs.iter().map(work).collect(),
    };
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = scenarios
        .iter()
        .map(|(name, p)| {
            let of: Vec<&VqaRunRecord> = runs.iter().filter(|r| &r.scenario == name && r.p == *p).collect();
            let ratios: Vec<f64> = of.iter().map(|r| r.run.approximation_ratio).collect();
            let errors: Vec<f64> = of.iter().map(|r| r.run.relative_error).collect();
            ScenarioSummary {
                scenario: name.clone(),
                p: *p,
                median_approximation_ratio: median(&ratios),
                median_relative_error: median(&errors),
                approximation_ratios: ratios,
                relative_errors: errors,
                final_energies: of.iter().map(|r| r.run.final_energy).collect(),
                final_energy_stderrs: of.iter().map(|r| r.run.final_energy_stderr).collect(),
            }
        })
        .collect();
    Ok(VqaReport {
        config: cfg.clone(),
        summary,
        runs,
    })
}

impl VqaReport {
    pub fn summary_for(&self, scenario: &str, p: f64) -> Option<&ScenarioSummary> {
        self.summary.iter().find(|s| s.scenario == scenario && s.p == p)
    }

    /// Trace of every run: `scenario,p,restart,step,energy,relative_error`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scenario", "p", "restart", "step", "energy", "relative_error"])?;
        for r in &self.runs {
            for t in &r.run.trace {
                w.write_record([
                    r.scenario.clone(),
                    r.p.to_string(),
                    r.restart.to_string(),
                    t.step.to_string(),
                    t.energy.to_string(),
                    t.relative_error.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Write `vqa_trace.csv` and `vqa_summary.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_trace_csv(std::fs::File::create(dir.join("vqa_trace.csv"))?)?;
        std::fs::write(dir.join("vqa_summary.json"), self.summary_json()?)?;
        Ok(())
    }
}
