use serde::{Deserialize, Serialize};

use crate::circuits::OpticalCircuit;
use crate::engine::density::{DensityMatrix, Moments, Normalization};
use crate::engine::noise_model::{build_noisy_circuit, NoiseModel};
use crate::engine::plan::{Plan, Projection};
use crate::error::{Error, Result};
use crate::rng::TrajectoryStream;

/// Trajectories per work unit. Fixed so the summation tree, and therefore
/// every floating-point result, does not depend on the thread count.
pub const BATCH_SIZE: usize = 64;

/// Evaluation strategy for the trajectory batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Rayon data-parallel map over batches; sequential when the `parallel`
    /// feature is off.
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_samples: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub normalize: Normalization,
    #[serde(default)]
    pub execution: Execution,
}

impl RunConfig {
    pub fn new(n_samples: usize, master_seed: u64) -> Self {
        RunConfig {
            n_samples,
            master_seed,
            normalize: Normalization::None,
            execution: Execution::Parallel,
        }
    }

    pub fn normalized(mut self, normalize: Normalization) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Map `work` over fixed batches of `0..n` and fold the partial results in
/// batch order.
pub(crate) fn map_batches<A, W, M>(n: usize, execution: Execution, work: W, merge: M) -> Result<A>
where
    A: Send,
    W: Fn(std::ops::Range<usize>) -> Result<A> + Sync,
    M: Fn(&mut A, A),
{
    let ranges: Vec<_> = (0..n)
        .step_by(BATCH_SIZE)
        .map(|s| s..(s + BATCH_SIZE).min(n))
        .collect();
    let parts: Vec<Result<A>> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            ranges.into_par_iter().map(&work).collect()
        }
        _ => ranges.into_iter().map(&work).collect(),
    };
    let mut it = parts.into_iter();
    let mut acc = it
        .next()
        .ok_or_else(|| Error::Config("no trajectories to run".into()))??;
    for p in it {
        merge(&mut acc, p?);
    }
    Ok(acc)
}

/// Build the noisy circuit and average its trajectories.
pub fn run_trajectories(
    circuit: &OpticalCircuit,
    noise: &NoiseModel,
    cfg: &RunConfig,
) -> Result<DensityMatrix> {
    let noisy = build_noisy_circuit(circuit, noise)?;
    run_noisy_circuit(&noisy, cfg)
}

/// Average the trajectories of a circuit whose elements already carry their
/// noise probabilities.
pub fn run_noisy_circuit(noisy: &OpticalCircuit, cfg: &RunConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let plan = Plan::compile(noisy)?;
    let proj = Projection::new(noisy)?;
    let dim = proj.dim();
    let moments = map_batches(
        cfg.n_samples,
        cfg.execution,
        |range| {
            let mut m = Moments::new(dim);
            for i in range {
                let stream = TrajectoryStream::new(cfg.master_seed, i as u64);
                let t = plan.sample_transfer(&stream, 0);
                m.push(&proj.evaluate(&t)?);
            }
            Ok(m)
        },
        |a, b| a.merge(&b),
    )?;
    DensityMatrix::from_moments(moments, cfg.normalize, cfg.master_seed)
}
