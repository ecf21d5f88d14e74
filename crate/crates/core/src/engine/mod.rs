//! Noisy-circuit construction, trajectory ensembles and the exact reference
//! average used to validate them.

mod density;
mod noise_model;
mod oracle;
mod plan;
mod run;

pub use density::{DensityMatrix, Normalization};
pub(crate) use density::{Moments, TrajectorySample};
pub use noise_model::{build_noisy_circuit, depolarization_pairs, NoiseKind, NoiseModel};
pub use oracle::{
    fock_operator, gauss_hermite, kraus_oracle, kraus_oracle_noisy, ORACLE_MAX_MODES,
    ORACLE_MAX_PHOTONS, QUADRATURE_NODES,
};
pub(crate) use plan::Plan;
pub use run::{run_noisy_circuit, run_trajectories, Execution, RunConfig, BATCH_SIZE};
pub(crate) use run::map_batches;
