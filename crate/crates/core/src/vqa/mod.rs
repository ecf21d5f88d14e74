//! Variational MAX-CUT on a noisy photonic ansatz.

mod ansatz;
mod cost;
mod optimizer;
mod run;

pub use ansatz::{Ansatz, RingAnsatz};
pub use cost::{
    approximation_ratio, energy, energy_stderr, maxcut_cost, relative_error, CostOperator, Graph, MAX_VERTICES,
};
pub use optimizer::{Minimum, NelderMead, Optimizer, Termination};
pub use run::{
    evaluate_energy, evaluate_energy_with_stderr, median, optimize, optimize_with, run_vqa, OptimizationRun, OptimizeConfig,
    ScenarioSummary, TraceStep, VqaConfig, VqaReport, VqaRunRecord,
};
