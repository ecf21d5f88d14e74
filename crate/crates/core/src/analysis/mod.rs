//! Readout metrics and the sweep orchestration behind the command line.

mod metrics;
mod sweep;
mod validate;

pub use metrics::{fidelity_from_hellinger, hellinger, hellinger_diag, hellinger_stderr};
pub use sweep::{
    median_stderr, read_rows_csv, run_sweep, write_rows_csv, Experiment, Float, SweepResult,
    SweepRow, SweepSpec, CSV_HEADER,
};
pub use validate::{
    compare_to_exact, run_validation, validation_circuits, ValidationCase, VALIDATION_MAX_ABS,
    VALIDATION_MAX_Z,
};
