//! Measurement-based computation on dual-rail cluster states: adaptive
//! single-qubit measurements, byproduct corrections and the noisy X-gate
//! pattern on a three-qubit linear cluster.

mod cluster;
mod measure;

pub use cluster::{
    cluster_x_circuit, correct, enumerate_branches, mbqc_x_experiment, run_mbqc_x, run_mbqc_x_with, x_gate_pattern,
    BranchMode, BranchRecord, INPUT_QUBIT, MIDDLE_QUBIT, OUTPUT_QUBIT,
};
pub use measure::{
    measure_dual_rail, rotation_angle, BasisRule, DualRailRegister, MeasurementBasis,
    MeasurementStep,
};
