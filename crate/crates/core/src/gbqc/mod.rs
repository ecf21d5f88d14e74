//! Dual-rail gate library, qubit-to-optics transpiler and the gate-based
//! noise experiments.

mod gates;
mod qubit_circuit;
mod transpile;

pub use gates::{
    h_gate_block, nonlinear_sign_matrix, x_gate_block, x_gate_circuit, CzRealization, GateBlock,
    KnillCz,
};
pub use qubit_circuit::{Gate, QubitCircuit};
pub use transpile::{
    bell_experiment, heralded, run_experiment, transpile, transpile_with, with_logical_input,
    x_gate_experiment, ExperimentOutcome, TranspileOptions,
};
