use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuits::{OpticalCircuit, PlacedElement};
use crate::engine::{kraus_oracle_noisy, run_noisy_circuit, DensityMatrix, Execution, Normalization, RunConfig};
use crate::error::Result;
use crate::fock::{DualRailMap, Occupation};

/// Largest tolerated deviation in standard errors.
pub const VALIDATION_MAX_Z: f64 = 3.0;
/// Largest tolerated absolute deviation of a density-matrix entry.
pub const VALIDATION_MAX_ABS: f64 = 0.01;

fn one_qubit(input: [u8; 2]) -> OpticalCircuit {
    let mut c = OpticalCircuit::new(2);
    c.input = Occupation::new(input.to_vec());
    c.qubit_map = DualRailMap::consecutive(1);
    c
}

/// Two-mode circuits with one noisy element each: a lossy phase shifter
/// after a balanced splitter, a lossy beam splitter, and a depolarization
/// layer followed by a splitter.
pub fn validation_circuits(p: f64) -> Vec<(&'static str, OpticalCircuit)> {
    let mut ps = one_qubit([0, 1]);
    ps.push(PlacedElement::bs(0, 1, PI / 2.0, 0.0));
    ps.push(PlacedElement::ps(1, 0.8).with_loss(p));
    let mut bs = one_qubit([1, 0]);
    bs.push(PlacedElement::bs(0, 1, 1.3, 0.4).with_loss(p));
    let mut dep = one_qubit([1, 0]);
    dep.push(PlacedElement::depolarization(0, 1, p));
    dep.push(PlacedElement::bs(0, 1, 0.7, 0.0));
    vec![("lossy-phase-shifter", ps), ("lossy-beam-splitter", bs), ("depolarization", dep)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCase {
    pub name: String,
    /// Largest entry deviation in units of its standard error.
    pub max_z: f64,
    pub max_abs: f64,
    pub passed: bool,
}

/// Largest deviation of `mc` from `exact`, in standard errors and absolute.
pub fn compare_to_exact(mc: &DensityMatrix, exact: &DensityMatrix) -> (f64, f64) {
    let (mut z, mut abs) = (0.0f64, 0.0f64);
    for i in 0..mc.dim() {
        for j in 0..mc.dim() {
            let d = (mc.entries[(i, j)] - exact.entries[(i, j)]).norm();
            abs = abs.max(d);
            if d > 1e-15 {
                z = z.max(d / mc.entry_stderr(i, j));
            }
        }
    }
    (z, abs)
}

/// Trajectory averages of [`validation_circuits`] against the quadrature
/// oracle.
pub fn run_validation(p: f64, n_samples: usize, seed: u64, execution: Execution) -> Result<Vec<ValidationCase>> {
    let cfg = RunConfig::new(n_samples, seed).with_execution(execution);
    validation_circuits(p)
        .into_iter()
        .map(|(name, c)| {
            let mc = run_noisy_circuit(&c, &cfg)?;
            let exact = kraus_oracle_noisy(&c, Normalization::None)?;
            let (max_z, max_abs) = compare_to_exact(&mc, &exact);
            Ok(ValidationCase {
                name: name.to_string(),
                max_z,
                max_abs,
                passed: max_z <= VALIDATION_MAX_Z && max_abs <= VALIDATION_MAX_ABS,
            })
        })
        .collect()
}
