use std::f64::consts::FRAC_PI_2;

use crate::circuits::{OpticalCircuit, PlacedElement};
use crate::error::{Error, Result};
use crate::fock::{DualRailMap, Occupation};

/// Parametrized dual-rail circuit optimized by the variational loop.
pub trait Ansatz: Sync {
    fn qubits(&self) -> usize;
    fn n_params(&self) -> usize;
    fn circuit(&self, params: &[f64]) -> Result<OpticalCircuit>;
}

/// Rail rotations `BS(θ_q, 0)` on every qubit, a ring of `BS(π/2, 0)`
/// couplers between the second rail of each qubit and the first rail of
/// the next, then a second rotation layer. Parameters are ordered first
/// layer, then second layer. The couplers move photons between qubits, so
/// the output is only meaningful after dual-rail postselection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingAnsatz {
    pub qubits: usize,
    pub entangle: bool,
}

impl Default for RingAnsatz {
    fn default() -> Self {
        RingAnsatz {
            qubits: 4,
            entangle: true,
        }
    }
}

impl Ansatz for RingAnsatz {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn n_params(&self) -> usize {
        2 * self.qubits
    }

    fn circuit(&self, params: &[f64]) -> Result<OpticalCircuit> {
        let q = self.qubits;
        if params.len() != self.n_params() {
            return Err(Error::Config(format!(
                "ansatz takes {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        if self.entangle && q < 2 {
            return Err(Error::Config("the coupler ring needs at least two qubits".into()));
        }
        let m = 2 * q;
        let mut c = OpticalCircuit::new(m);
        c.qubit_map = DualRailMap::consecutive(q);
        c.input = Occupation::new((0..m).map(|k| (k % 2 == 0) as u8).collect());
        for (k, &t) in params[..q].iter().enumerate() {
            c.push(PlacedElement::bs(2 * k, 2 * k + 1, t, 0.0));
        }
        if self.entangle {
            for k in 0..q {
                c.push(PlacedElement::bs(2 * k + 1, (2 * k + 2) % m, FRAC_PI_2, 0.0));
            }
        }
        for (k, &t) in params[q..].iter().enumerate() {
            c.push(PlacedElement::bs(2 * k, 2 * k + 1, t, 0.0));
        }
        c.validate()?;
        Ok(c)
    }
}
