use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;

use crate::circuits::{reck_decompose, OpticalCircuit, PlacedElement};
use crate::fock::{DualRailMap, ModeTransfer, Occupation};
use crate::C64;

/// Elements on local modes plus the ancilla resources a gate needs.
///
/// Local modes `0..2k` are the rails of the `k` qubits, pairwise; ancilla
/// modes follow.
#[derive(Debug, Clone, PartialEq)]
pub struct GateBlock {
    pub qubits: usize,
    pub elements: Vec<PlacedElement>,
    pub ancilla_input: Vec<u8>,
    pub ancilla_herald: Vec<u8>,
}

impl GateBlock {
    pub fn mode_count(&self) -> usize {
        2 * self.qubits + self.ancilla_input.len()
    }

    pub fn ancilla_modes(&self) -> usize {
        self.ancilla_input.len()
    }

    /// Standalone circuit for the block with the given logical basis input.
    pub fn circuit(&self, basis_input: usize) -> OpticalCircuit {
        let m = self.mode_count();
        let map = DualRailMap::consecutive(self.qubits);
        let mut counts = map.basis_occupation(basis_input, m).counts().to_vec();
        let mut herald = vec![None; m];
        for (k, (&n, &h)) in self.ancilla_input.iter().zip(&self.ancilla_herald).enumerate() {
            counts[2 * self.qubits + k] = n;
            herald[2 * self.qubits + k] = Some(h);
        }
        OpticalCircuit {
            mode_count: m,
            elements: self.elements.clone(),
            input: Occupation::new(counts),
            herald,
            qubit_map: map,
        }
    }
}

/// `BS(π, 0)` on one mode pair: `[[0, i], [i, 0]]`, the X gate up to a
/// global phase.
pub fn x_gate_block() -> GateBlock {
    GateBlock {
        qubits: 1,
        elements: vec![PlacedElement::bs(0, 1, PI, 0.0)],
        ancilla_input: vec![],
        ancilla_herald: vec![],
    }
}

/// Two modes, one beam splitter, logical `|0⟩` input.
pub fn x_gate_circuit() -> OpticalCircuit {
    x_gate_block().circuit(0)
}

/// `BS(π/2, π/2)` followed by `PS(π)` on the second rail. The dual-rail
/// action is exactly the real Hadamard matrix.
pub fn h_gate_block() -> Vec<PlacedElement> {
    vec![
        PlacedElement::bs(0, 1, FRAC_PI_2, FRAC_PI_2),
        PlacedElement::ps(1, PI),
    ]
}

fn h_block() -> GateBlock {
    GateBlock {
        qubits: 1,
        elements: h_gate_block(),
        ancilla_input: vec![],
        ancilla_herald: vec![],
    }
}

/// Nonlinear sign shift on (signal, ancilla, ancilla): with one ancilla
/// photon in the first ancilla mode and the herald pattern `(1, 0)`, the
/// signal's 0-, 1- and 2-photon components pick up amplitudes `½, ½, −½`.
pub fn nonlinear_sign_matrix() -> ModeTransfer {
    let r2 = 2f64.sqrt();
    let a = 2f64.powf(-0.25);
    let b = (3.0 / r2 - 2.0).sqrt();
    let c = 0.5 - 1.0 / r2;
    let m = DMatrix::from_row_slice(
        3,
        3,
        &[1.0 - r2, a, b, a, 0.5, c, b, c, r2 - 0.5],
    )
    .map(|x| C64::new(x, 0.0));
    ModeTransfer::unitary(m).expect("sign-shift matrix is orthogonal")
}

/// Construction of a controlled-Z on two dual-rail qubits.
pub trait CzRealization: Send + Sync {
    fn cz_block(&self) -> GateBlock;
}

/// Heralded controlled-Z from two nonlinear sign shifts between balanced
/// splitters on the `|1⟩` rails. Four ancilla modes, two ancilla photons,
/// success probability 1/16 for every input.
#[derive(Debug, Clone, Copy, Default)]
pub struct KnillCz;

impl CzRealization for KnillCz {
    fn cz_block(&self) -> GateBlock {
        let ns = reck_decompose(&nonlinear_sign_matrix())
            .expect("sign-shift matrix is unitary")
            .elements;
        let mut elements = vec![PlacedElement::bs(1, 3, FRAC_PI_2, 0.0)];
        elements.extend(ns.iter().map(|e| e.relabeled(&[1, 4, 5])));
        elements.extend(ns.iter().map(|e| e.relabeled(&[3, 6, 7])));
        elements.push(PlacedElement::bs(1, 3, -FRAC_PI_2, 0.0));
        GateBlock {
            qubits: 2,
            elements,
            ancilla_input: vec![1, 0, 1, 0],
            ancilla_herald: vec![1, 0, 1, 0],
        }
    }
}

pub(crate) fn single_qubit_block(kind: SingleQubit) -> GateBlock {
    match kind {
        SingleQubit::X => x_gate_block(),
        SingleQubit::H => h_block(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SingleQubit {
    X,
    H,
}
