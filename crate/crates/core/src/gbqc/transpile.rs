use crate::analysis::{hellinger, hellinger_stderr};
use crate::circuits::{reck_decompose, OpticalCircuit};
use crate::engine::{run_trajectories, DensityMatrix, NoiseModel, Normalization, RunConfig};
use crate::error::Result;
use crate::fock::{DualRailMap, Occupation};
use crate::gbqc::gates::{single_qubit_block, GateBlock, SingleQubit};
use crate::gbqc::{CzRealization, Gate, KnillCz, QubitCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranspileOptions {
    /// Replace the element list by the triangular decomposition of the whole
    /// linear network (ancilla modes included).
    pub reck: bool,
}

impl Default for TranspileOptions {
    fn default() -> Self {
        TranspileOptions { reck: true }
    }
}

/// Dual-rail optical circuit for `qc` with the default options and the
/// heralded Knill-style controlled-Z. Qubit `q` sits on modes `(2q, 2q+1)`;
/// ancilla modes of each entangling gate are appended in gate order.
pub fn transpile(qc: &QubitCircuit) -> Result<OpticalCircuit> {
    transpile_with(qc, TranspileOptions::default(), &KnillCz)
}

pub fn transpile_with(
    qc: &QubitCircuit,
    opts: TranspileOptions,
    cz: &dyn CzRealization,
) -> Result<OpticalCircuit> {
    qc.validate()?;
    let q = qc.qubits;
    let cz_block = cz.cz_block();
    let mut blocks: Vec<(GateBlock, Vec<usize>)> = Vec::new();
    for g in &qc.gates {
        match *g {
            Gate::X(t) => blocks.push((single_qubit_block(SingleQubit::X), vec![t])),
            Gate::H(t) => blocks.push((single_qubit_block(SingleQubit::H), vec![t])),
            Gate::Cz(a, b) => blocks.push((cz_block.clone(), vec![a, b])),
            Gate::Cx(c, t) => {
                blocks.push((single_qubit_block(SingleQubit::H), vec![t]));
                blocks.push((cz_block.clone(), vec![c, t]));
                blocks.push((single_qubit_block(SingleQubit::H), vec![t]));
            }
        }
    }
    let ancillas: usize = blocks.iter().map(|(b, _)| b.ancilla_modes()).sum();
    let m = 2 * q + ancillas;
    let map = DualRailMap::consecutive(q);
    let mut counts = map.basis_occupation(0, m).counts().to_vec();
    let mut herald = vec![None; m];
    let mut circuit = OpticalCircuit::new(m);
    let mut next_ancilla = 2 * q;
    for (block, targets) in &blocks {
        let mut relabel: Vec<usize> = targets.iter().flat_map(|&t| [2 * t, 2 * t + 1]).collect();
        for k in 0..block.ancilla_modes() {
            let mode = next_ancilla + k;
            relabel.push(mode);
            counts[mode] = block.ancilla_input[k];
            herald[mode] = Some(block.ancilla_herald[k]);
        }
        next_ancilla += block.ancilla_modes();
        circuit.extend_relabeled(&block.elements, &relabel);
    }
    circuit.input = Occupation::new(counts);
    circuit.herald = herald;
    circuit.qubit_map = map;
    if opts.reck {
        let t = circuit.transfer()?;
        circuit.elements = reck_decompose(&t)?.elements;
    }
    circuit.validate()?;
    Ok(circuit)
}

/// Copy of `circuit` whose qubits start in computational basis state `b`
/// (ancilla inputs unchanged).
pub fn with_logical_input(circuit: &OpticalCircuit, b: usize) -> OpticalCircuit {
    let mut out = circuit.clone();
    let mut counts = out.input.counts().to_vec();
    let basis = circuit.qubit_map.basis_occupation(b, circuit.mode_count);
    for &(r0, r1) in circuit.qubit_map.pairs() {
        counts[r0] = basis.counts()[r0];
        counts[r1] = basis.counts()[r1];
    }
    out.input = Occupation::new(counts);
    out
}

/// Noisy output of a gate-based circuit and its distance to the ideal one.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rho: DensityMatrix,
    pub ideal: DensityMatrix,
    pub hellinger: f64,
    pub hellinger_stderr: f64,
}

/// Run `circuit` under `noise` and compare against its noiseless output.
/// The configured normalization applies to both runs.
pub fn run_experiment(
    circuit: &OpticalCircuit,
    noise: &NoiseModel,
    cfg: &RunConfig,
) -> Result<ExperimentOutcome> {
    let ideal = run_trajectories(
        circuit,
        &NoiseModel::noiseless(),
        &RunConfig::new(1, cfg.master_seed).normalized(cfg.normalize),
    )?;
    let rho = run_trajectories(circuit, noise, cfg)?;
    Ok(ExperimentOutcome {
        hellinger: hellinger(&rho, &ideal)?,
        hellinger_stderr: hellinger_stderr(&rho, &ideal)?,
        rho,
        ideal,
    })
}

/// Single X gate on logical `|0⟩`.
pub fn x_gate_experiment(noise: &NoiseModel, cfg: &RunConfig) -> Result<ExperimentOutcome> {
    run_experiment(&crate::gbqc::x_gate_circuit(), noise, cfg)
}

/// Bell-state preparation: transpiled `H(0)·CX(0,1)` on `|00⟩` with
/// depolarization layers on the ancilla pairs as well.
pub fn bell_experiment(noise: &NoiseModel, cfg: &RunConfig) -> Result<ExperimentOutcome> {
    run_experiment(&transpile(&QubitCircuit::bell())?, noise, cfg)
}

/// The herald-normalized configuration used by the gate-based experiments.
pub fn heralded(cfg: RunConfig) -> RunConfig {
    cfg.normalized(Normalization::Herald)
}
