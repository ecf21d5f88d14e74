use std::f64::consts::PI;

use rand::Rng;

use crate::circuits::{OpticalCircuit, PlacedElement};
use crate::engine::{
    build_noisy_circuit, map_batches, DensityMatrix, Moments, NoiseModel, Plan, RunConfig,
    TrajectorySample,
};
use crate::error::Result;
use crate::fock::{matching_occupations, FockVector, ModePattern, ModeTransfer, Occupation};
use crate::analysis::{hellinger, hellinger_stderr};
use crate::gbqc::{transpile, ExperimentOutcome, Gate, QubitCircuit};
use crate::mbqc::measure::{
    measure_dual_rail, BasisRule, DualRailRegister, MeasurementBasis, MeasurementStep,
};
use crate::rng::{TrajectoryStream, AUX_ELEMENT_BASE};
use crate::C64;

/// Qubit carrying the input, measured first in the X basis.
pub const INPUT_QUBIT: usize = 0;
/// Middle qubit, measured in the adapted XY basis.
pub const MIDDLE_QUBIT: usize = 1;
/// Qubit holding the result.
pub const OUTPUT_QUBIT: usize = 2;

/// Three-qubit linear cluster `CZ₁₂ CZ₀₁ (|0⟩|+⟩|+⟩)` with heralded
/// entangling gates, the whole linear network in triangular form.
pub fn cluster_x_circuit() -> Result<OpticalCircuit> {
    let mut qc = QubitCircuit::new(3);
    qc.push(Gate::H(MIDDLE_QUBIT))
        .push(Gate::H(OUTPUT_QUBIT))
        .push(Gate::Cz(INPUT_QUBIT, MIDDLE_QUBIT))
        .push(Gate::Cz(MIDDLE_QUBIT, OUTPUT_QUBIT));
    transpile(&qc)
}

/// Measurement pattern of the X gate: X on the input qubit, then the middle
/// qubit in the XY plane at `(−1)^{1+s₁}π`.
pub fn x_gate_pattern() -> [MeasurementStep; 2] {
    [
        MeasurementStep {
            qubit: INPUT_QUBIT,
            rule: BasisRule::X,
        },
        MeasurementStep {
            qubit: MIDDLE_QUBIT,
            rule: BasisRule::Xy {
                alpha: PI,
                depends_on: Some(0),
            },
        },
    ]
}

/// Byproduct correction `Z^{s₁} X^{s₂}` on the output amplitudes.
pub fn correct(amps: [C64; 2], s1: u8, s2: u8) -> [C64; 2] {
    let [mut a0, mut a1] = amps;
    if s2 & 1 == 1 {
        std::mem::swap(&mut a0, &mut a1);
    }
    if s1 & 1 == 1 {
        a1 = -a1;
    }
    [a0, a1]
}

/// One outcome sequence of the noiseless pattern.
#[derive(Debug, Clone)]
pub struct BranchRecord {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub conditional_state: FockVector,
    /// Output-qubit amplitudes after the byproduct correction.
    pub corrected: [C64; 2],
}

/// Enumerate every outcome branch of the noiseless X-gate pattern. The
/// cluster state is heralded first; branch probabilities are unnormalized,
/// so they sum to the herald probability.
pub fn enumerate_branches() -> Result<Vec<BranchRecord>> {
    let prep = cluster_x_circuit()?;
    let photons = prep.input.photons();
    let outputs = matching_occupations(&prep.herald, photons);
    let amps = FockVector::basis(prep.input.clone()).amplitudes_onto(&prep.transfer()?, &outputs)?;
    let state = FockVector::from_terms(
        prep.mode_count,
        outputs.into_iter().zip(amps).filter(|(_, a)| a.norm_sqr() > 0.0),
    )?;
    let reg = DualRailRegister::new(state, prep.qubit_map.clone());
    let pattern = x_gate_pattern();
    let mut records = Vec::new();
    for (s1, _, after1) in measure_dual_rail(&reg, pattern[0].qubit, pattern[0].resolve(&[])?)? {
        let basis = pattern[1].resolve(&[s1])?;
        for (s2, p, after2) in measure_dual_rail(&after1, pattern[1].qubit, basis)? {
            let corrected = correct(after2.qubit_amplitudes(OUTPUT_QUBIT), s1, s2);
            records.push(BranchRecord {
                outcomes: vec![s1, s2],
                probability: p,
                conditional_state: after2.state,
                corrected,
            });
        }
    }
    Ok(records)
}

/// How measurement outcomes are handled per trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchMode {
    /// Draw one outcome per measurement, Born-weighted, and reweight by the
    /// inverse sampling probability.
    #[default]
    Sample,
    /// Sum all outcome branches in every trajectory.
    Enumerate,
}

/// Compiled noisy X-gate pattern.
struct Program {
    stage_a: Plan,
    stage_a_len: u64,
    /// Basis change and detection of the middle qubit, per first outcome.
    stage_b: [Plan; 2],
    input: FockVector,
    kept_outputs: Vec<Occupation>,
    /// Stage-A outputs per first outcome, middle and output qubits free.
    first_outputs: [Vec<Occupation>; 2],
    /// `final_outputs[s1][s2][b]`
    final_outputs: [[[Occupation; 2]; 2]; 2],
}

fn pair_counts(bit: u8) -> (u8, u8) {
    if bit == 0 { (1, 0) } else { (0, 1) }
}

impl Program {
    fn new(noise: &NoiseModel) -> Result<Self> {
        noise.validate()?;
        let prep = cluster_x_circuit()?;
        let m = prep.mode_count;
        let pairs = prep.qubit_map.pairs().to_vec();
        let (i0, i1) = pairs[INPUT_QUBIT];
        let (m0, m1) = pairs[MIDDLE_QUBIT];
        let (o0, o1) = pairs[OUTPUT_QUBIT];
        let p_det = noise.effective_detect();
        let p_el = noise.effective_element();

        let mut a = prep.clone();
        a.elements.extend(MeasurementBasis::X.elements(i0, i1));
        let mut no_detect = *noise;
        no_detect.detect_enabled = false;
        let mut a = build_noisy_circuit(&a, &no_detect)?;
        if p_det > 0.0 {
            for mode in (0..m).filter(|&k| k != m0 && k != m1) {
                a.push(PlacedElement::loss(mode, p_det));
            }
        }
        let stage_b = [0u8, 1].map(|s1| {
            let basis = x_gate_pattern()[1].resolve(&[s1]).expect("first outcome is known");
            let mut b = OpticalCircuit::new(m);
            for e in basis.elements(m0, m1) {
                b.push(if p_el > 0.0 { e.with_loss(p_el) } else { e });
            }
            if p_det > 0.0 {
                b.push(PlacedElement::loss(m0, p_det));
                b.push(PlacedElement::loss(m1, p_det));
            }
            Plan::compile(&b)
        });
        let [b0, b1] = stage_b;

        let photons = prep.input.photons();
        let with = |base: &ModePattern, sets: &[(usize, usize, u8)]| {
            let mut p = base.clone();
            for &(r0, r1, bit) in sets {
                let (c0, c1) = pair_counts(bit);
                p[r0] = Some(c0);
                p[r1] = Some(c1);
            }
            p
        };
        let first_outputs = [0u8, 1].map(|s1| matching_occupations(&with(&prep.herald, &[(i0, i1, s1)]), photons));
        let final_outputs = [0u8, 1].map(|s1| {
            [0u8, 1].map(|s2| {
                [0u8, 1].map(|b| {
                    let p = with(&prep.herald, &[(i0, i1, s1), (m0, m1, s2), (o0, o1, b)]);
                    Occupation::new(p.into_iter().map(|c| c.unwrap_or(0)).collect())
                })
            })
        });
        let stage_a = Plan::compile(&a)?;
        Ok(Program {
            stage_a_len: stage_a.len() as u64,
            stage_a,
            stage_b: [b0?, b1?],
            input: FockVector::basis(prep.input.clone()),
            kept_outputs: matching_occupations(&prep.herald, photons),
            first_outputs,
            final_outputs,
        })
    }

    fn weight(&self, m: &ModeTransfer, outputs: &[Occupation]) -> Result<f64> {
        Ok(self.input.amplitudes_onto(m, outputs)?.iter().map(|a| a.norm_sqr()).sum())
    }

    fn trajectory(&self, seed: u64, index: u64, mode: BranchMode) -> Result<TrajectorySample> {
        let stream = TrajectoryStream::new(seed, index);
        let ma = self.stage_a.sample_transfer(&stream, 0);
        let total = self.input.evolved_norm_sqr(&ma)?;
        let kept = self.weight(&ma, &self.kept_outputs)?;
        let mut branches = Vec::new();

        let first: Vec<(u8, f64)> = match mode {
            BranchMode::Enumerate => vec![(0, 1.0), (1, 1.0)],
            BranchMode::Sample => {
                let w = [
                    self.weight(&ma, &self.first_outputs[0])?,
                    self.weight(&ma, &self.first_outputs[1])?,
                ];
                match sample_bit(w, &stream, 0) {
                    Some(pick) => vec![pick],
                    None => vec![],
                }
            }
        };
        for (s1, q1) in first {
            let mut mb = ma.matrix().clone();
            self.stage_b[s1 as usize].apply(&mut mb, &stream, self.stage_a_len);
            let mb = ModeTransfer::from_parts(mb, true);
            let psi: [Vec<C64>; 2] = [0usize, 1].map(|s2| {
                self.input
                    .amplitudes_onto(&mb, &self.final_outputs[s1 as usize][s2])
                    .expect("photon number checked when compiling")
            });
            let second: Vec<(u8, f64)> = match mode {
                BranchMode::Enumerate => vec![(0, 1.0), (1, 1.0)],
                BranchMode::Sample => {
                    let w = psi.clone().map(|v| v.iter().map(|a| a.norm_sqr()).sum::<f64>());
                    sample_bit(w, &stream, 1).into_iter().collect()
                }
            };
            for (s2, q2) in second {
                let v = &psi[s2 as usize];
                let scale = 1.0 / (q1 * q2).sqrt();
                let c = correct([v[0], v[1]], s1, s2);
                branches.push(vec![c[0] * scale, c[1] * scale]);
            }
        }
        if branches.is_empty() {
            branches.push(vec![C64::new(0.0, 0.0); 2]);
        }
        Ok(TrajectorySample {
            branches,
            total,
            kept,
        })
    }
}

/// Draw a bit with probabilities proportional to `w`; `None` when both
/// weights vanish.
fn sample_bit(w: [f64; 2], stream: &TrajectoryStream, k: u64) -> Option<(u8, f64)> {
    let sum = w[0] + w[1];
    if sum <= 0.0 {
        return None;
    }
    let u: f64 = stream.element(AUX_ELEMENT_BASE + k).random();
    let bit = if u * sum < w[0] { 0 } else { 1 };
    Some((bit, w[bit as usize] / sum))
}

/// Trajectory average of the corrected output qubit of the noisy X-gate
/// pattern on logical `|0⟩`.
pub fn run_mbqc_x(noise: &NoiseModel, cfg: &RunConfig) -> Result<DensityMatrix> {
    run_mbqc_x_with(noise, cfg, BranchMode::Sample)
}

pub fn run_mbqc_x_with(noise: &NoiseModel, cfg: &RunConfig, mode: BranchMode) -> Result<DensityMatrix> {
    cfg.validate()?;
    let program = Program::new(noise)?;
    let moments = map_batches(
        cfg.n_samples,
        cfg.execution,
        |range| {
            let mut m = Moments::new(2);
            for i in range {
                m.push(&program.trajectory(cfg.master_seed, i as u64, mode)?);
            }
            Ok(m)
        },
        |a, b| a.merge(&b),
    )?;
    DensityMatrix::from_moments(moments, cfg.normalize, cfg.master_seed)
}

/// Noisy X-gate pattern compared against its noiseless output.
pub fn mbqc_x_experiment(noise: &NoiseModel, cfg: &RunConfig) -> Result<ExperimentOutcome> {
    let ideal = run_mbqc_x(
        &NoiseModel::noiseless(),
        &RunConfig::new(1, cfg.master_seed).normalized(cfg.normalize),
    )?;
    let rho = run_mbqc_x(noise, cfg)?;
    Ok(ExperimentOutcome {
        hellinger: hellinger(&rho, &ideal)?,
        hellinger_stderr: hellinger_stderr(&rho, &ideal)?,
        rho,
        ideal,
    })
}
