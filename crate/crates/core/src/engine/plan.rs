use nalgebra::DMatrix;

use crate::circuits::{bs_matrix, ps_matrix, ElementKind, OpticalCircuit};
use crate::engine::density::TrajectorySample;
use crate::error::{Error, Result};
use crate::fock::{apply_block_rows, matching_occupations, FockVector, ModeTransfer, Occupation};
use crate::noise::{
    depolarization_block, epsilon_from_p, traced_bs_block, traced_phase_entry, BeamSplitterDraw,
    DepolarizingDraw, LossDraw,
};
use crate::rng::TrajectoryStream;
use crate::C64;

#[derive(Debug, Clone)]
enum Step {
    Fixed { block: DMatrix<C64>, modes: Vec<usize> },
    NoisyPs { theta: f64, eps: f64, mode: usize },
    NoisyBs { theta: f64, phi: f64, eps: f64, modes: [usize; 2] },
    Dep { eps: f64, modes: [usize; 2] },
    Loss { eps: f64, mode: usize },
}

/// Circuit with noise strengths resolved, ready to draw one traced transfer
/// per trajectory. Step `k` draws from element window `offset + k`.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    mode_count: usize,
    steps: Vec<Step>,
}

impl Plan {
    pub fn compile(circuit: &OpticalCircuit) -> Result<Plan> {
        circuit.validate()?;
        let mut steps = Vec::with_capacity(circuit.elements.len());
        for e in &circuit.elements {
            let step = match e.kind {
                ElementKind::PhaseShifter { theta } if e.is_noisy() => Step::NoisyPs {
                    theta,
                    eps: epsilon_from_p(e.loss_p)?,
                    mode: e.modes[0],
                },
                ElementKind::BeamSplitter { theta, phi } if e.is_noisy() => Step::NoisyBs {
                    theta,
                    phi,
                    eps: epsilon_from_p(e.loss_p)?,
                    modes: [e.modes[0], e.modes[1]],
                },
                ElementKind::PhaseShifter { theta } => Step::Fixed {
                    block: ps_matrix(theta).into_matrix(),
                    modes: e.modes.clone(),
                },
                ElementKind::BeamSplitter { theta, phi } => Step::Fixed {
                    block: bs_matrix(theta, phi).into_matrix(),
                    modes: e.modes.clone(),
                },
                ElementKind::Depolarization => Step::Dep {
                    eps: epsilon_from_p(e.loss_p)?,
                    modes: [e.modes[0], e.modes[1]],
                },
                ElementKind::Loss => Step::Loss {
                    eps: epsilon_from_p(e.loss_p)?,
                    mode: e.modes[0],
                },
            };
            steps.push(step);
        }
        Ok(Plan {
            mode_count: circuit.mode_count,
            steps,
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Left-multiply `m` by this trajectory's traced element matrices.
    pub fn apply(&self, m: &mut DMatrix<C64>, stream: &TrajectoryStream, offset: u64) {
        for (k, step) in self.steps.iter().enumerate() {
            let idx = offset + k as u64;
            match step {
                Step::Fixed { block, modes } => apply_block_rows(m, block, modes),
                Step::NoisyPs { theta, eps, mode } => {
                    let draw = crate::noise::draw_ics(*theta, &mut stream.element(idx));
                    let f = traced_phase_entry(*theta, *eps, draw);
                    scale_row(m, *mode, f);
                }
                Step::NoisyBs { theta, phi, eps, modes } => {
                    let draw = BeamSplitterDraw::sample(*theta, &mut stream.element(idx));
                    let b = traced_bs_block(*theta, *phi, *eps, *eps, &draw);
                    apply_block_rows(m, &b, modes);
                }
                Step::Dep { eps, modes } => {
                    let draw = DepolarizingDraw::sample(&mut stream.element(idx));
                    apply_block_rows(m, &depolarization_block(*eps, &draw), modes);
                }
                Step::Loss { eps, mode } => {
                    let draw = LossDraw::sample(&mut stream.element(idx));
                    scale_row(m, *mode, C64::new((eps * draw.w).cos(), 0.0));
                }
            }
        }
    }

    /// This trajectory's traced transfer of the whole circuit.
    pub fn sample_transfer(&self, stream: &TrajectoryStream, offset: u64) -> ModeTransfer {
        let mut m = DMatrix::identity(self.mode_count, self.mode_count);
        self.apply(&mut m, stream, offset);
        ModeTransfer::from_parts(m, true)
    }
}

fn scale_row(m: &mut DMatrix<C64>, row: usize, f: C64) {
    for j in 0..m.ncols() {
        m[(row, j)] *= f;
    }
}

/// Output occupations a trajectory is projected onto.
#[derive(Debug, Clone)]
pub(crate) struct Projection {
    input: FockVector,
    outputs: Vec<Occupation>,
    /// Decoded basis index of each output, `None` outside the dual-rail
    /// subspace.
    dual_index: Vec<Option<usize>>,
    heralded: bool,
    dim: usize,
}

impl Projection {
    pub fn new(circuit: &OpticalCircuit) -> Result<Projection> {
        let m = circuit.mode_count;
        let photons = circuit.input.photons();
        let map = &circuit.qubit_map;
        let mut is_qubit_mode = vec![false; m];
        for &(a, b) in map.pairs() {
            if circuit.herald[a].is_some() || circuit.herald[b].is_some() {
                return Err(Error::Config(format!(
                    "qubit modes ({a}, {b}) cannot carry a herald constraint"
                )));
            }
            is_qubit_mode[a] = true;
            is_qubit_mode[b] = true;
        }
        let heralded = circuit.herald.iter().any(Option::is_some);
        let dim = map.dim();
        let decode = |occ: &Occupation| -> Option<usize> {
            let c = occ.counts();
            if (0..m).any(|k| !is_qubit_mode[k] && circuit.herald[k].is_none() && c[k] != 0) {
                return None;
            }
            let mut b = 0;
            for &(r0, r1) in map.pairs() {
                match (c[r0], c[r1]) {
                    (1, 0) => b <<= 1,
                    (0, 1) => b = (b << 1) | 1,
                    _ => return None,
                }
            }
            Some(b)
        };
        let outputs: Vec<Occupation> = if heralded {
            matching_occupations(&circuit.herald, photons)
        } else {
            (0..dim)
                .map(|b| map.basis_occupation(b, m))
                .filter(|o| o.photons() == photons)
                .collect()
        };
        let dual_index = outputs.iter().map(decode).collect();
        Ok(Projection {
            input: FockVector::basis(circuit.input.clone()),
            outputs,
            dual_index,
            heralded,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, m: &ModeTransfer) -> Result<TrajectorySample> {
        let amps = self.input.amplitudes_onto(m, &self.outputs)?;
        let total = self.input.evolved_norm_sqr(m)?;
        let mut psi = vec![C64::new(0.0, 0.0); self.dim];
        let mut kept = 0.0;
        for (a, idx) in amps.iter().zip(&self.dual_index) {
            kept += a.norm_sqr();
            if let Some(b) = idx {
                psi[*b] = *a;
            }
        }
        Ok(TrajectorySample::single(
            psi,
            total,
            if self.heralded { kept } else { total },
        ))
    }
}
