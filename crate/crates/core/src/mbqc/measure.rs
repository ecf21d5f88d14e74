use std::collections::BTreeMap;

use crate::circuits::{OpticalCircuit, PlacedElement};
use crate::error::{Error, Result};
use crate::fock::{DualRailMap, FockVector, ModeTransfer, Occupation};
use crate::gbqc::h_gate_block;
use crate::C64;

/// `(−1)^{1+s₁}·α`: the adapted measurement angle that realizes an X-axis
/// rotation by `α` given the first outcome.
pub fn rotation_angle(alpha: f64, s1: u8) -> f64 {
    if s1 & 1 == 0 {
        -alpha
    } else {
        alpha
    }
}

/// Measurement basis with its angle already fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementBasis {
    X,
    /// Eigenbasis of `cos θ·X + sin θ·Y`.
    Xy(f64),
}

impl MeasurementBasis {
    /// Basis change on the pair `(r0, r1)` that maps the measurement basis
    /// onto the computational basis: `H` for X, `PS(−θ)` on `r1` then `H`
    /// for the XY plane.
    pub fn elements(&self, r0: usize, r1: usize) -> Vec<PlacedElement> {
        let h: Vec<PlacedElement> = h_gate_block().iter().map(|e| e.relabeled(&[r0, r1])).collect();
        match *self {
            MeasurementBasis::X => h,
            MeasurementBasis::Xy(theta) => {
                let mut v = vec![PlacedElement::ps(r1, -theta)];
                v.extend(h);
                v
            }
        }
    }
}

/// How a step chooses its basis from earlier outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisRule {
    X,
    /// XY-plane angle `α`, sign-adapted with [`rotation_angle`] to the
    /// outcome of step `depends_on` when set.
    Xy { alpha: f64, depends_on: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementStep {
    pub qubit: usize,
    pub rule: BasisRule,
}

impl MeasurementStep {
    /// Basis for this step given the outcomes of the steps before it.
    pub fn resolve(&self, outcomes: &[u8]) -> Result<MeasurementBasis> {
        match self.rule {
            BasisRule::X => Ok(MeasurementBasis::X),
            BasisRule::Xy { alpha, depends_on } => {
                if !alpha.is_finite() {
                    return Err(Error::Config(format!("measurement angle {alpha} is not finite")));
                }
                match depends_on {
                    None => Ok(MeasurementBasis::Xy(alpha)),
                    Some(k) => outcomes
                        .get(k)
                        .map(|&s| MeasurementBasis::Xy(rotation_angle(alpha, s)))
                        .ok_or_else(|| {
                            Error::Config(format!("step depends on outcome {k}, which is not yet known"))
                        }),
                }
            }
        }
    }
}

/// Apply a block to a few modes of a state, touching only those modes.
pub(crate) fn apply_local(state: &FockVector, block: &ModeTransfer, modes: &[usize]) -> Result<FockVector> {
    let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        let local = Occupation::new(modes.iter().map(|&m| occ.counts()[m]).collect());
        let evolved = FockVector::basis(local).evolve(block)?;
        for (l, &a) in evolved.terms() {
            let mut counts = occ.counts().to_vec();
            for (k, &m) in modes.iter().enumerate() {
                counts[m] = l.counts()[k];
            }
            *out.entry(Occupation::new(counts)).or_insert(C64::new(0.0, 0.0)) += amp * a;
        }
    }
    FockVector::from_terms(state.mode_count(), out)
}

/// State of a set of dual-rail qubits (plus any other modes) with the record
/// of which qubits have been measured.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRailRegister {
    pub state: FockVector,
    pub map: DualRailMap,
    consumed: Vec<bool>,
}

impl DualRailRegister {
    pub fn new(state: FockVector, map: DualRailMap) -> Self {
        let q = map.qubits();
        DualRailRegister {
            state,
            map,
            consumed: vec![false; q],
        }
    }

    pub fn is_consumed(&self, qubit: usize) -> bool {
        self.consumed.get(qubit).copied().unwrap_or(false)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.state.norm_sqr()
    }

    /// Amplitudes of `qubit`, summed over the occupations of every other
    /// mode. Meaningful once the rest of the register is in one fixed
    /// occupation, e.g. after all other qubits were measured.
    pub fn qubit_amplitudes(&self, qubit: usize) -> [C64; 2] {
        let (r0, r1) = self.map.pairs()[qubit];
        let mut a = [C64::new(0.0, 0.0); 2];
        for (occ, &amp) in self.state.terms() {
            match (occ.counts()[r0], occ.counts()[r1]) {
                (1, 0) => a[0] += amp,
                (0, 1) => a[1] += amp,
                _ => {}
            }
        }
        a
    }
}

/// Projective measurement of one dual-rail qubit: the basis change is applied
/// as optical elements on the pair, then the pair is detected. Returns both
/// outcomes with their Born weights and unnormalized collapsed registers.
/// Occupations of the pair other than one photon are discarded.
pub fn measure_dual_rail(
    reg: &DualRailRegister,
    qubit: usize,
    basis: MeasurementBasis,
) -> Result<Vec<(u8, f64, DualRailRegister)>> {
    if qubit >= reg.map.qubits() {
        return Err(Error::OutOfRange(format!("qubit {qubit} not in the register")));
    }
    if reg.consumed[qubit] {
        return Err(Error::QubitConsumed(qubit));
    }
    let (r0, r1) = reg.map.pairs()[qubit];
    let mut change = OpticalCircuit::new(2);
    change.elements = basis.elements(0, 1);
    let rotated = apply_local(&reg.state, &change.transfer()?, &[r0, r1])?;
    let mut out = Vec::with_capacity(2);
    for (bit, pattern) in [(0u8, (1u8, 0u8)), (1, (0, 1))] {
        let terms = rotated
            .terms()
            .filter(|(o, _)| (o.counts()[r0], o.counts()[r1]) == pattern)
            .map(|(o, &a)| (o.clone(), a));
        let state = FockVector::from_terms(rotated.mode_count(), terms)?;
        let p = state.norm_sqr();
        let mut consumed = reg.consumed.clone();
        consumed[qubit] = true;
        out.push((
            bit,
            p,
            DualRailRegister {
                state,
                map: reg.map.clone(),
                consumed,
            },
        ));
    }
    Ok(out)
}
