use serde::{Deserialize, Serialize};

use crate::circuits::{ElementKind, OpticalCircuit, PlacedElement};
use crate::error::{Error, Result};

/// Error probabilities of the three noise channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Source depolarization, one layer per mode pair.
    pub p_dep: f64,
    /// Loss per optical element and physical mode.
    pub p_element: f64,
    /// Loss per mode at detection.
    pub p_detect: f64,
    #[serde(default = "enabled")]
    pub dep_enabled: bool,
    #[serde(default = "enabled")]
    pub element_enabled: bool,
    #[serde(default = "enabled")]
    pub detect_enabled: bool,
}

/// Noise scenario of a sweep: one probability drives the selected channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Dep,
    Loss,
    Both,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::Dep, NoiseKind::Loss, NoiseKind::Both];

    pub fn model(self, p: f64) -> NoiseModel {
        match self {
            NoiseKind::Dep => NoiseModel::depolarizing(p),
            NoiseKind::Loss => NoiseModel::loss(p),
            NoiseKind::Both => NoiseModel::combined(p),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::Dep => "dep",
            NoiseKind::Loss => "loss",
            NoiseKind::Both => "both",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dep" => Ok(NoiseKind::Dep),
            "loss" => Ok(NoiseKind::Loss),
            "both" => Ok(NoiseKind::Both),
            other => Err(Error::Config(format!("unknown noise type {other:?}"))),
        }
    }
}

fn enabled() -> bool {
    true
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel::new(0.0, 0.0, 0.0)
    }

    pub fn new(p_dep: f64, p_element: f64, p_detect: f64) -> Self {
        NoiseModel {
            p_dep,
            p_element,
            p_detect,
            dep_enabled: true,
            element_enabled: true,
            detect_enabled: true,
        }
    }

    pub fn depolarizing(p: f64) -> Self {
        NoiseModel::new(p, 0.0, 0.0)
    }

    /// Element and detection loss at the same probability.
    pub fn loss(p: f64) -> Self {
        NoiseModel::new(0.0, p, p)
    }

    pub fn combined(p: f64) -> Self {
        NoiseModel::new(p, p, p)
    }

    pub fn effective_dep(&self) -> f64 {
        if self.dep_enabled { self.p_dep } else { 0.0 }
    }

    pub fn effective_element(&self) -> f64 {
        if self.element_enabled { self.p_element } else { 0.0 }
    }

    pub fn effective_detect(&self) -> f64 {
        if self.detect_enabled { self.p_detect } else { 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.effective_dep() == 0.0 && self.effective_element() == 0.0 && self.effective_detect() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p_dep, self.p_element, self.p_detect] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::Probability(p));
            }
        }
        Ok(())
    }
}

/// Mode pairs that receive a depolarization layer: the qubit pairs first,
/// then the remaining modes paired in ascending order. An odd leftover mode
/// gets no layer.
pub fn depolarization_pairs(circuit: &OpticalCircuit) -> Vec<(usize, usize)> {
    let mut pairs = circuit.qubit_map.pairs().to_vec();
    let mut used = vec![false; circuit.mode_count];
    for &(a, b) in &pairs {
        used[a] = true;
        used[b] = true;
    }
    let rest: Vec<usize> = (0..circuit.mode_count).filter(|&m| !used[m]).collect();
    pairs.extend(rest.chunks_exact(2).map(|c| (c[0], c[1])));
    pairs
}

/// Noisy version of `circuit`: depolarization layers prepended, every phase
/// shifter and beam splitter marked with the element loss probability, one
/// loss channel per mode appended. Channels with zero probability are left
/// out, so a noiseless model returns the circuit unchanged.
pub fn build_noisy_circuit(circuit: &OpticalCircuit, noise: &NoiseModel) -> Result<OpticalCircuit> {
    circuit.validate()?;
    noise.validate()?;
    let (p_dep, p_el, p_det) = (
        noise.effective_dep(),
        noise.effective_element(),
        noise.effective_detect(),
    );
    if p_dep > 0.0 && circuit.qubit_map.qubits() == 0 {
        return Err(Error::Config(
            "depolarization needs a qubit map to place its layers".into(),
        ));
    }
    let mut out = OpticalCircuit {
        elements: Vec::with_capacity(circuit.elements.len() + circuit.mode_count * 2),
        ..circuit.clone()
    };
    if p_dep > 0.0 {
        for (a, b) in depolarization_pairs(circuit) {
            out.push(PlacedElement::depolarization(a, b, p_dep));
        }
    }
    for e in &circuit.elements {
        let e = match e.kind {
            ElementKind::PhaseShifter { .. } | ElementKind::BeamSplitter { .. } if p_el > 0.0 => {
                e.clone().with_loss(p_el)
            }
            _ => e.clone(),
        };
        out.push(e);
    }
    if p_det > 0.0 {
        for m in 0..circuit.mode_count {
            out.push(PlacedElement::loss(m, p_det));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DualRailMap, Occupation};
    use std::f64::consts::PI;

    fn x_circuit() -> OpticalCircuit {
        let mut c = OpticalCircuit::new(2);
        c.input = Occupation::new(vec![1, 0]);
        c.qubit_map = DualRailMap::consecutive(1);
        c.push(PlacedElement::bs(0, 1, PI, 0.0));
        c
    }

    #[test]
    fn noiseless_model_is_identity() {
        let c = x_circuit();
        assert_eq!(build_noisy_circuit(&c, &NoiseModel::noiseless()).unwrap(), c);
    }

    #[test]
    fn x_circuit_layout() {
        let n = build_noisy_circuit(&x_circuit(), &NoiseModel::combined(0.01)).unwrap();
        let tags: Vec<&str> = n.elements.iter().map(|e| e.kind.tag()).collect();
        assert_eq!(tags, ["dep", "bs", "loss", "loss"]);
        assert!(n.elements[1].is_noisy());
        assert_eq!(n.elements[0].modes, vec![0, 1]);
    }

    #[test]
    fn two_qubit_counts() {
        let mut c = OpticalCircuit::new(4);
        c.input = Occupation::new(vec![1, 0, 1, 0]);
        c.qubit_map = DualRailMap::consecutive(2);
        c.push(PlacedElement::bs(1, 2, 1.0, 0.0));
        let n = build_noisy_circuit(&c, &NoiseModel::combined(0.02)).unwrap();
        assert_eq!(n.count_kind("dep"), 2);
        assert_eq!(n.count_kind("loss"), 4);
        assert_eq!(n.elements[..2].iter().map(|e| e.kind.tag()).collect::<Vec<_>>(), ["dep", "dep"]);
    }

    #[test]
    fn ancilla_modes_are_paired() {
        let mut c = OpticalCircuit::new(7);
        c.qubit_map = DualRailMap::new(vec![(2, 3)]).unwrap();
        assert_eq!(depolarization_pairs(&c), vec![(2, 3), (0, 1), (4, 5)]);
    }

    #[test]
    fn disabled_channels_and_errors() {
        let mut m = NoiseModel::combined(0.01);
        m.dep_enabled = false;
        m.detect_enabled = false;
        let n = build_noisy_circuit(&x_circuit(), &m).unwrap();
        assert_eq!(n.elements.len(), 1);

        let mut bare = x_circuit();
        bare.qubit_map = DualRailMap::new(vec![]).unwrap();
        assert!(matches!(
            build_noisy_circuit(&bare, &NoiseModel::depolarizing(0.1)),
            Err(Error::Config(_))
        ));
        assert!(build_noisy_circuit(&x_circuit(), &NoiseModel::loss(0.5)).is_err());
    }
}
