use serde::{Deserialize, Serialize};

use crate::circuits::{ElementKind, PlacedElement};
use crate::error::{Error, Result};
use crate::fock::{DualRailMap, ModePattern, ModeTransfer, Occupation};

/// Ordered list of placed elements on `mode_count` modes, with the input
/// occupation, the herald pattern and the dual-rail qubit map.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalCircuit {
    pub mode_count: usize,
    pub elements: Vec<PlacedElement>,
    pub input: Occupation,
    pub herald: ModePattern,
    pub qubit_map: DualRailMap,
}

impl OpticalCircuit {
    /// Empty circuit with vacuum input, no herald constraints and no qubits.
    pub fn new(mode_count: usize) -> Self {
        OpticalCircuit {
            mode_count,
            elements: Vec::new(),
            input: Occupation::vacuum(mode_count),
            herald: vec![None; mode_count],
            qubit_map: DualRailMap::new(Vec::new()).unwrap(),
        }
    }

    pub fn push(&mut self, element: PlacedElement) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input.mode_count() != self.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                got: self.input.mode_count(),
            });
        }
        if self.herald.len() != self.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                got: self.herald.len(),
            });
        }
        if let Some(m) = self.qubit_map.max_mode() {
            if m >= self.mode_count {
                return Err(Error::Placement(format!("qubit map uses mode {m}")));
            }
        }
        for (k, e) in self.elements.iter().enumerate() {
            if e.modes.len() != e.kind.arity() {
                return Err(Error::Placement(format!(
                    "element {k} ({}) needs {} modes, has {}",
                    e.kind.tag(),
                    e.kind.arity(),
                    e.modes.len()
                )));
            }
            if e.modes.iter().any(|&m| m >= self.mode_count) {
                return Err(Error::Placement(format!(
                    "element {k} addresses a mode outside 0..{}",
                    self.mode_count
                )));
            }
            if e.modes.len() == 2 && e.modes[0] == e.modes[1] {
                return Err(Error::Placement(format!("element {k} repeats mode {}", e.modes[0])));
            }
            let finite = match e.kind {
                ElementKind::PhaseShifter { theta } => theta.is_finite(),
                ElementKind::BeamSplitter { theta, phi } => theta.is_finite() && phi.is_finite(),
                _ => true,
            };
            if !finite {
                return Err(Error::Placement(format!("element {k} has a non-finite angle")));
            }
            if !(0.0..0.5).contains(&e.loss_p) {
                return Err(Error::Probability(e.loss_p));
            }
        }
        Ok(())
    }

    /// Ideal mode transfer; noise elements contribute the identity.
    pub fn transfer(&self) -> Result<ModeTransfer> {
        self.validate()?;
        let mut t = ModeTransfer::identity(self.mode_count);
        for e in &self.elements {
            if let Some(block) = e.ideal_block() {
                t.apply_block(block.matrix(), &e.modes, false);
            }
        }
        Ok(t)
    }

    /// Append `other`'s elements with its mode `k` mapped to `map[k]`.
    pub fn extend_relabeled(&mut self, elements: &[PlacedElement], map: &[usize]) {
        self.elements
            .extend(elements.iter().map(|e| e.relabeled(map)));
    }

    pub fn count_kind(&self, tag: &str) -> usize {
        self.elements.iter().filter(|e| e.kind.tag() == tag).count()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CircuitJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CircuitJson::from(self))?)
    }
}

pub fn transfer(circuit: &OpticalCircuit) -> Result<ModeTransfer> {
    circuit.transfer()
}

#[derive(Debug, Serialize, Deserialize)]
struct CircuitJson {
    modes: usize,
    input: Vec<u8>,
    herald: Vec<Option<u8>>,
    qubit_map: Vec<[usize; 2]>,
    elements: Vec<ElementJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ElementJson {
    kind: String,
    modes: Vec<usize>,
    #[serde(default)]
    theta: f64,
    #[serde(default)]
    phi: f64,
    #[serde(default)]
    loss_p: f64,
}

impl From<&OpticalCircuit> for CircuitJson {
    fn from(c: &OpticalCircuit) -> Self {
        CircuitJson {
            modes: c.mode_count,
            input: c.input.counts().to_vec(),
            herald: c.herald.clone(),
            qubit_map: c.qubit_map.pairs().iter().map(|&(a, b)| [a, b]).collect(),
            elements: c
                .elements
                .iter()
                .map(|e| {
                    let (theta, phi) = match e.kind {
                        ElementKind::PhaseShifter { theta } => (theta, 0.0),
                        ElementKind::BeamSplitter { theta, phi } => (theta, phi),
                        _ => (0.0, 0.0),
                    };
                    ElementJson {
                        kind: e.kind.tag().to_string(),
                        modes: e.modes.clone(),
                        theta,
                        phi,
                        loss_p: e.loss_p,
                    }
                })
                .collect(),
        }
    }
}

impl TryFrom<CircuitJson> for OpticalCircuit {
    type Error = Error;

    fn try_from(raw: CircuitJson) -> Result<Self> {
        let elements = raw
            .elements
            .into_iter()
            .map(|e| {
                let kind = match e.kind.as_str() {
                    "ps" => ElementKind::PhaseShifter { theta: e.theta },
                    "bs" => ElementKind::BeamSplitter {
                        theta: e.theta,
                        phi: e.phi,
                    },
                    "dep" => ElementKind::Depolarization,
                    "loss" => ElementKind::Loss,
                    other => return Err(Error::Config(format!("unknown element kind {other:?}"))),
                };
                Ok(PlacedElement {
                    kind,
                    modes: e.modes,
                    loss_p: e.loss_p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let circuit = OpticalCircuit {
            mode_count: raw.modes,
            elements,
            input: Occupation::new(raw.input),
            herald: raw.herald,
            qubit_map: DualRailMap::new(raw.qubit_map.into_iter().map(|[a, b]| (a, b)).collect())?,
        };
        circuit.validate()?;
        Ok(circuit)
    }
}
