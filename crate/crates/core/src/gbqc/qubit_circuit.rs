use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    X(usize),
    H(usize),
    Cz(usize, usize),
    /// Control, target.
    Cx(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::Cz(..) => "cz",
            Gate::Cx(..) => "cx",
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::H(q) => vec![q],
            Gate::Cz(a, b) | Gate::Cx(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitCircuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl QubitCircuit {
    pub fn new(qubits: usize) -> Self {
        QubitCircuit {
            qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// `H` on qubit 0, then `CX` from 0 to 1.
    pub fn bell() -> Self {
        let mut c = QubitCircuit::new(2);
        c.push(Gate::H(0)).push(Gate::Cx(0, 1));
        c
    }

    pub fn validate(&self) -> Result<()> {
        for (k, g) in self.gates.iter().enumerate() {
            let t = g.targets();
            if t.iter().any(|&q| q >= self.qubits) {
                return Err(Error::Placement(format!(
                    "gate {k} ({}) addresses a qubit outside 0..{}",
                    g.kind(),
                    self.qubits
                )));
            }
            if t.len() == 2 && t[0] == t[1] {
                return Err(Error::Placement(format!("gate {k} repeats qubit {}", t[0])));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: QubitCircuitJson = serde_json::from_str(text)?;
        let mut c = QubitCircuit::new(raw.qubits);
        for g in raw.gates {
            let arity = |n: usize| -> Result<()> {
                if g.targets.len() == n {
                    Ok(())
                } else {
                    Err(Error::Placement(format!(
                        "gate {} needs {n} targets, has {}",
                        g.kind,
                        g.targets.len()
                    )))
                }
            };
            let gate = match g.kind.as_str() {
                "x" => {
                    arity(1)?;
                    Gate::X(g.targets[0])
                }
                "h" => {
                    arity(1)?;
                    Gate::H(g.targets[0])
                }
                "cz" => {
                    arity(2)?;
                    Gate::Cz(g.targets[0], g.targets[1])
                }
                "cx" => {
                    arity(2)?;
                    Gate::Cx(g.targets[0], g.targets[1])
                }
                other => return Err(Error::UnsupportedGate(other.to_string())),
            };
            c.push(gate);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = QubitCircuitJson {
            qubits: self.qubits,
            gates: self
                .gates
                .iter()
                .map(|g| GateJson {
                    kind: g.kind().to_string(),
                    targets: g.targets(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }
}

#[derive(Serialize, Deserialize)]
struct QubitCircuitJson {
    qubits: usize,
    gates: Vec<GateJson>,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: String,
    targets: Vec<usize>,
}
