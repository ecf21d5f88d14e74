use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockVector, Occupation};
use crate::C64;

/// Qubit-to-mode-pair assignment. Logical `|0⟩` is occupation `(1,0)` on the
/// pair, `|1⟩` is `(0,1)`. Qubit 0 is the most significant bit of a basis
/// index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualRailMap {
    pairs: Vec<(usize, usize)>,
}

impl DualRailMap {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &pairs {
            for m in [a, b] {
                if !seen.insert(m) {
                    return Err(Error::OverlappingPairs(m));
                }
            }
        }
        Ok(DualRailMap { pairs })
    }

    /// Pairs `(0,1), (2,3), …` for `qubits` qubits.
    pub fn consecutive(qubits: usize) -> Self {
        DualRailMap {
            pairs: (0..qubits).map(|q| (2 * q, 2 * q + 1)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn qubits(&self) -> usize {
        self.pairs.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.pairs.len()
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.pairs.iter().map(|&(a, b)| a.max(b)).max()
    }

    /// Occupation encoding computational basis index `b` on `mode_count`
    /// modes; modes outside the map are empty.
    pub fn basis_occupation(&self, b: usize, mode_count: usize) -> Occupation {
        let q = self.qubits();
        let mut counts = vec![0u8; mode_count];
        for (k, &(r0, r1)) in self.pairs.iter().enumerate() {
            let bit = (b >> (q - 1 - k)) & 1;
            if bit == 0 {
                counts[r0] = 1;
            } else {
                counts[r1] = 1;
            }
        }
        Occupation::new(counts)
    }

    /// Basis index of `occ`, or `None` when it lies outside the dual-rail
    /// subspace (a pair without exactly one photon, or photons elsewhere).
    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        let counts = occ.counts();
        let mut index = 0usize;
        let mut mapped_photons = 0usize;
        for &(r0, r1) in &self.pairs {
            let (a, b) = (*counts.get(r0)?, *counts.get(r1)?);
            index <<= 1;
            match (a, b) {
                (1, 0) => {}
                (0, 1) => index |= 1,
                _ => return None,
            }
            mapped_photons += 1;
        }
        if occ.photons() != mapped_photons {
            return None;
        }
        Some(index)
    }
}

/// Amplitudes over the `2^Q` computational basis plus the weight that fell
/// outside the dual-rail subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedState {
    pub amplitudes: Vec<C64>,
    pub discarded_weight: f64,
}

pub fn dual_rail_decode(state: &FockVector, map: &DualRailMap) -> Result<DecodedState> {
    if let Some(m) = map.max_mode() {
        if m >= state.mode_count() {
            return Err(Error::Dimension {
                expected: m + 1,
                got: state.mode_count(),
            });
        }
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); map.dim()];
    let mut discarded_weight = 0.0;
    for (occ, &amp) in state.terms() {
        match map.index_of(occ) {
            Some(i) => amplitudes[i] += amp,
            None => discarded_weight += amp.norm_sqr(),
        }
    }
    Ok(DecodedState {
        amplitudes,
        discarded_weight,
    })
}
