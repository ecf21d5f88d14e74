use nalgebra::DMatrix;

use crate::fock::ModeTransfer;
use crate::C64;

/// Kind of optical element, with its ideal parameters in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    PhaseShifter { theta: f64 },
    BeamSplitter { theta: f64, phi: f64 },
    /// Fictitious element modelling an imperfect source on a mode pair.
    Depolarization,
    /// Lossy guide or detector on one mode.
    Loss,
}

impl ElementKind {
    pub fn arity(&self) -> usize {
        match self {
            ElementKind::PhaseShifter { .. } | ElementKind::Loss => 1,
            ElementKind::BeamSplitter { .. } | ElementKind::Depolarization => 2,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ElementKind::PhaseShifter { .. } => "ps",
            ElementKind::BeamSplitter { .. } => "bs",
            ElementKind::Depolarization => "dep",
            ElementKind::Loss => "loss",
        }
    }
}

/// An element placed on concrete modes. `loss_p` is the error probability
/// attached to it: photon loss per physical mode for optical elements and
/// loss channels, depolarizing probability for depolarization layers.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedElement {
    pub kind: ElementKind,
    pub modes: Vec<usize>,
    pub loss_p: f64,
}

impl PlacedElement {
    pub fn ps(mode: usize, theta: f64) -> Self {
        PlacedElement {
            kind: ElementKind::PhaseShifter { theta },
            modes: vec![mode],
            loss_p: 0.0,
        }
    }

    pub fn bs(m0: usize, m1: usize, theta: f64, phi: f64) -> Self {
        PlacedElement {
            kind: ElementKind::BeamSplitter { theta, phi },
            modes: vec![m0, m1],
            loss_p: 0.0,
        }
    }

    pub fn depolarization(m0: usize, m1: usize, p: f64) -> Self {
        PlacedElement {
            kind: ElementKind::Depolarization,
            modes: vec![m0, m1],
            loss_p: p,
        }
    }

    pub fn loss(mode: usize, p: f64) -> Self {
        PlacedElement {
            kind: ElementKind::Loss,
            modes: vec![mode],
            loss_p: p,
        }
    }

    pub fn with_loss(mut self, p: f64) -> Self {
        self.loss_p = p;
        self
    }

    /// Whether the element is substituted by its noisy version.
    pub fn is_noisy(&self) -> bool {
        self.loss_p > 0.0
    }

    /// Ideal block on `self.modes`, `None` for the noise-only elements.
    pub fn ideal_block(&self) -> Option<ModeTransfer> {
        match self.kind {
            ElementKind::PhaseShifter { theta } => Some(ps_matrix(theta)),
            ElementKind::BeamSplitter { theta, phi } => Some(bs_matrix(theta, phi)),
            ElementKind::Depolarization | ElementKind::Loss => None,
        }
    }

    pub fn relabeled(&self, map: &[usize]) -> Self {
        PlacedElement {
            kind: self.kind,
            modes: self.modes.iter().map(|&m| map[m]).collect(),
            loss_p: self.loss_p,
        }
    }
}

/// `[e^{iθ}]`
pub fn ps_matrix(theta: f64) -> ModeTransfer {
    ModeTransfer::from_parts(
        DMatrix::from_element(1, 1, C64::from_polar(1.0, theta)),
        false,
    )
}

/// `[[cos(θ/2), i e^{-iφ} sin(θ/2)], [i e^{iφ} sin(θ/2), cos(θ/2)]]`
pub fn bs_matrix(theta: f64, phi: f64) -> ModeTransfer {
    ModeTransfer::from_parts(bs_block(theta, phi), false)
}

pub(crate) fn bs_block(theta: f64, phi: f64) -> DMatrix<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    let i = C64::new(0.0, 1.0);
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            i * C64::from_polar(s, -phi),
            i * C64::from_polar(s, phi),
            C64::new(c, 0.0),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::unitarity_deviation;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &DMatrix<C64>, b: &[C64], tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn phase_shifter_values() {
        assert_eq!(ps_matrix(0.0).matrix()[(0, 0)], C64::new(1.0, 0.0));
        assert!((ps_matrix(PI).matrix()[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((ps_matrix(PI / 2.0).matrix()[(0, 0)] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn beam_splitter_values() {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        // nalgebra iterates column-major
        assert!(close(bs_matrix(0.0, 0.0).matrix(), &[one, z, z, one], 1e-15));
        assert!(close(bs_matrix(PI, 0.0).matrix(), &[z, i, i, z], 1e-15));
        let h = FRAC_1_SQRT_2;
        assert!(close(
            bs_matrix(PI / 2.0, 0.0).matrix(),
            &[C64::new(h, 0.0), C64::new(0.0, h), C64::new(0.0, h), C64::new(h, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn ideal_elements_are_unitary() {
        for k in 0..50 {
            let t = -7.0 + 0.3 * k as f64;
            assert!(unitarity_deviation(ps_matrix(t).matrix()) < 1e-12);
            assert!(unitarity_deviation(bs_matrix(t, 0.7 * t - 1.0).matrix()) < 1e-12);
        }
    }
}
