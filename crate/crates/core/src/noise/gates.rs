//! Per-trajectory noisy element matrices acting on creation operators.
//!
//! Untraced forms carry the virtual loss mode explicitly and are unitary.
//! Traced forms keep only the physical block of every factor, so a photon
//! that leaks into a virtual mode leaves the simulation; their entries are
//! cosine-scaled and the result is a contraction.

use nalgebra::DMatrix;

use crate::circuits::bs_block;
use crate::fock::ModeTransfer;
use crate::noise::{BeamSplitterDraw, DepolarizingDraw, IcsPair, LossDraw};
use crate::C64;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ci(im: f64) -> C64 {
    C64::new(0.0, im)
}

/// `exp(i x B)` for the exchange generator `B = a_0 a_1† + a_0† a_1`.
pub(crate) fn rot_b(x: f64) -> DMatrix<C64> {
    let (s, co) = x.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c(co), ci(s), ci(s), c(co)])
}

/// `[[cos x, −sin x], [sin x, cos x]]`
pub(crate) fn rot_c(x: f64) -> DMatrix<C64> {
    let (s, co) = x.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)])
}

/// 3×3 identity with a 2×2 block placed on rows/columns `(a, b)`.
fn embed3(block: &DMatrix<C64>, a: usize, b: usize) -> DMatrix<C64> {
    let mut m = DMatrix::identity(3, 3);
    let idx = [a, b];
    for (r, &ir) in idx.iter().enumerate() {
        for (k, &ik) in idx.iter().enumerate() {
            m[(ir, ik)] = block[(r, k)];
        }
    }
    m
}

/// Noisy phase shifter on (physical mode 0, virtual mode 1):
/// `diag(e^{iθ}, 1) · R_B(ε I_C) · R_C(ε I_S)`.
pub fn noisy_phase_shifter(theta: f64, eps: f64, draw: IcsPair) -> ModeTransfer {
    let mut phase = DMatrix::identity(2, 2);
    phase[(0, 0)] = C64::from_polar(1.0, theta);
    let m = phase * rot_b(eps * draw.i_c) * rot_c(eps * draw.i_s);
    ModeTransfer::from_parts(m, false)
}

/// Traced noisy phase shifter: `[e^{iθ} cos(ε I_C) cos(ε I_S)]`.
pub fn noisy_phase_shifter_traced(theta: f64, eps: f64, draw: IcsPair) -> ModeTransfer {
    ModeTransfer::from_parts(
        DMatrix::from_element(1, 1, traced_phase_entry(theta, eps, draw)),
        true,
    )
}

pub(crate) fn traced_phase_entry(theta: f64, eps: f64, draw: IcsPair) -> C64 {
    C64::from_polar(
        (eps * draw.i_c).cos() * (eps * draw.i_s).cos(),
        theta,
    )
}

/// Noisy beam splitter on (physical 0, physical 1, virtual 2).
///
/// The ideal splitter `U_B(θ, φ)` is followed, in operator order, by the
/// loss rotations `B_02(ε₀ I_C0)`, `C_12(ε₀ I_S0)`, `B_12(ε₁ I_C1)`,
/// `C_02(ε₁ I_S1)`.
pub fn noisy_beam_splitter(
    theta: f64,
    phi: f64,
    eps0: f64,
    eps1: f64,
    draw: &BeamSplitterDraw,
) -> ModeTransfer {
    let mut ideal = DMatrix::identity(3, 3);
    ideal
        .view_mut((0, 0), (2, 2))
        .copy_from(&bs_block(theta, phi));
    let m = ideal
        * embed3(&rot_b(eps0 * draw.mode0.i_c), 0, 2)
        * embed3(&rot_c(eps0 * draw.mode0.i_s), 1, 2)
        * embed3(&rot_b(eps1 * draw.mode1.i_c), 1, 2)
        * embed3(&rot_c(eps1 * draw.mode1.i_s), 0, 2);
    ModeTransfer::from_parts(m, false)
}

/// Traced noisy beam splitter:
/// `U_B(θ, φ) · diag(cos(ε₀I_C0)·cos(ε₁I_S1), cos(ε₀I_S0)·cos(ε₁I_C1))`.
pub fn noisy_beam_splitter_traced(
    theta: f64,
    phi: f64,
    eps0: f64,
    eps1: f64,
    draw: &BeamSplitterDraw,
) -> ModeTransfer {
    ModeTransfer::from_parts(traced_bs_block(theta, phi, eps0, eps1, draw), true)
}

pub(crate) fn traced_bs_block(
    theta: f64,
    phi: f64,
    eps0: f64,
    eps1: f64,
    draw: &BeamSplitterDraw,
) -> DMatrix<C64> {
    let d0 = (eps0 * draw.mode0.i_c).cos() * (eps1 * draw.mode1.i_s).cos();
    let d1 = (eps0 * draw.mode0.i_s).cos() * (eps1 * draw.mode1.i_c).cos();
    let mut m = bs_block(theta, phi);
    for r in 0..2 {
        m[(r, 0)] *= d0;
        m[(r, 1)] *= d1;
    }
    m
}

/// Depolarization layer on a dual-rail pair (both modes physical):
/// `R_B(ε W_x) · R_C(ε W_y) · diag(1, e^{iε W_z})`.
pub fn depolarization_layer(eps_d: f64, draw: &DepolarizingDraw) -> ModeTransfer {
    ModeTransfer::from_parts(depolarization_block(eps_d, draw), false)
}

pub(crate) fn depolarization_block(eps_d: f64, draw: &DepolarizingDraw) -> DMatrix<C64> {
    let mut phase = DMatrix::identity(2, 2);
    phase[(1, 1)] = C64::from_polar(1.0, eps_d * draw.w_z);
    rot_b(eps_d * draw.w_x) * rot_c(eps_d * draw.w_y) * phase
}

/// Lossy guide with its virtual mode: `R_B(ε W)`.
pub fn loss_channel(eps: f64, draw: LossDraw) -> ModeTransfer {
    ModeTransfer::from_parts(rot_b(eps * draw.w), false)
}

/// Traced lossy guide: `[cos(ε W)]`.
pub fn loss_channel_traced(eps: f64, draw: LossDraw) -> ModeTransfer {
    ModeTransfer::from_parts(DMatrix::from_element(1, 1, c((eps * draw.w).cos())), true)
}
