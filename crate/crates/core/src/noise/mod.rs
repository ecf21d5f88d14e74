//! Noise strengths, stochastic draws and the per-trajectory noisy matrices
//! of every element kind.

mod gates;
mod stochastic;

pub use gates::{
    depolarization_layer, loss_channel, loss_channel_traced, noisy_beam_splitter,
    noisy_beam_splitter_traced, noisy_phase_shifter, noisy_phase_shifter_traced,
};
pub(crate) use gates::{depolarization_block, traced_bs_block, traced_phase_entry};
pub use stochastic::{
    draw_ics, epsilon_from_p, ics_covariance, ics_from_normals, BeamSplitterDraw,
    DepolarizingDraw, IcsCovariance, IcsPair, LossDraw, NoiseStrength,
};
