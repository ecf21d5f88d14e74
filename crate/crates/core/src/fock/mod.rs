//! Fock-space states of bosonic modes and their evolution under linear
//! mode transfers. Amplitudes are permanents of transfer submatrices.

mod decode;
mod occupation;
mod permanent;
mod state;
mod transfer;

pub use decode::{dual_rail_decode, DecodedState, DualRailMap};
pub use occupation::Occupation;
pub use permanent::permanent;
pub use state::{evolve, matching_occupations, post_select, FockVector, ModePattern, DEFAULT_PHOTON_CAP};
pub use transfer::{max_singular_value, unitarity_deviation, ModeTransfer};
pub(crate) use transfer::apply_block_rows;
