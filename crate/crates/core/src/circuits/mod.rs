//! Ideal optical elements, circuits as ordered element lists, and the
//! triangular (Reck) decomposition of unitaries into beam-splitter meshes.

mod circuit;
mod elements;
mod reck;

pub use circuit::{transfer, OpticalCircuit};
pub use elements::{bs_matrix, ps_matrix, ElementKind, PlacedElement};
pub(crate) use elements::bs_block;
pub use reck::reck_decompose;
