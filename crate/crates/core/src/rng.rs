//! Counter-based random streams.
//!
//! Every random value is addressed by `(master_seed, trajectory, element)`:
//! the master seed keys a ChaCha8 generator, the trajectory index selects the
//! 64-bit stream, and the element index selects a fixed window of the
//! keystream. Results never depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Keystream words reserved for each element. Gaussian sampling consumes
/// one or two words per value, so this is never exhausted in practice.
const WORDS_PER_ELEMENT: u32 = 12;

/// Element indices at and above this offset are reserved for draws that do
/// not belong to a circuit element (measurement outcomes).
pub const AUX_ELEMENT_BASE: u64 = 1 << 40;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically derive a child seed, e.g. one per optimizer evaluation.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut s = master ^ tag.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    splitmix64(&mut s);
    splitmix64(&mut s)
}

/// Random source for one trajectory.
#[derive(Clone)]
pub struct TrajectoryStream {
    base: ChaCha8Rng,
}

impl TrajectoryStream {
    pub fn new(master_seed: u64, trajectory: u64) -> Self {
        let mut s = master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        let mut base = ChaCha8Rng::from_seed(key);
        base.set_stream(trajectory);
        TrajectoryStream { base }
    }

    /// Generator positioned at the window of `element`.
    pub fn element(&self, element: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_word_pos((element as u128) << WORDS_PER_ELEMENT);
        rng
    }
}
