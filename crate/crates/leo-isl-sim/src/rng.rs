//! Deterministic stream derivation for replicated Monte Carlo runs.
//!
//! Every consumer gets its own ChaCha stream derived from the master seed plus
//! a path of indices (replication, satellite, purpose), so results are
//! bit-identical for a given seed regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream purposes, kept distinct so streams never collide.
pub mod purpose {
    pub const ARRIVALS: u64 = 1;
    pub const CHANNEL: u64 = 2;
    pub const INIT: u64 = 3;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a path of indices into a single 64-bit stream seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = master;
    let mut acc = splitmix64(&mut state);
    for &p in path {
        let mut s = acc ^ p.wrapping_mul(0xff51_afd7_ed55_8ccd);
        acc = splitmix64(&mut s);
    }
    acc
}

/// Construct an independent ChaCha stream for `(master, path)`.
pub fn stream_rng(master: u64, path: &[u64]) -> ChaCha12Rng {
    let mut state = derive_seed(master, path);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}
