//! Reproducible counter-based random streams.
//!
//! A single 64-bit master seed is expanded into a 256-bit ChaCha8 key with
//! SplitMix64; each trial selects an independent substream through the
//! generator's 64-bit stream counter. The same (seed, index) pair yields the
//! same draws on every platform, and distinct indices give statistically
//! independent streams, so parallel reductions over trials are reproducible
//! regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the reproducible random stream for one trial.
pub fn derive_stream(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial_index);
    rng
}
