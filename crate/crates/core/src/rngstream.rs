//! Named, seedable random streams.
//!
//! Every piece of randomness in the library is drawn from a stream derived
//! from `(master seed, label, index)`. The derivation is a fixed splitmix64
//! construction, so results are reproducible bit-for-bit across runs,
//! platforms and thread schedules: parallel trials each own the stream for
//! their index and never share generator state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The generator handed to all sampling code.
pub type Stream = ChaCha12Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive the stream named `label` with position `index` under `master`.
pub fn stream(master: u64, label: &str, index: u64) -> Stream {
    let mut state = master ^ fnv1a(label).rotate_left(17) ^ index.wrapping_mul(0xa076_1d64_78bd_642f);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// Derive a sub-stream from a parent stream's (label, index) without
/// advancing the parent. Used when a task fans out into parallel trials.
pub fn substream(master: u64, label: &str, index: u64, sub: u64) -> Stream {
    let mut state = master
        ^ fnv1a(label).rotate_left(17)
        ^ index.wrapping_mul(0xa076_1d64_78bd_642f)
        ^ sub.wrapping_mul(0xd6e8_feb8_6659_fd93);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}
