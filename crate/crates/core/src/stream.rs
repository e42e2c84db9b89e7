//! Deterministic random streams.
//!
//! Every random decision in the crate is drawn from a stream keyed by a
//! master seed, a [`Domain`] and one or two indices. Results therefore do not
//! depend on how work is split across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes that never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Simulation = 1,
    RrSet = 2,
    SoftUpdate = 3,
    World = 4,
    Candidates = 5,
    Baseline = 6,
    Evaluation = 7,
    Seeds = 8,
    Instance = 9,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `(master, domain, words...)` into a single 64-bit key.
pub fn mix(master: u64, domain: Domain, words: &[u64]) -> u64 {
    let mut h = finalize(master.wrapping_add(GOLDEN));
    h = finalize(h ^ (domain as u64).wrapping_mul(GOLDEN));
    for &w in words {
        h = finalize(h.wrapping_add(GOLDEN) ^ w);
    }
    h
}

/// Generator for item `index` of `domain` under `master`.
pub fn rng(master: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(master, domain, &[index]))
}

/// A derived master seed, used to hand a whole sub-computation its own seed space.
pub fn derive(master: u64, domain: Domain) -> u64 {
    mix(master, domain, &[])
}

/// Uniform draw in `[0, 1)` keyed by two indices, without constructing a generator.
pub fn unit(master: u64, domain: Domain, a: u64, b: u64) -> f64 {
    // top 53 bits give every representable multiple of 2^-53
    (mix(master, domain, &[a, b]) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
