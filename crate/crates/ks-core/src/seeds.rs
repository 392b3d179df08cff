//! Deterministic per-trial seed derivation.
//!
//! Trial `i` of a run with master seed `s` uses `mix_seed(s, i)`: the
//! SplitMix64 finalizer applied to `s + (i + 1) * GOLDEN`, so trials are
//! independent, order-free, and individually re-runnable.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
