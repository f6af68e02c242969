//! Deterministic seed derivation for parallel work items.
//!
//! Every randomized routine in this crate draws from a stream seeded per
//! work-item index, so results are identical under any thread count or
//! evaluation order.

/// SplitMix64 finalizer. Decorrelates nearby inputs into independent seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for work item `index` from a master seed.
pub fn derive(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Derives a seed from a master seed and a multi-part index.
pub fn derive_n(master: u64, indices: &[u64]) -> u64 {
    let mut s = master;
    for &i in indices {
        s = derive(s, i);
    }
    s
}
