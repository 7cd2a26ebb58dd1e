//! Bitmask subsets of small state spaces.
//!
//! Subsets of chains with at most 64 states are `u64` masks: bit `i` set
//! means state `i` is in the subset. Exhaustive enumeration, the evolving-set
//! process, and witness reporting all use this representation.

/// Largest state count representable as a bitmask subset.
pub const MAX_MASK_STATES: usize = 64;

/// Full mask for an `n`-state space.
pub fn full_mask(n: usize) -> u64 {
    debug_assert!(n <= MAX_MASK_STATES);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Indices of the states in `mask`, ascending.
pub fn mask_to_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out.push(i);
        m &= m - 1;
    }
    out
}

/// Mask with the given state indices set.
pub fn indices_to_mask(indices: &[usize]) -> u64 {
    let mut m = 0u64;
    for &i in indices {
        debug_assert!(i < MAX_MASK_STATES);
        m |= 1u64 << i;
    }
    m
}

/// Total mass of the masked states.
pub fn mask_mass(mask: u64, weights: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        s += weights[i];
        m &= m - 1;
    }
    s
}
