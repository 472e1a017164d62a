//! Shared inputs for the benchmarks.

use num_bigint::BigUint;

use covercraft::cover::{construct, TargetConfig};
use covercraft::CoveringSystem;

/// `2^p - 1`.
pub fn mersenne(p: u32) -> BigUint {
    (BigUint::from(1u32) << p) - 1u32
}

/// The target used throughout the tests: `K = 2`, `L_N = {5, 7}`, `M = 2`.
pub fn small_target() -> TargetConfig {
    TargetConfig::new(2, vec![5, 7], 2)
}

pub fn small_system() -> CoveringSystem {
    construct(&small_target()).expect("the small target has a covering system").system
}
