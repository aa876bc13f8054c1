//! Shared fixtures for the criterion benches.

use galefan_core::genpos::random_config;
use galefan_core::{FieldKind, PointConfig};

/// Seeded rational configuration with 8-bit coordinates.
pub fn fixture(n: usize, dim: usize, seed: u64) -> PointConfig {
    random_config(n, dim, FieldKind::Rational, 8, seed).expect("valid fixture parameters")
}

/// The same configuration with a single color class.
pub fn monochrome(n: usize, dim: usize, seed: u64) -> PointConfig {
    fixture(n, dim, seed).with_coloring(vec![0; n]).expect("coloring matches")
}
