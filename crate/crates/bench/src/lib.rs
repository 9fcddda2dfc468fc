//! Shared fixtures for the criterion benches.

use schroedsym::suite::{check_rng, random_admissible};
use schroedsym::{re, FamilySpec, GroupElement, Point};

pub const SEED: u64 = 42;

pub fn linear_spec() -> FamilySpec {
    FamilySpec::linear(re(1.0), 0.3, 0.7)
}

pub fn quadratic_spec() -> FamilySpec {
    FamilySpec::quadratic(re(1.0), 0.3, re(0.8))
}

/// `n` admissible elements from a fixed stream.
pub fn elements(n: usize) -> Vec<GroupElement> {
    let mut rng = check_rng(SEED, "bench");
    (0..n).map(|_| random_admissible(&mut rng)).collect()
}

pub fn sample_point() -> Point {
    Point::tx(0.4, 0.25)
}
