//! Test oracles shared across the integration suites. Everything here is
//! deliberately independent of the library's computation paths: brute-force
//! enumeration, big-integer arithmetic, and antiderivative formulas.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use udint_core::sequences::prng_point;

/// O(n^2) star discrepancy by enumerating every candidate anchored interval
/// `[0, x_i)` and `[0, x_i]` plus the trailing gap to 1.
pub fn brute_force_star_discrepancy(points: &[f64]) -> f64 {
    let n = points.len() as f64;
    let mut worst: f64 = 0.0;
    for &t in points {
        let below = points.iter().filter(|&&x| x < t).count() as f64;
        let at_or_below = points.iter().filter(|&&x| x <= t).count() as f64;
        // sup over [0, t) approaching t from the left, and the closed [0, t]
        worst = worst.max((below / n - t).abs());
        worst = worst.max((at_or_below / n - t).abs());
    }
    worst
}

/// Deterministic pseudo-random values in (0, 1) for oracle comparisons.
pub fn hashed_values(seed: u64, n: usize) -> Vec<f64> {
    (1..=n as u64)
        .map(|i| prng_point(seed, i).unwrap().value)
        .collect()
}

/// Exact rational sum of a stream of f64 terms (every finite f64 is a
/// rational with a power-of-two denominator).
pub fn exact_rational_sum(terms: impl IntoIterator<Item = f64>) -> BigRational {
    let mut acc = BigRational::zero();
    for t in terms {
        acc += BigRational::from_float(t).expect("finite term");
    }
    acc
}

/// `floor(sqrt(value) * 2^bits)` by integer square root.
pub fn isqrt_scaled(value: u32, bits: u32) -> BigUint {
    (BigUint::from(value) << (2 * bits)).sqrt()
}
