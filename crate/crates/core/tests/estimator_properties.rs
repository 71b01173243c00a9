//! Estimator accuracy against exact rational arithmetic, Cesaro-mean
//! consistency, agreement of the plain and truncated paths on bounded
//! integrands, and merge semantics.

mod common;

use num_traits::ToPrimitive;
use proptest::prelude::*;

use udint_core::estimator::{CompensatedSum, RunningEstimate, TruncatedEstimate};
use udint_core::integrands::by_id;
use udint_core::sequences::{prng_point, SequenceSpec};

/// Compensated summation survives an adversarial magnitude-alternating
/// stream: relative error against the exact rational sum stays below 1e-12.
#[test]
fn compensated_sum_beats_the_adversarial_stream() {
    let terms = (0..100_000).map(|i| if i % 2 == 0 { 1.0 } else { 1e-16 });
    let mut comp = CompensatedSum::new();
    for t in terms.clone() {
        comp.add(t);
    }
    let exact = common::exact_rational_sum(terms);
    let exact_f = exact.to_f64().unwrap();
    let rel = ((comp.value() - exact_f) / exact_f).abs();
    assert!(rel <= 1e-12, "relative error {rel}");

    // the naive sum drops the small terms entirely; make sure the test is
    // actually adversarial
    let naive: f64 = (0..100_000)
        .map(|i| if i % 2 == 0 { 1.0 } else { 1e-16 })
        .sum();
    assert!(((naive - exact_f) / exact_f).abs() > 1e-17);
}

/// Toeplitz/Cesaro consistency: feeding `x + 1/n` produces a mean within
/// `2 (ln N + 1) / N` of `x`.
#[test]
fn cesaro_mean_of_a_convergent_sequence() {
    let n = 100_000u64;
    let x = 0.75;
    let mut est = RunningEstimate::new();
    for k in 1..=n {
        est.update(x + 1.0 / k as f64);
    }
    let bound = 2.0 * ((n as f64).ln() + 1.0) / n as f64;
    assert!((est.mean() - x).abs() <= bound);
}

/// For f < 1 the truncation never fires and the truncated accumulator equals
/// the plain one bit for bit.
#[test]
fn truncated_and_plain_agree_for_bounded_f() {
    let f = by_id("x").unwrap();
    let mut plain = RunningEstimate::new();
    let mut truncated = TruncatedEstimate::new();
    for item in SequenceSpec::weyl_golden().generate(5_000).unwrap() {
        let p = item.unwrap();
        let v = f.evaluate(&p).unwrap();
        plain.update(v);
        let comp = f.compensator(p.index).unwrap();
        truncated.update(v, p.index, comp.value).unwrap();
    }
    assert_eq!(truncated.truncation_hits(), 0);
    assert_eq!(truncated.truncated_mean(), plain.mean());
}

/// Truncation events thin out: along hashed streams at N = 10^5 the hit rate
/// of `f(x_k) >= k` for the inverse square root stays below 1%.
#[test]
fn truncation_hits_are_rare() {
    let f = by_id("x_neg12").unwrap();
    let n = 100_000u64;
    let mut truncated = TruncatedEstimate::new();
    for k in 1..=n {
        let p = prng_point(88, k).unwrap();
        let comp = f.compensator(k).unwrap();
        truncated
            .update(f.evaluate(&p).unwrap(), k, comp.value)
            .unwrap();
    }
    let rate = truncated.truncation_hits() as f64 / n as f64;
    assert!(rate <= 0.01, "hit rate {rate}");
}

/// Tail statistic versus mean oscillation on catalog runs: the window
/// supremum is dominated by ten times the checkpoint oscillation plus the
/// root-N scale.
#[test]
fn tail_sup_is_controlled_by_oscillation() {
    let n = 10_000u64;
    for id in ["x", "x2", "parabola", "x_neg12", "x_neg14"] {
        let f = by_id(id).unwrap();
        for spec in [SequenceSpec::weyl_golden(), SequenceSpec::Prng { seed: 17 }] {
            let mut est = RunningEstimate::new();
            let mut means = Vec::new();
            for item in spec.generate(n).unwrap() {
                let p = item.unwrap();
                est.update(f.evaluate(&p).unwrap());
                if est.n() >= n / 2 && est.n() % 500 == 0 {
                    means.push(est.mean());
                }
            }
            let osc = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - means.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let allowance = 10.0 * (osc + 1.0 / (n as f64).sqrt());
            assert!(
                est.tail_sup() <= allowance,
                "{id} along {spec:?}: tail {} vs allowance {allowance}",
                est.tail_sup()
            );
        }
    }
}

proptest! {
    /// Splitting a stream anywhere and merging reproduces the single-pass
    /// mean to within accumulated rounding, and counts exactly.
    #[test]
    fn merge_is_consistent_with_single_pass(
        values in prop::collection::vec(-1e6f64..1e6, 2..200),
        split_at in any::<prop::sample::Index>(),
    ) {
        let cut = 1 + split_at.index(values.len() - 1);
        let mut whole = RunningEstimate::new();
        for &v in &values { whole.update(v); }

        let mut left = RunningEstimate::new();
        for &v in &values[..cut] { left.update(v); }
        let mut right = RunningEstimate::starting_at(cut as u64 + 1);
        for &v in &values[cut..] { right.update(v); }
        let merged = left.merge(right).unwrap();

        prop_assert_eq!(merged.n(), whole.n());
        let scale = 1.0 + values.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!((merged.sum() - whole.sum()).abs() <= 1e-9 * scale);
    }

    /// The compensated sum tracks exact rational arithmetic on arbitrary
    /// finite streams.
    #[test]
    fn compensated_sum_matches_exact_rationals(
        values in prop::collection::vec(-1e8f64..1e8, 1..200),
    ) {
        let mut comp = CompensatedSum::new();
        for &v in &values { comp.add(v); }
        let exact = common::exact_rational_sum(values.iter().copied()).to_f64().unwrap();
        let scale = 1.0 + values.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!((comp.value() - exact).abs() <= 1e-12 * scale);
    }

    /// The window supremum always dominates the latest term.
    #[test]
    fn window_dominates_last_term(values in prop::collection::vec(-1e3f64..1e3, 1..100)) {
        let mut est = RunningEstimate::new();
        for &v in &values {
            est.update(v);
            prop_assert!(est.tail_sup() >= est.last_term_over_n().abs());
        }
    }
}
