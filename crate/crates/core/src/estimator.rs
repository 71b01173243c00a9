//! Streaming empirical means `(1/N) * sum f(x_k)` with compensated
//! summation, plus the truncated estimator that mirrors the centering
//! construction of the strong law of large numbers.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::integrands::Integrand;

/// Stand-in contribution for a non-finite evaluation; the largest finite
/// f64. Runs that saturate are counted and marked tainted downstream rather
/// than silently dropped.
pub const SATURATION: f64 = f64::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("truncated estimator requires nonnegative evaluations, got {0}")]
    NotNonnegative(f64),
    #[error("expected term index {expected}, got {got}")]
    OutOfOrder { expected: u64, got: u64 },
    #[error("merge requires contiguous index ranges: expected start {expected}, got {got}")]
    MergeGap { expected: u64, got: u64 },
}

/// Neumaier-compensated streaming sum: single-pass, mergeable, and accurate
/// to a few units in the last place of the true sum even when term
/// magnitudes differ by many orders.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }
}

/// Streaming state for an empirical mean, together with the tail statistic
/// `sup |f(x_k)| / k` over the sliding window `k in [ceil(n/2), n]` that
/// backs the finite-N reading of `f(x_n)/n -> 0`.
#[derive(Clone, Debug)]
pub struct RunningEstimate {
    first_index: u64,
    consumed: u64,
    comp_sum: CompensatedSum,
    last_term_over_n: f64,
    /// Monotone deque of `(k, |f(x_k)|/k)`, decreasing in the statistic.
    window: VecDeque<(u64, f64)>,
    inf_count: u64,
}

impl Default for RunningEstimate {
    fn default() -> Self {
        Self::new()
    }
}

impl RunningEstimate {
    pub fn new() -> Self {
        Self::starting_at(1)
    }

    /// An estimate over a segment whose first global index is `first_index`;
    /// segments over disjoint contiguous ranges can be built in parallel and
    /// merged.
    pub fn starting_at(first_index: u64) -> Self {
        RunningEstimate {
            first_index: first_index.max(1),
            consumed: 0,
            comp_sum: CompensatedSum::new(),
            last_term_over_n: 0.0,
            window: VecDeque::new(),
            inf_count: 0,
        }
    }

    pub fn n(&self) -> u64 {
        self.consumed
    }

    pub fn first_index(&self) -> u64 {
        self.first_index
    }

    /// Global index of the most recently consumed term.
    pub fn last_index(&self) -> u64 {
        self.first_index + self.consumed.saturating_sub(1)
    }

    pub fn mean(&self) -> f64 {
        if self.consumed == 0 {
            0.0
        } else {
            self.comp_sum.value() / self.consumed as f64
        }
    }

    pub fn sum(&self) -> f64 {
        self.comp_sum.value()
    }

    pub fn last_term_over_n(&self) -> f64 {
        self.last_term_over_n
    }

    /// `sup |f(x_k)|/k` over the current window.
    pub fn tail_sup(&self) -> f64 {
        self.window.front().map_or(0.0, |&(_, w)| w)
    }

    pub fn inf_count(&self) -> u64 {
        self.inf_count
    }

    /// Consumes the next evaluation. Non-finite values contribute the
    /// saturation constant and bump `inf_count`.
    pub fn update(&mut self, f_value: f64) {
        let k = self.first_index + self.consumed;
        let contribution = if f_value.is_finite() {
            f_value
        } else {
            self.inf_count += 1;
            if f_value == f64::NEG_INFINITY {
                -SATURATION
            } else {
                SATURATION
            }
        };
        self.consumed += 1;
        self.comp_sum.add(contribution);

        let kf = k as f64;
        self.last_term_over_n = contribution / kf;
        let stat = contribution.abs() / kf;
        while matches!(self.window.back(), Some(&(_, w)) if w <= stat) {
            self.window.pop_back();
        }
        self.window.push_back((k, stat));
        let window_start = k.div_ceil(2);
        while matches!(self.window.front(), Some(&(i, _)) if i < window_start) {
            self.window.pop_front();
        }
    }

    /// Combines two estimates over adjacent index ranges. Sums and counts
    /// merge exactly; the tail window is taken from the later range.
    pub fn merge(mut self, later: RunningEstimate) -> Result<RunningEstimate, EstimatorError> {
        let expected = self.first_index + self.consumed;
        if later.first_index != expected {
            return Err(EstimatorError::MergeGap {
                expected,
                got: later.first_index,
            });
        }
        self.comp_sum.merge(later.comp_sum);
        self.consumed += later.consumed;
        self.inf_count += later.inf_count;
        if later.consumed > 0 {
            self.last_term_over_n = later.last_term_over_n;
            self.window = later.window;
        }
        Ok(self)
    }

    /// Summary against the integrand's exact integral, when known.
    pub fn finalize(&self, f: &Integrand) -> EstimateSummary {
        let mean = self.mean();
        EstimateSummary {
            integrand: f.id().to_string(),
            n: self.consumed,
            mean,
            abs_error: f.exact_integral().map(|exact| (mean - exact).abs()),
            inf_count: self.inf_count,
            tail_sup: self.tail_sup(),
        }
    }
}

/// Result of a finished estimation run.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateSummary {
    pub integrand: String,
    pub n: u64,
    pub mean: f64,
    pub abs_error: Option<f64>,
    pub inf_count: u64,
    pub tail_sup: f64,
}

/// The truncated estimator: accumulates `f(x_k) * [f(x_k) < k]` against the
/// running mean of the compensators `int f * [f < k] dl`. Defined for
/// nonnegative integrands.
#[derive(Clone, Debug, Default)]
pub struct TruncatedEstimate {
    consumed: u64,
    comp_sum_trunc: CompensatedSum,
    compensator_sum: CompensatedSum,
    truncation_hits: u64,
}

impl TruncatedEstimate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n(&self) -> u64 {
        self.consumed
    }

    /// How many terms satisfied `f(x_k) >= k` and were truncated away.
    pub fn truncation_hits(&self) -> u64 {
        self.truncation_hits
    }

    /// Feeds term `k = n + 1` with its compensator value
    /// `comp_k = int f * [f < k] dl`.
    pub fn update(&mut self, f_value: f64, k: u64, comp_k: f64) -> Result<(), EstimatorError> {
        if k != self.consumed + 1 {
            return Err(EstimatorError::OutOfOrder {
                expected: self.consumed + 1,
                got: k,
            });
        }
        if !(f_value >= 0.0) {
            return Err(EstimatorError::NotNonnegative(f_value));
        }
        self.consumed = k;
        if f_value < k as f64 {
            self.comp_sum_trunc.add(f_value);
        } else {
            self.truncation_hits += 1;
        }
        self.compensator_sum.add(comp_k);
        Ok(())
    }

    pub fn truncated_mean(&self) -> f64 {
        if self.consumed == 0 {
            0.0
        } else {
            self.comp_sum_trunc.value() / self.consumed as f64
        }
    }

    pub fn compensator_mean(&self) -> f64 {
        if self.consumed == 0 {
            0.0
        } else {
            self.compensator_sum.value() / self.consumed as f64
        }
    }

    /// The centered statistic of the truncation argument; converges to 0
    /// almost surely along typical sequences.
    pub fn centered_mean(&self) -> f64 {
        self.truncated_mean() - self.compensator_mean()
    }
}
