//! Computing one-dimensional Lebesgue integrals over (0, 1) as limits of
//! empirical means `(1/N) * sum f(x_k)` along uniformly distributed
//! sequences.
//!
//! The crate provides:
//!
//! - exact 128-bit fixed-point arithmetic for sequence constructions
//!   ([`fixed`]);
//! - deterministic and hashed generators of uniformly distributed sequences
//!   ([`sequences`]);
//! - a catalog of integrands with exact integrals, singular sets, and
//!   analytic flags, including adversarial indicator constructions
//!   ([`integrands`]);
//! - compensated streaming estimators, plain and truncated ([`estimator`]);
//! - exact star discrepancy and interval-counting defects ([`discrepancy`]);
//! - finite-N condition verdicts, equivalence checks, and replicate surveys
//!   ([`diagnostics`]).

pub mod diagnostics;
pub mod discrepancy;
pub mod estimator;
pub mod fixed;
pub mod integrands;
pub mod quad;
pub mod sequences;

pub use diagnostics::{ConditionReport, EquivalenceVerdict, SurveyResult, Tolerances};
pub use discrepancy::DiscrepancyReport;
pub use estimator::{CompensatedSum, EstimateSummary, RunningEstimate, TruncatedEstimate};
pub use fixed::Fixed128;
pub use integrands::{Integrand, IntegrandFlags, TruncationCompensator};
pub use sequences::{Rationality, SequencePoint, SequenceSpec};
