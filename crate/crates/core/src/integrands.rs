//! A catalog of Lebesgue-integrable functions on (0, 1) with exact integrals
//! and analytic metadata.
//!
//! Alongside smooth and singular-but-improperly-Riemann-integrable entries,
//! the catalog carries the two adversarial constructions that separate
//! Lebesgue from Riemann behaviour: the indicator of the irrationals, which
//! is decided on a point's provenance tag, and the indicator of the
//! complement of a fixed sequence prefix, whose empirical mean along its own
//! sequence is identically zero while its integral is one.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::quad;
use crate::sequences::{Rationality, SequencePoint, SequenceSpec};

/// Analytic facts about a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntegrandFlags {
    /// Bounded on the whole open interval.
    pub bounded: bool,
    /// Riemann integrable, properly or improperly. The provenance-dependent
    /// indicators are Lebesgue-only and carry `false`.
    pub riemann_integrable: bool,
    /// `f^2` is integrable.
    pub finite_variance: bool,
    /// Monotone on a neighbourhood of each singular point.
    pub monotone_near_singularities: bool,
}

/// The centering term `int f * [f < k] dl` of the truncation argument.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationCompensator {
    pub integrand: String,
    pub level: u64,
    pub value: f64,
}

#[derive(Debug, Error)]
pub enum IntegrandError {
    #[error("point {0} lies outside the open interval (0, 1)")]
    OutOfDomain(f64),
    #[error("unknown integrand id {0:?}")]
    UnknownId(String),
    #[error("integrand {0:?} takes negative values; split it into positive and negative parts before truncating")]
    NegativeValues(String),
    #[error("truncation level must be at least 1")]
    ZeroLevel,
    #[error("sequence variant {0:?} cannot provide exact membership testing")]
    MembershipUnsupported(&'static str),
    #[error("duplicate sequence value {value} at index {index}; a file-backed membership set must be duplicate-free")]
    DuplicatePoint { value: f64, index: u64 },
    #[error(transparent)]
    Sequence(#[from] crate::sequences::SequenceError),
}

/// An evaluator on (0, 1) with exact integral (when known), singular set, and
/// analytic flags.
#[derive(Clone, Debug)]
pub struct Integrand {
    id: String,
    kind: Kind,
    exact_integral: Option<f64>,
    singular_set: Vec<f64>,
    flags: IntegrandFlags,
    nonnegative: bool,
}

#[derive(Clone, Debug)]
enum Kind {
    /// `c0 + c1 x + c2 x^2 + ...` with a known supremum bound on (0, 1).
    Polynomial { coeffs: Vec<f64>, sup_bound: f64 },
    /// `x^(-exponent)` with `0 < exponent < 1`; integrable pole at 0.
    InversePower { exponent: f64 },
    /// `ln(1/x)`.
    LogReciprocal,
    /// `1 / sqrt(x (1 - x))`.
    ArcsineWeight,
    /// 1 on provenance-irrational points, 0 on rational ones.
    IrrationalIndicator,
    /// 1 off a fixed sequence prefix, 0 on it.
    ComplementIndicator { members: Arc<MembershipSet> },
}

/// Exact membership keys for a sequence prefix. Points carrying a fixed
/// 128-bit representation are compared on it; file-backed points carry none
/// and are compared on the f64 bit pattern instead.
#[derive(Debug)]
struct MembershipSet {
    fixed_keys: HashSet<u128>,
    value_keys: HashSet<u64>,
    horizon: u64,
}

impl MembershipSet {
    fn contains(&self, point: &SequencePoint) -> bool {
        match point.fixed_repr {
            Some(fixed) => self.fixed_keys.contains(&fixed.to_bits()),
            None => self.value_keys.contains(&point.value.to_bits()),
        }
    }
}

impl Integrand {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn flags(&self) -> IntegrandFlags {
        self.flags
    }

    pub fn singular_set(&self) -> &[f64] {
        &self.singular_set
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// The catalog's exact value of `int_(0,1) f dl`, when known.
    pub fn exact_integral(&self) -> Option<f64> {
        self.exact_integral
    }

    /// Membership horizon of a complement indicator: keys cover indices
    /// `1..=horizon`. `None` for every other kind.
    pub fn membership_horizon(&self) -> Option<u64> {
        match &self.kind {
            Kind::ComplementIndicator { members } => Some(members.horizon),
            _ => None,
        }
    }

    /// Evaluates at a point of (0, 1). Singular points return `+inf`;
    /// anything outside the open interval is an error.
    pub fn evaluate(&self, x: &SequencePoint) -> Result<f64, IntegrandError> {
        let v = x.value;
        if !(v > 0.0 && v < 1.0) {
            return Err(IntegrandError::OutOfDomain(v));
        }
        if self.singular_set.contains(&v) {
            return Ok(f64::INFINITY);
        }
        Ok(match &self.kind {
            Kind::Polynomial { coeffs, .. } => horner(coeffs, v),
            Kind::InversePower { exponent } => v.powf(-exponent),
            Kind::LogReciprocal => -v.ln(),
            Kind::ArcsineWeight => 1.0 / (v * (1.0 - v)).sqrt(),
            Kind::IrrationalIndicator => match x.rationality {
                Rationality::Rational => 0.0,
                // Unknown tags come from PRNG or file points standing in for
                // typical reals, which are almost surely irrational
                Rationality::Irrational | Rationality::Unknown => 1.0,
            },
            Kind::ComplementIndicator { members } => {
                if members.contains(x) {
                    0.0
                } else {
                    1.0
                }
            }
        })
    }

    /// `int f * [f < k] dl` for nonnegative `f`: closed form where one
    /// exists, adaptive quadrature otherwise.
    pub fn compensator(&self, k: u64) -> Result<TruncationCompensator, IntegrandError> {
        if k == 0 {
            return Err(IntegrandError::ZeroLevel);
        }
        if !self.nonnegative {
            return Err(IntegrandError::NegativeValues(self.id.clone()));
        }
        let kf = k as f64;
        let value = match &self.kind {
            Kind::Polynomial { coeffs, sup_bound } => {
                if kf > *sup_bound {
                    polynomial_integral(coeffs)
                } else {
                    let coeffs = coeffs.clone();
                    quad::adaptive_simpson(
                        move |x| {
                            let v = horner(&coeffs, x);
                            if v < kf {
                                v
                            } else {
                                0.0
                            }
                        },
                        0.0,
                        1.0,
                        1e-10,
                    )
                }
            }
            // f < k iff x > k^(-1/p); int_{k^(-1/p)}^1 x^(-p) dx
            Kind::InversePower { exponent } => {
                (1.0 - kf.powf(1.0 - 1.0 / exponent)) / (1.0 - exponent)
            }
            // f < k iff x > e^(-k); antiderivative x - x ln x
            Kind::LogReciprocal => 1.0 - (-kf).exp() * (1.0 + kf),
            // f >= 2 everywhere; for k > 2 the sublevel set is the middle
            // interval between the roots of x(1-x) = 1/k^2
            Kind::ArcsineWeight => {
                if kf <= 2.0 {
                    0.0
                } else {
                    let w = (1.0 - 4.0 / (kf * kf)).sqrt();
                    let hi = 0.5 * (1.0 + w);
                    let lo = 0.5 * (1.0 - w);
                    2.0 * (hi.sqrt().asin() - lo.sqrt().asin())
                }
            }
            // values in {0, 1}: level 1 truncates everything that matters
            Kind::IrrationalIndicator | Kind::ComplementIndicator { .. } => {
                if k >= 2 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        Ok(TruncationCompensator {
            integrand: self.id.clone(),
            level: k,
            value,
        })
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn polynomial_integral(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c / (i as f64 + 1.0))
        .sum()
}

fn polynomial(
    id: &str,
    coeffs: &[f64],
    sup_bound: f64,
    nonnegative: bool,
    finite_variance: bool,
) -> Integrand {
    Integrand {
        id: id.to_string(),
        exact_integral: Some(polynomial_integral(coeffs)),
        kind: Kind::Polynomial {
            coeffs: coeffs.to_vec(),
            sup_bound,
        },
        singular_set: Vec::new(),
        flags: IntegrandFlags {
            bounded: true,
            riemann_integrable: true,
            finite_variance,
            monotone_near_singularities: false,
        },
        nonnegative,
    }
}

fn inverse_power(id: &str, exponent: f64, finite_variance: bool) -> Integrand {
    Integrand {
        id: id.to_string(),
        // antiderivative x^(1-p) / (1-p)
        exact_integral: Some(1.0 / (1.0 - exponent)),
        kind: Kind::InversePower { exponent },
        singular_set: vec![0.0],
        flags: IntegrandFlags {
            bounded: false,
            riemann_integrable: true,
            finite_variance,
            monotone_near_singularities: true,
        },
        nonnegative: true,
    }
}

/// Every built-in integrand. Each call constructs a fresh catalog; entries
/// are cheap value types.
pub fn catalog() -> Vec<Integrand> {
    vec![
        polynomial("x", &[0.0, 1.0], 1.0, true, true),
        polynomial("x2", &[0.0, 0.0, 1.0], 1.0, true, true),
        polynomial("x3", &[0.0, 0.0, 0.0, 1.0], 1.0, true, true),
        // 6x(1-x): a nonnegative bump with unit mass and sup 3/2
        polynomial("parabola", &[0.0, 6.0, -6.0], 1.5, true, true),
        // signed entry; the truncated path must reject it
        polynomial("x_minus_half", &[-0.5, 1.0], 0.5, false, true),
        inverse_power("x_neg14", 0.25, true),
        inverse_power("x_neg12", 0.5, false),
        inverse_power("x_neg34", 0.75, false),
        Integrand {
            id: "log_inv".to_string(),
            exact_integral: Some(1.0),
            kind: Kind::LogReciprocal,
            singular_set: vec![0.0],
            flags: IntegrandFlags {
                bounded: false,
                riemann_integrable: true,
                finite_variance: true,
                monotone_near_singularities: true,
            },
            nonnegative: true,
        },
        Integrand {
            id: "arcsine".to_string(),
            exact_integral: Some(std::f64::consts::PI),
            kind: Kind::ArcsineWeight,
            singular_set: vec![0.0, 1.0],
            flags: IntegrandFlags {
                bounded: false,
                riemann_integrable: true,
                finite_variance: false,
                monotone_near_singularities: true,
            },
            nonnegative: true,
        },
        Integrand {
            id: "irrational_indicator".to_string(),
            exact_integral: Some(1.0),
            kind: Kind::IrrationalIndicator,
            singular_set: Vec::new(),
            flags: IntegrandFlags {
                bounded: true,
                riemann_integrable: false,
                finite_variance: true,
                monotone_near_singularities: false,
            },
            nonnegative: true,
        },
    ]
}

/// Looks up a catalog entry by id.
pub fn by_id(id: &str) -> Result<Integrand, IntegrandError> {
    catalog()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| IntegrandError::UnknownId(id.to_string()))
}

/// The indicator of the complement of the first `horizon` points of `spec`:
/// evaluates to 0 exactly on those points and 1 elsewhere. Its integral is 1,
/// yet its empirical mean along the generating sequence is identically 0.
///
/// The mathematical object excludes the whole infinite sequence; a finite run
/// only ever probes indices up to its own length, so a horizon equal to the
/// experiment length is exact for that run.
pub fn complement_indicator(
    spec: &SequenceSpec,
    horizon: u64,
) -> Result<Integrand, IntegrandError> {
    if !spec.supports_exact_membership() {
        return Err(IntegrandError::MembershipUnsupported("prng"));
    }
    let reject_duplicates = matches!(spec, SequenceSpec::FromFile { .. });
    let mut fixed_keys = HashSet::new();
    let mut value_keys = HashSet::new();
    for item in spec.generate(horizon)? {
        let point = item?;
        let fresh = value_keys.insert(point.value.to_bits());
        if let Some(fixed) = point.fixed_repr {
            fixed_keys.insert(fixed.to_bits());
        }
        if reject_duplicates && !fresh {
            return Err(IntegrandError::DuplicatePoint {
                value: point.value,
                index: point.index,
            });
        }
    }
    Ok(Integrand {
        id: "complement".to_string(),
        exact_integral: Some(1.0),
        kind: Kind::ComplementIndicator {
            members: Arc::new(MembershipSet {
                fixed_keys,
                value_keys,
                horizon,
            }),
        },
        singular_set: Vec::new(),
        flags: IntegrandFlags {
            bounded: true,
            riemann_integrable: false,
            finite_variance: true,
            monotone_near_singularities: false,
        },
        nonnegative: true,
    })
}
