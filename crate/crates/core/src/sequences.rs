//! Generators for uniformly distributed sequences on the open interval (0, 1).
//!
//! Every generator is a pure function of its parameters and the 1-based index
//! `n`, so streams can be re-created or split across threads at will. The
//! deterministic constructions (Weyl rotations, radical inverses, the hybrid
//! pi sequence) carry an exact 128-bit fixed-point representation alongside
//! the `f64` value; see [`crate::fixed::Fixed128`].

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed::Fixed128;

/// `frac((sqrt(5) - 1) / 2)`, the golden ratio conjugate, truncated to 128
/// bits. Decimal digits: 0.61803398874989484820458683436563811772...
pub const GOLDEN_RATIO_CONJUGATE: Fixed128 =
    Fixed128::from_bits(0x9e3779b97f4a7c15f39cc0605cedc834);

/// `sqrt(2) - 1` truncated to 128 bits.
/// Decimal digits: 0.41421356237309504880168872420969807857...
pub const SQRT2_FRACTIONAL: Fixed128 = Fixed128::from_bits(0x6a09e667f3bcc908b2fb1366ea957d3e);

/// `pi - 3` truncated to 128 bits.
/// Decimal digits: 0.14159265358979323846264338327950288420...
pub const PI_FRACTIONAL: Fixed128 = Fixed128::from_bits(0x243f6a8885a308d313198a2e03707344);

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// `2^-54`.
const TWO_NEG_54: f64 = 5.551115123125783e-17;

/// Provenance tag for a point: whether the construction that produced it
/// yields a rational or an irrational real. Floating-point values are all
/// rational, so integrands that distinguish rationals from irrationals
/// consult this tag instead of the bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationality {
    Rational,
    Irrational,
    Unknown,
}

/// One element of a sequence in (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct SequencePoint {
    /// Position in the open interval (0, 1).
    pub value: f64,
    /// 1-based index within its sequence.
    pub index: u64,
    /// Exact fraction `fixed_repr / 2^128`, present for exactly representable
    /// constructions. When present, `|value - fixed_repr/2^128| <= 2^-53`.
    pub fixed_repr: Option<Fixed128>,
    pub rationality: Rationality,
}

/// Declarative description of a sequence generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `{n * alpha}` by exact 128-bit rotation.
    Weyl {
        alpha_fixed: Fixed128,
        rationality: Rationality,
    },
    /// Radical inverse of `n` in the given base.
    VanDerCorput { base: u32 },
    /// Hashed pseudo-random stream; a stand-in for a typical sequence drawn
    /// from the infinite product of uniform measures.
    Prng { seed: u64 },
    /// `0.5` first, then `{n * pi}`: uniformly distributed but not of the
    /// rotation form `{n * alpha}`.
    HybridPi,
    /// Decimal values from a text file, one per line, `#` comments allowed.
    FromFile { path: PathBuf },
}

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("sequence index must be at least 1")]
    ZeroIndex,
    #[error("requested count must be at least 1")]
    ZeroCount,
    #[error("Weyl alpha must be a nonzero fraction of one")]
    ZeroAlpha,
    #[error("van der Corput base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("{}: line {line}: {message}", path.display())]
    FileFormat {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: file ended after {got} values, {wanted} requested", path.display())]
    FileTruncated {
        path: PathBuf,
        wanted: u64,
        got: u64,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: io::Error,
    },
}

impl SequenceSpec {
    pub fn weyl_golden() -> Self {
        SequenceSpec::Weyl {
            alpha_fixed: GOLDEN_RATIO_CONJUGATE,
            rationality: Rationality::Irrational,
        }
    }

    pub fn weyl_sqrt2() -> Self {
        SequenceSpec::Weyl {
            alpha_fixed: SQRT2_FRACTIONAL,
            rationality: Rationality::Irrational,
        }
    }

    /// Whether point-by-point equality against this sequence is decidable
    /// from stored keys. Hashed PRNG streams model typical sequences, not a
    /// fixed countable set, so they are excluded.
    pub fn supports_exact_membership(&self) -> bool {
        !matches!(self, SequenceSpec::Prng { .. })
    }

    /// Lazily yields points `1..=count`. Deterministic per spec.
    pub fn generate(&self, count: u64) -> Result<SequenceStream, SequenceError> {
        if count == 0 {
            return Err(SequenceError::ZeroCount);
        }
        let gen = match self {
            SequenceSpec::Weyl {
                alpha_fixed,
                rationality,
            } => {
                if alpha_fixed.is_zero() {
                    return Err(SequenceError::ZeroAlpha);
                }
                Gen::Weyl {
                    alpha: *alpha_fixed,
                    rationality: *rationality,
                }
            }
            SequenceSpec::VanDerCorput { base } => {
                if *base < 2 {
                    return Err(SequenceError::InvalidBase(*base));
                }
                Gen::VanDerCorput { base: *base }
            }
            SequenceSpec::Prng { seed } => Gen::Prng { seed: *seed },
            SequenceSpec::HybridPi => Gen::HybridPi,
            SequenceSpec::FromFile { path } => {
                let file = File::open(path).map_err(|source| SequenceError::Io {
                    path: path.clone(),
                    source,
                })?;
                Gen::File {
                    lines: BufReader::new(file).lines(),
                    path: path.clone(),
                    line_no: 0,
                }
            }
        };
        Ok(SequenceStream {
            gen,
            count,
            next_index: 1,
            zero_replacements: 0,
        })
    }
}

/// `{n * alpha}` with the rationality tag of the supplying spec. An exact
/// zero (possible only for rational alpha) is replaced by `2^-128` to stay
/// inside the open interval.
pub fn weyl_point(
    alpha_fixed: Fixed128,
    rationality: Rationality,
    n: u64,
) -> Result<SequencePoint, SequenceError> {
    if n == 0 {
        return Err(SequenceError::ZeroIndex);
    }
    if alpha_fixed.is_zero() {
        return Err(SequenceError::ZeroAlpha);
    }
    Ok(weyl_point_inner(alpha_fixed, rationality, n).0)
}

fn weyl_point_inner(
    alpha_fixed: Fixed128,
    rationality: Rationality,
    n: u64,
) -> (SequencePoint, bool) {
    point_from_fixed(alpha_fixed.wrapping_mul_int(n), n, rationality)
}

fn point_from_fixed(fixed: Fixed128, index: u64, rationality: Rationality) -> (SequencePoint, bool) {
    let (fixed, replaced) = if fixed.is_zero() {
        (Fixed128::MIN_POSITIVE, true)
    } else {
        (fixed, false)
    };
    (
        SequencePoint {
            value: fixed.to_f64(),
            index,
            fixed_repr: Some(fixed),
            rationality,
        },
        replaced,
    )
}

/// Radical inverse of `n` in the given base.
pub fn vdc_point(base: u32, n: u64) -> Result<SequencePoint, SequenceError> {
    if base < 2 {
        return Err(SequenceError::InvalidBase(base));
    }
    if n == 0 {
        return Err(SequenceError::ZeroIndex);
    }
    let b = base as u128;
    let mut numer: u128 = 0;
    let mut denom: u128 = 1;
    let mut rest = n as u128;
    let mut exact = true;
    while rest > 0 {
        match denom.checked_mul(b).filter(|q| *q <= 1 << 127) {
            Some(q) => {
                numer = numer * b + rest % b;
                denom = q;
            }
            None => {
                exact = false;
                break;
            }
        }
        rest /= b;
    }
    let (value, fixed_repr) = if exact {
        let fixed = Fixed128::from_ratio(numer, denom).expect("numer < denom <= 2^127");
        (fixed.to_f64(), Some(fixed))
    } else {
        // expansion too deep for 128-bit exactness; accumulate digits in f64
        let inv = 1.0 / f64::from(base);
        let mut value = 0.0;
        let mut scale = inv;
        let mut rest = n;
        while rest > 0 {
            value += (rest % u64::from(base)) as f64 * scale;
            scale *= inv;
            rest /= u64::from(base);
        }
        (value, None)
    };
    Ok(SequencePoint {
        value,
        index: n,
        fixed_repr,
        rationality: Rationality::Rational,
    })
}

/// Deterministic hashed stream: position `n` of the stream with the given
/// seed, as `(k + 1/2) * 2^-53` for a 53-bit hash `k`, which is strictly
/// inside (0, 1).
pub fn prng_point(seed: u64, n: u64) -> Result<SequencePoint, SequenceError> {
    if n == 0 {
        return Err(SequenceError::ZeroIndex);
    }
    let word = splitmix64(seed.wrapping_add(n.wrapping_mul(SPLITMIX_GAMMA)));
    let odd = (word >> 11) * 2 + 1;
    Ok(SequencePoint {
        value: odd as f64 * TWO_NEG_54,
        index: n,
        fixed_repr: Some(Fixed128::from_bits((odd as u128) << 74)),
        rationality: Rationality::Unknown,
    })
}

/// The hybrid sequence: `{3/2} = 1/2` at `n = 1`, then `{n * pi}` for
/// `n >= 2`. Uniformly distributed, yet not expressible as `{n * alpha}`.
pub fn hybrid_pi_point(n: u64) -> Result<SequencePoint, SequenceError> {
    match n {
        0 => Err(SequenceError::ZeroIndex),
        1 => Ok(SequencePoint {
            value: 0.5,
            index: 1,
            fixed_repr: Some(Fixed128::HALF),
            rationality: Rationality::Rational,
        }),
        // {n * pi} = {n * (pi - 3)}
        _ => Ok(weyl_point_inner(PI_FRACTIONAL, Rationality::Irrational, n).0),
    }
}

/// SplitMix64 finalizer over the keyed position, a pure function of the
/// argument.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a survey keyed by `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Streaming iterator over a sequence prefix. See [`SequenceSpec::generate`].
pub struct SequenceStream {
    gen: Gen,
    count: u64,
    next_index: u64,
    zero_replacements: u64,
}

enum Gen {
    Weyl {
        alpha: Fixed128,
        rationality: Rationality,
    },
    VanDerCorput {
        base: u32,
    },
    Prng {
        seed: u64,
    },
    HybridPi,
    File {
        lines: io::Lines<BufReader<File>>,
        path: PathBuf,
        line_no: u64,
    },
}

impl SequenceStream {
    /// How many exact-zero outputs have been replaced by `2^-128` so far.
    pub fn zero_replacements(&self) -> u64 {
        self.zero_replacements
    }
}

impl Iterator for SequenceStream {
    type Item = Result<SequencePoint, SequenceError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_index > self.count {
            return None;
        }
        let n = self.next_index;
        let item = match &mut self.gen {
            Gen::Weyl { alpha, rationality } => {
                let (point, replaced) = weyl_point_inner(*alpha, *rationality, n);
                if replaced {
                    self.zero_replacements += 1;
                }
                Ok(point)
            }
            Gen::VanDerCorput { base } => vdc_point(*base, n),
            Gen::Prng { seed } => prng_point(*seed, n),
            Gen::HybridPi => hybrid_pi_point(n),
            Gen::File {
                lines,
                path,
                line_no,
            } => loop {
                match lines.next() {
                    None => {
                        break Err(SequenceError::FileTruncated {
                            path: path.clone(),
                            wanted: self.count,
                            got: n - 1,
                        })
                    }
                    Some(Err(source)) => {
                        break Err(SequenceError::Io {
                            path: path.clone(),
                            source,
                        })
                    }
                    Some(Ok(line)) => {
                        *line_no += 1;
                        let text = line.trim();
                        if text.is_empty() || text.starts_with('#') {
                            continue;
                        }
                        match text.parse::<f64>() {
                            Ok(v) if v.is_finite() && v > 0.0 && v < 1.0 => {
                                break Ok(SequencePoint {
                                    value: v,
                                    index: n,
                                    fixed_repr: None,
                                    rationality: Rationality::Unknown,
                                })
                            }
                            Ok(v) => {
                                break Err(SequenceError::FileFormat {
                                    path: path.clone(),
                                    line: *line_no,
                                    message: format!(
                                        "value {v} outside the open interval (0, 1)"
                                    ),
                                })
                            }
                            Err(_) => {
                                break Err(SequenceError::FileFormat {
                                    path: path.clone(),
                                    line: *line_no,
                                    message: format!("not a decimal value: {text:?}"),
                                })
                            }
                        }
                    }
                }
            },
        };
        // an error ends the stream
        self.next_index = if item.is_err() {
            self.count + 1
        } else {
            self.next_index + 1
        };
        Some(item)
    }
}
