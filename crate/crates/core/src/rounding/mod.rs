//! Rounding of exact values into a [`FloatFormat`].
//!
//! The stochastic modes compare the exact up-probability against uniform
//! random bits in integer arithmetic, so the rounding distribution is exact:
//!
//! * `SrExact` rounds up with probability `q = (x - floor) / (ceil - floor)`,
//!   comparing `q`'s binary expansion with random bits most significant bit
//!   first and stopping at the first difference.
//! * `SrLimited(r)` rounds up with probability `k / 2^r`, where
//!   `k / 2^r = (trunc_{p+r}(x) - floor) / (ceil - floor)`; it always draws
//!   exactly `r` bits `Z` and rounds up iff `Z < k`.

mod rng;
mod trace;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

pub use rng::{BitSource, FixedBits, RngStream};
pub use trace::{OpKind, OpTrace};

use crate::error::{Error, Result};
use crate::format::FloatFormat;
use crate::neighbors::{neighbors, Neighbors};
use crate::value::SoftValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    /// Round to nearest, ties to even.
    Nearest,
    /// Round toward zero.
    TowardZero,
    /// Stochastic rounding on the exact value.
    SrExact,
    /// Stochastic rounding on the `p + r`-bit truncation, using `r >= 1` random bits.
    SrLimited(u32),
}

impl RoundingMode {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::SrExact | Self::SrLimited(_))
    }

    /// Random bits per operation; `None` for unlimited, `Some(0)` for deterministic modes.
    pub fn random_bits(&self) -> Option<u32> {
        match self {
            Self::Nearest | Self::TowardZero => Some(0),
            Self::SrExact => None,
            Self::SrLimited(r) => Some(*r),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SrLimited(0) => Err(Error::InvalidArgument(
                "limited-precision stochastic rounding needs r >= 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Tags used on the command line and in CSV output: `rn`, `rz`, `sr:exact`, `sr:<r>`.
impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Nearest => f.write_str("rn"),
            Self::TowardZero => f.write_str("rz"),
            Self::SrExact => f.write_str("sr:exact"),
            Self::SrLimited(r) => write!(f, "sr:{r}"),
        }
    }
}

impl FromStr for RoundingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mode = match s.trim().to_ascii_lowercase().as_str() {
            "rn" => Self::Nearest,
            "rz" => Self::TowardZero,
            "sr" | "sr:exact" => Self::SrExact,
            other => {
                let r = other
                    .strip_prefix("sr:")
                    .and_then(|r| r.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown rounding mode `{s}`")))?;
                Self::SrLimited(r)
            }
        };
        mode.validate()?;
        Ok(mode)
    }
}

/// Round to nearest, ties to the neighbour with an even last significand bit.
pub fn round_rn(x: &SoftValue, fmt: &FloatFormat) -> Result<SoftValue> {
    let nb = neighbors(x, fmt)?;
    Ok(pick_nearest(nb, fmt.precision()))
}

fn pick_nearest(nb: Neighbors, precision: u32) -> SoftValue {
    if nb.is_exact() {
        return nb.floor;
    }
    // compare q with 1/2
    let half_bit = nb.residual_den_log2 - 1;
    let above_half = nb.residual_num.bit(half_bit);
    let exactly_half = above_half && nb.residual_num.trailing_zeros() == Some(half_bit);
    let up = if exactly_half {
        !nb.floor_is_even(precision)
    } else {
        above_half
    };
    if up {
        nb.ceil
    } else {
        nb.floor
    }
}

/// Round toward zero (magnitude truncation to `p` bits).
pub fn round_rz(x: &SoftValue, fmt: &FloatFormat) -> Result<SoftValue> {
    let nb = neighbors(x, fmt)?;
    Ok(if x.is_negative() { nb.ceil } else { nb.floor })
}

/// Exact stochastic rounding: `ceil` with probability exactly `q(x)`.
pub fn round_sr_exact<B: BitSource>(
    x: &SoftValue,
    fmt: &FloatFormat,
    bits: &mut B,
) -> Result<(SoftValue, OpTrace)> {
    let rounded = sr_exact_value(x, fmt, bits)?;
    Ok((rounded.clone(), trace(None, x, x.clone(), rounded)))
}

fn sr_exact_value<B: BitSource>(x: &SoftValue, fmt: &FloatFormat, bits: &mut B) -> Result<SoftValue> {
    let nb = neighbors(x, fmt)?;
    if nb.is_exact() {
        return Ok(nb.floor);
    }
    // Z < q decided on the first bit where Z and q differ; equal prefixes
    // through all of q's bits mean Z >= q
    let mut up = false;
    for i in (0..nb.residual_den_log2).rev() {
        let q_bit = nb.residual_num.bit(i);
        if bits.next_bit() != q_bit {
            up = q_bit;
            break;
        }
    }
    Ok(if up { nb.ceil } else { nb.floor })
}

/// `k` such that `(trunc_{p+r}(x) - floor) / (ceil - floor) = k / 2^r`, from
/// the exact residual: truncation moves toward zero, which is toward `floor`
/// for positive `x` and toward `ceil` for negative `x`.
fn limited_numerator(nb: &Neighbors, negative: bool, r: u32) -> BigUint {
    let den = nb.residual_den_log2;
    let r = r as u64;
    if den <= r {
        return &nb.residual_num << (r - den);
    }
    let shift = den - r;
    let k = &nb.residual_num >> shift;
    let has_remainder = nb.residual_num.trailing_zeros().is_some_and(|tz| tz < shift);
    if negative && has_remainder {
        k + 1u32
    } else {
        k
    }
}

/// Draws exactly `r` bits `Z` and returns whether `Z < k`.
fn draw_below<B: BitSource>(k: &BigUint, r: u32, bits: &mut B) -> bool {
    if let Some(k) = k.to_u128() {
        if r <= 64 {
            return (bits.next_bits(r) as u128) < k;
        }
    }
    let mut z = BigUint::zero();
    let mut remaining = r;
    while remaining > 0 {
        let chunk = remaining.min(64);
        z = (z << chunk) | BigUint::from(bits.next_bits(chunk));
        remaining -= chunk;
    }
    &z < k
}

/// Limited-precision stochastic rounding with `r` random bits:
/// `ceil` with probability `(trunc_{p+r}(x) - floor) / (ceil - floor)`.
pub fn round_sr_limited<B: BitSource>(
    x: &SoftValue,
    fmt: &FloatFormat,
    r: u32,
    bits: &mut B,
) -> Result<(SoftValue, OpTrace)> {
    let rounded = sr_limited_value(x, fmt, r, bits)?;
    let truncated = x.truncate_to(fmt.precision() + r);
    Ok((rounded.clone(), trace(None, x, truncated, rounded)))
}

fn sr_limited_value<B: BitSource>(
    x: &SoftValue,
    fmt: &FloatFormat,
    r: u32,
    bits: &mut B,
) -> Result<SoftValue> {
    RoundingMode::SrLimited(r).validate()?;
    let nb = neighbors(x, fmt)?;
    if nb.is_exact() {
        return Ok(nb.floor);
    }
    let k = limited_numerator(&nb, x.is_negative(), r);
    Ok(if draw_below(&k, r, bits) { nb.ceil } else { nb.floor })
}

/// Rounds `x` with `mode`, returning the value only.
pub fn round_value<B: BitSource>(
    x: &SoftValue,
    mode: RoundingMode,
    fmt: &FloatFormat,
    bits: &mut B,
) -> Result<SoftValue> {
    match mode {
        RoundingMode::Nearest => round_rn(x, fmt),
        RoundingMode::TowardZero => round_rz(x, fmt),
        RoundingMode::SrExact => sr_exact_value(x, fmt, bits),
        RoundingMode::SrLimited(r) => sr_limited_value(x, fmt, r, bits),
    }
}

/// Rounds `x` with `mode` and records the trace.
pub fn round<B: BitSource>(
    x: &SoftValue,
    mode: RoundingMode,
    fmt: &FloatFormat,
    bits: &mut B,
) -> Result<(SoftValue, OpTrace)> {
    let rounded = round_value(x, mode, fmt, bits)?;
    let truncated = match mode {
        RoundingMode::SrLimited(r) => x.truncate_to(fmt.precision() + r),
        _ => x.clone(),
    };
    Ok((rounded.clone(), trace(None, x, truncated, rounded)))
}

fn trace(kind: Option<OpKind>, x: &SoftValue, truncated: SoftValue, rounded: SoftValue) -> OpTrace {
    OpTrace {
        kind,
        exact: x.clone(),
        truncated,
        rounded,
    }
}

pub(crate) fn exact_op(a: &SoftValue, b: &SoftValue, kind: OpKind) -> SoftValue {
    match kind {
        OpKind::Add => a.exact_add(b),
        OpKind::Mul => a.exact_mul(b),
    }
}

/// One rounded arithmetic operation: the exact sum or product of `a` and `b`,
/// rounded with `mode`.
pub fn op<B: BitSource>(
    a: &SoftValue,
    b: &SoftValue,
    kind: OpKind,
    mode: RoundingMode,
    fmt: &FloatFormat,
    bits: &mut B,
) -> Result<(SoftValue, OpTrace)> {
    let (value, mut t) = round(&exact_op(a, b, kind), mode, fmt, bits)?;
    t.kind = Some(kind);
    Ok((value, t))
}
