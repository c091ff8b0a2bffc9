//! Input distributions and the stream-id layout.
//!
//! A draw takes 64 random bits `k` and forms the exact dyadic
//! `lo + (hi - lo) * k / 2^64`, then rounds it to nearest into the working
//! format. Draws that fall below the normal range are redrawn; draws that
//! overflow are an error.
//!
//! Stream ids, for sizes `n < 2^32`, mode index `m < 2^15` and rep `j < 2^16`:
//!
//! ```text
//! sampling for size n:        2^63 | n
//! rounding for (n, mode, j):  n << 31 | m << 16 | j
//! ```
//!
//! with mode index 0 for `rn`, 1 for `rz`, 2 for `sr:exact` and `2 + r` for
//! `sr:<r>`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use srcore::{round_rn, BitSource, Error, RangeKind, FloatFormat, RngStream, RoundingMode, SoftValue};

use crate::error::{LabError, Result};

pub const MAX_SIZE: u64 = (1 << 32) - 1;
pub const MAX_REPS: u32 = 1 << 16;
pub const MAX_RANDOM_BITS: u32 = (1 << 15) - 3;
const MAX_REDRAWS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    /// `U[0, 1]`
    Uniform01,
    /// `U[-1, 1]`
    UniformSym1,
    /// `U[0, 1e5]`
    Uniform0To1e5,
    /// `U[-1e5, 1e5]`
    UniformSym1e5,
}

impl Distribution {
    pub fn interval(self) -> (i64, i64) {
        match self {
            Self::Uniform01 => (0, 1),
            Self::UniformSym1 => (-1, 1),
            Self::Uniform0To1e5 => (0, 100_000),
            Self::UniformSym1e5 => (-100_000, 100_000),
        }
    }

    /// Coefficient distributions for Horner; the others are for summation.
    pub fn is_coefficient_dist(self) -> bool {
        matches!(self, Self::Uniform01 | Self::UniformSym1)
    }

    /// One draw, rounded to nearest into `fmt`.
    pub fn sample<B: BitSource>(self, fmt: &FloatFormat, bits: &mut B) -> Result<SoftValue> {
        let (lo, hi) = self.interval();
        let mut last = None;
        for _ in 0..MAX_REDRAWS {
            let k = bits.next_bits(64);
            let scaled = (BigInt::from(lo) << 64u32) + BigInt::from(hi - lo) * BigInt::from(k);
            match round_rn(&SoftValue::from_bigint(scaled, -64), fmt) {
                Ok(v) => return Ok(v),
                Err(e @ Error::Range { kind: RangeKind::Underflow, .. }) => last = Some(e),
                Err(e) => return Err(e.into()),
            }
        }
        Err(LabError::Config(format!(
            "{self} cannot be sampled in {fmt}: {}",
            last.expect("at least one draw")
        )))
    }

    pub fn sample_many<B: BitSource>(self, count: usize, fmt: &FloatFormat, bits: &mut B) -> Result<Vec<SoftValue>> {
        (0..count).map(|_| self.sample(fmt, bits)).collect()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform01 => "uniform01",
            Self::UniformSym1 => "uniform-sym1",
            Self::Uniform0To1e5 => "uniform-0-1e5",
            Self::UniformSym1e5 => "uniform-sym-1e5",
        })
    }
}

impl FromStr for Distribution {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "uniform01" | "uniform-0-1" => Ok(Self::Uniform01),
            "uniform-sym1" | "uniform-sym-1" => Ok(Self::UniformSym1),
            "uniform-0-1e5" => Ok(Self::Uniform0To1e5),
            "uniform-sym-1e5" | "uniform-sym1e5" => Ok(Self::UniformSym1e5),
            _ => Err(LabError::Config(format!("unknown distribution {s:?}"))),
        }
    }
}

pub fn mode_index(mode: RoundingMode) -> u64 {
    match mode {
        RoundingMode::Nearest => 0,
        RoundingMode::TowardZero => 1,
        RoundingMode::SrExact => 2,
        RoundingMode::SrLimited(r) => 2 + r as u64,
    }
}

pub fn sampling_stream(seed: u64, n: u64) -> RngStream {
    debug_assert!(n <= MAX_SIZE);
    RngStream::new(seed, 1 << 63 | n)
}

pub fn rounding_stream(seed: u64, n: u64, mode: RoundingMode, rep: u32) -> RngStream {
    debug_assert!(n <= MAX_SIZE && rep < MAX_REPS);
    RngStream::new(seed, n << 31 | mode_index(mode) << 16 | rep as u64)
}
