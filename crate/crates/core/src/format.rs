use std::fmt;
use std::str::FromStr;

use crate::error::{Error, RangeKind, Result};
use crate::value::SoftValue;

/// A binary floating-point format: `precision` significand bits (implicit bit
/// included) and an optional normal exponent range `[emin, emax]`.
///
/// Values inside the range are normal numbers; subnormals, infinities and
/// NaNs are not modelled, so leaving the range is an error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FloatFormat {
    precision: u32,
    exponent_range: Option<(i64, i64)>,
    name: Option<String>,
}

impl FloatFormat {
    pub fn new(precision: u32, exponent_range: Option<(i64, i64)>) -> Result<Self> {
        if precision < 2 {
            return Err(Error::InvalidFormat(format!(
                "precision must be at least 2 bits, got {precision}"
            )));
        }
        if let Some((emin, emax)) = exponent_range {
            if emin >= emax {
                return Err(Error::InvalidFormat(format!(
                    "empty exponent range [{emin}, {emax}]"
                )));
            }
        }
        Ok(Self {
            precision,
            exponent_range,
            name: None,
        })
    }

    /// Unbounded-exponent format with `precision` bits.
    pub fn unbounded(precision: u32) -> Result<Self> {
        Self::new(precision, None)
    }

    /// IEEE 754 binary16: 11 bits, normal exponents -14..=15.
    pub fn binary16() -> Self {
        Self::preset(11, Some((-14, 15)), "binary16")
    }

    /// bfloat16: 8 bits, normal exponents -126..=127.
    pub fn bfloat16() -> Self {
        Self::preset(8, Some((-126, 127)), "bfloat16")
    }

    /// binary16 precision without exponent limits.
    pub fn binary16_unbounded() -> Self {
        Self::preset(11, None, "binary16-unbounded")
    }

    /// bfloat16 precision without exponent limits.
    pub fn bfloat16_unbounded() -> Self {
        Self::preset(8, None, "bfloat16-unbounded")
    }

    fn preset(precision: u32, exponent_range: Option<(i64, i64)>, name: &str) -> Self {
        Self {
            precision,
            exponent_range,
            name: Some(name.to_owned()),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        self.exponent_range
    }

    pub fn emin(&self) -> Option<i64> {
        self.exponent_range.map(|(lo, _)| lo)
    }

    pub fn emax(&self) -> Option<i64> {
        self.exponent_range.map(|(_, hi)| hi)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Unit roundoff `u_p = 2^(1-p)`.
    pub fn unit_roundoff(&self) -> f64 {
        crate::bounds::unit_roundoff(self.precision)
    }

    /// Whether `v` is exactly a member of this format (zero included).
    pub fn contains(&self, v: &SoftValue) -> bool {
        v.is_zero() || (v.width() <= self.precision as u64 && self.check_binade(v.exponent()).is_ok())
    }

    /// Checks that a nonzero value with binade `exponent` is a normal number.
    pub(crate) fn check_binade(&self, exponent: i64) -> Result<()> {
        match self.exponent_range {
            Some((emin, _)) if exponent < emin => Err(self.range_error(RangeKind::Underflow, exponent)),
            Some((_, emax)) if exponent > emax => Err(self.range_error(RangeKind::Overflow, exponent)),
            _ => Ok(()),
        }
    }

    pub(crate) fn range_error(&self, kind: RangeKind, exponent: i64) -> Error {
        Error::Range {
            kind,
            format: self.to_string(),
            exponent,
        }
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            return f.write_str(name);
        }
        match self.exponent_range {
            Some((lo, hi)) => write!(f, "p={}[{},{}]", self.precision, lo, hi),
            None => write!(f, "p={}", self.precision),
        }
    }
}

/// Accepts `binary16`, `bfloat16`, their `-unbounded` variants,
/// `p=<bits>` and `p=<bits>,<emin>,<emax>`.
impl FromStr for FloatFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "binary16" | "fp16" | "half" => return Ok(Self::binary16()),
            "bfloat16" | "bf16" => return Ok(Self::bfloat16()),
            "binary16-unbounded" => return Ok(Self::binary16_unbounded()),
            "bfloat16-unbounded" => return Ok(Self::bfloat16_unbounded()),
            _ => {}
        }
        let text = s
            .strip_prefix("p=")
            .ok_or_else(|| Error::InvalidFormat(format!("unknown format `{s}`")))?;
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let int = |t: &str| -> Result<i64> {
            t.parse()
                .map_err(|_| Error::InvalidFormat(format!("bad integer `{t}` in `{s}`")))
        };
        let precision = u32::try_from(int(parts[0])?)
            .map_err(|_| Error::InvalidFormat(format!("bad precision in `{s}`")))?;
        match parts.len() {
            1 => Self::new(precision, None),
            3 => Self::new(precision, Some((int(parts[1])?, int(parts[2])?))),
            _ => Err(Error::InvalidFormat(format!(
                "expected p=<bits> or p=<bits>,<emin>,<emax>, got `{s}`"
            ))),
        }
    }
}
