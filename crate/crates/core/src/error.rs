use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which side of the normal range a value fell out of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    Overflow,
    Underflow,
}

impl fmt::Display for RangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RangeKind::Overflow => f.write_str("overflow"),
            RangeKind::Underflow => f.write_str("below the normal range"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("`{literal}` is not representable in {format}: {reason}")]
    NotRepresentable {
        literal: String,
        format: String,
        reason: String,
    },
    #[error("malformed literal `{0}`")]
    Parse(String),
    #[error("{kind} in {format} (binade 2^{exponent})")]
    Range {
        kind: RangeKind,
        format: String,
        exponent: i64,
    },
    #[error("condition number undefined: exact result is zero")]
    ZeroDenominator,
    #[error("invalid format: {0}")]
    InvalidFormat(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
