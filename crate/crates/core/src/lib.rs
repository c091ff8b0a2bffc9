//! Custom-precision binary floating-point emulation built around exact
//! intermediates.
//!
//! Every arithmetic result is first formed exactly as a [`SoftValue`] and then
//! rounded into a [`FloatFormat`] by one of the [`RoundingMode`]s:
//! round-to-nearest-even, truncation, exact stochastic rounding, or
//! limited-precision stochastic rounding driven by `r` random bits.
//! On top of that sit Horner evaluation, pairwise and recursive summation,
//! and closed-form probabilistic error bounds for the stochastic modes.

pub mod algorithms;
pub mod bounds;
mod error;
pub mod format;
pub mod neighbors;
pub mod rounding;
pub mod value;

pub use algorithms::{
    horner, horner_value, pairwise_depth, pairwise_sum, pairwise_sum_value, recursive_sum,
    recursive_sum_value, Polynomial, SummationInput,
};
pub use error::{Error, RangeKind, Result};
pub use format::FloatFormat;
pub use neighbors::{neighbors, Neighbors};
pub use rounding::{
    op, round, round_rn, round_rz, round_sr_exact, round_sr_limited, round_value, BitSource,
    FixedBits, OpKind, OpTrace, RngStream, RoundingMode,
};
pub use value::{parse_value, ratio_to_f64, SoftValue, ValueClass};
