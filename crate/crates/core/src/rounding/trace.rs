use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::value::SoftValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Add,
    Mul,
}

/// Record of one rounding: the exact input `x`, its `p+r`-bit truncation
/// (equal to `x` for the modes without a truncation step) and the rounded
/// result.
///
/// The relative errors are derived exactly:
/// `delta = (rounded - x) / x`, `beta = (truncated - x) / x`,
/// `alpha = delta - beta`. All three are zero when `x` is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTrace {
    pub kind: Option<OpKind>,
    pub exact: SoftValue,
    pub truncated: SoftValue,
    pub rounded: SoftValue,
}

impl OpTrace {
    fn relative(&self, approx: &SoftValue) -> BigRational {
        if self.exact.is_zero() {
            return BigRational::zero();
        }
        approx.exact_sub(&self.exact).to_rational() / self.exact.to_rational()
    }

    pub fn delta(&self) -> BigRational {
        self.relative(&self.rounded)
    }

    pub fn beta(&self) -> BigRational {
        self.relative(&self.truncated)
    }

    pub fn alpha(&self) -> BigRational {
        if self.exact.is_zero() {
            return BigRational::zero();
        }
        self.rounded.exact_sub(&self.truncated).to_rational() / self.exact.to_rational()
    }

    pub fn delta_f64(&self) -> f64 {
        self.delta().to_f64().unwrap_or(f64::NAN)
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta().to_f64().unwrap_or(f64::NAN)
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_exact(&self) -> bool {
        self.rounded == self.exact
    }
}
