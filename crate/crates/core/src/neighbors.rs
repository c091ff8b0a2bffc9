use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{RangeKind, Result};
use crate::format::FloatFormat;
use crate::value::SoftValue;

/// The two format values bracketing `x` and where `x` sits between them.
///
/// `q = residual_num / 2^residual_den_log2 = (x - floor) / (ceil - floor)`,
/// exactly; it is zero when `x` is representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbors {
    pub floor: SoftValue,
    pub ceil: SoftValue,
    pub residual_num: BigUint,
    pub residual_den_log2: u64,
}

impl Neighbors {
    fn exact(x: &SoftValue) -> Self {
        Self {
            floor: x.clone(),
            ceil: x.clone(),
            residual_num: BigUint::zero(),
            residual_den_log2: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.residual_num.is_zero()
    }

    /// `q` rounded to `f64`; diagnostics only.
    pub fn up_probability(&self) -> f64 {
        let num = SoftValue::from_parts(false, self.residual_num.clone(), 0);
        let den = SoftValue::from_parts(false, BigUint::one(), self.residual_den_log2 as i64);
        crate::value::ratio_to_f64(&num, &den)
    }

    /// Whether rounding to even would pick `floor` in a tie: the neighbour
    /// whose last significand bit at precision `p` is zero.
    pub(crate) fn floor_is_even(&self, precision: u32) -> bool {
        // canonical significands drop trailing zeros, so a p-bit value is odd
        // exactly when it needs all p bits
        self.floor.is_zero() || self.floor.width() < precision as u64
    }
}

/// Largest format value `<= x` and smallest format value `>= x`.
///
/// Both neighbours are taken on the grid of `x`'s own binade, so for `x > 0`
/// the gap is the ulp of `floor` even when `ceil` is the next power of two.
/// Fails with a range error when `x` lies outside the normal binades or when
/// its larger-magnitude neighbour would overflow.
pub fn neighbors(x: &SoftValue, fmt: &FloatFormat) -> Result<Neighbors> {
    if x.is_zero() {
        return Ok(Neighbors::exact(x));
    }
    fmt.check_binade(x.exponent())?;
    let precision = fmt.precision() as u64;
    let width = x.width();
    if width <= precision {
        return Ok(Neighbors::exact(x));
    }
    let drop = width - precision;
    let low_mask = (BigUint::one() << drop) - 1u32;
    let dropped = x.significand() & &low_mask;
    let kept = x.significand() >> drop;
    let lsb = x.lsb_exponent() + drop as i64;
    let toward_zero = SoftValue::from_parts(x.is_negative(), kept.clone(), lsb);
    let away = SoftValue::from_parts(x.is_negative(), kept + 1u32, lsb);
    if let Some(emax) = fmt.emax() {
        if away.exponent() > emax {
            return Err(fmt.range_error(RangeKind::Overflow, away.exponent()));
        }
    }
    // canonical form keeps the lowest set bit inside the dropped part
    debug_assert!(!dropped.is_zero());
    Ok(if x.is_negative() {
        Neighbors {
            floor: away,
            ceil: toward_zero,
            residual_num: (BigUint::one() << drop) - dropped,
            residual_den_log2: drop,
        }
    } else {
        Neighbors {
            floor: toward_zero,
            ceil: away,
            residual_num: dropped,
            residual_den_log2: drop,
        }
    })
}
