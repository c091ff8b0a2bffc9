use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::format::FloatFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueClass {
    Zero,
    Finite,
}

/// An exact binary number `(-1)^s * significand * 2^(exponent - width + 1)`.
///
/// The representation is canonical: a nonzero significand has its top bit at
/// position `width - 1` and its lowest bit set, so `width` is the minimal
/// number of significand bits and structural equality is numeric equality.
/// `exponent` is the binade, `floor(log2 |x|)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SoftValue {
    negative: bool,
    exponent: i64,
    significand: BigUint,
}

impl SoftValue {
    pub fn zero() -> Self {
        Self {
            negative: false,
            exponent: 0,
            significand: BigUint::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_parts(false, BigUint::one(), 0)
    }

    /// `(-1)^negative * significand * 2^lsb_exponent`, normalized.
    pub fn from_parts(negative: bool, significand: BigUint, lsb_exponent: i64) -> Self {
        let Some(tz) = significand.trailing_zeros() else {
            return Self::zero();
        };
        let significand = significand >> tz;
        let lsb = lsb_exponent + tz as i64;
        let exponent = lsb + significand.bits() as i64 - 1;
        Self {
            negative,
            exponent,
            significand,
        }
    }

    /// `mantissa * 2^lsb_exponent`.
    pub fn from_bigint(mantissa: BigInt, lsb_exponent: i64) -> Self {
        let (sign, magnitude) = mantissa.into_parts();
        Self::from_parts(sign == Sign::Minus, magnitude, lsb_exponent)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0)
    }

    /// Exact conversion of a finite `f64` (subnormals included).
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (sig, lsb) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Some(Self::from_parts(v < 0.0, BigUint::from(sig), lsb))
    }

    pub fn class(&self) -> ValueClass {
        if self.is_zero() {
            ValueClass::Zero
        } else {
            ValueClass::Finite
        }
    }

    pub fn is_zero(&self) -> bool {
        self.significand.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Binade of a nonzero value; 0 for zero.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn significand(&self) -> &BigUint {
        &self.significand
    }

    /// Number of significant bits; 0 for zero.
    pub fn width(&self) -> u64 {
        self.significand.bits()
    }

    /// Weight of the lowest significand bit.
    pub fn lsb_exponent(&self) -> i64 {
        self.exponent - self.width() as i64 + 1
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        if !out.is_zero() {
            out.negative = !out.negative;
        }
        out
    }

    pub fn abs(&self) -> Self {
        let mut out = self.clone();
        out.negative = false;
        out
    }

    fn signed_mantissa(&self, lsb: i64) -> BigInt {
        let shifted = &self.significand << (self.lsb_exponent() - lsb) as u64;
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, shifted)
    }

    /// Mathematically exact sum; the width grows as needed.
    pub fn exact_add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lsb = self.lsb_exponent().min(other.lsb_exponent());
        Self::from_bigint(self.signed_mantissa(lsb) + other.signed_mantissa(lsb), lsb)
    }

    pub fn exact_sub(&self, other: &Self) -> Self {
        self.exact_add(&other.neg())
    }

    /// Mathematically exact product.
    pub fn exact_mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::from_parts(
            self.negative != other.negative,
            &self.significand * &other.significand,
            self.lsb_exponent() + other.lsb_exponent(),
        )
    }

    /// Magnitude truncation (round toward zero) to `bits` significant bits.
    pub fn truncate_to(&self, bits: u32) -> Self {
        assert!(bits >= 1, "truncation width must be positive");
        let width = self.width();
        if width <= bits as u64 {
            return self.clone();
        }
        let drop = width - bits as u64;
        Self::from_parts(
            self.negative,
            &self.significand >> drop,
            self.lsb_exponent() + drop as i64,
        )
    }

    pub fn to_rational(&self) -> BigRational {
        let lsb = self.lsb_exponent();
        let sign = if self.is_zero() {
            Sign::NoSign
        } else if self.negative {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let numer = BigInt::from_biguint(sign, self.significand.clone());
        if lsb >= 0 {
            BigRational::from_integer(numer << lsb as u64)
        } else {
            BigRational::new_raw(numer, BigInt::one() << (-lsb) as u64)
        }
    }

    /// Nearest `f64` (saturating to infinity, flushing through subnormals).
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self, &Self::one())
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.exponent.cmp(&other.exponent).then_with(|| {
            let (wa, wb) = (self.width(), other.width());
            match wa.cmp(&wb) {
                Ordering::Less => (&self.significand << (wb - wa)).cmp(&other.significand),
                Ordering::Greater => self.significand.cmp(&(&other.significand << (wa - wb))),
                Ordering::Equal => self.significand.cmp(&other.significand),
            }
        })
    }
}

impl Ord for SoftValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |v: &Self| match (v.is_zero(), v.negative) {
            (true, _) => 1,
            (false, true) => 0,
            (false, false) => 2,
        };
        match rank(self).cmp(&rank(other)) {
            Ordering::Equal if self.negative => other.cmp_magnitude(self),
            Ordering::Equal => self.cmp_magnitude(other),
            ord => ord,
        }
    }
}

impl PartialOrd for SoftValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `num / den` rounded to the nearest `f64`. Returns NaN when `den` is zero.
pub fn ratio_to_f64(num: &SoftValue, den: &SoftValue) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    (num.to_rational() / den.to_rational())
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Binary scientific notation, e.g. `-0b1.011p-2`; readable back by [`parse_value`].
impl fmt::Display for SoftValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0b0");
        }
        let digits = self.significand.to_str_radix(2);
        let (lead, rest) = digits.split_at(1);
        let sign = if self.negative { "-" } else { "" };
        if rest.is_empty() {
            write!(f, "{sign}0b{lead}p{}", self.exponent)
        } else {
            write!(f, "{sign}0b{lead}.{rest}p{}", self.exponent)
        }
    }
}

impl fmt::Debug for SoftValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SoftValue({self} ≈ {})", self.to_f64())
    }
}

// Decimal exponents beyond this are rejected rather than expanded.
const MAX_DECIMAL_EXPONENT: i64 = 100_000;

/// Parses a decimal (`0.9990234375`, `-1.5e-3`) or binary (`0b1.011p-2`)
/// literal and returns it exactly. Literals that would need rounding to fit
/// `fmt` are rejected.
pub fn parse_value(text: &str, fmt: &FloatFormat) -> Result<SoftValue> {
    let value = parse_exact(text)?;
    if fmt.contains(&value) {
        return Ok(value);
    }
    let reason = if value.width() > fmt.precision() as u64 {
        format!(
            "needs {} significand bits, format has {}",
            value.width(),
            fmt.precision()
        )
    } else {
        format!("binade 2^{} is outside the normal range", value.exponent())
    };
    Err(Error::NotRepresentable {
        literal: text.to_owned(),
        format: fmt.to_string(),
        reason,
    })
}

fn parse_exact(text: &str) -> Result<SoftValue> {
    let malformed = || Error::Parse(text.to_owned());
    let t = text.trim();
    let (negative, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (radix, body, exp_marker) = match body.strip_prefix("0b").or_else(|| body.strip_prefix("0B")) {
        Some(rest) => (2u32, rest, ['p', 'P']),
        None => (10u32, body, ['e', 'E']),
    };
    let (mantissa, exp) = match body.find(exp_marker) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let exp: i64 = match exp {
        Some(e) => e.parse().map_err(|_| malformed())?,
        None => 0,
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    let digits: String = [int_part, frac_part].concat();
    if !digits.chars().all(|c| c.is_digit(radix)) {
        return Err(malformed());
    }
    let digits = BigUint::parse_bytes(digits.as_bytes(), radix).ok_or_else(malformed)?;
    let scale = exp - frac_part.len() as i64;
    if radix == 2 {
        return Ok(SoftValue::from_parts(negative, digits, scale));
    }
    if scale.abs() > MAX_DECIMAL_EXPONENT {
        return Err(Error::Parse(format!("{text}: decimal exponent too large")));
    }
    let five_pow = num_traits::pow(BigUint::from(5u32), scale.unsigned_abs() as usize);
    if scale >= 0 {
        return Ok(SoftValue::from_parts(negative, digits * five_pow, scale));
    }
    // digits * 10^scale = digits / 5^k * 2^-k, dyadic only if 5^k divides digits
    let (quotient, remainder) = digits.div_rem(&five_pow);
    if !remainder.is_zero() {
        return Err(Error::NotRepresentable {
            literal: text.to_owned(),
            format: "any binary format".to_owned(),
            reason: "no finite binary expansion".to_owned(),
        });
    }
    Ok(SoftValue::from_parts(negative, quotient, scale))
}
