#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::BigRational;
use srcore::{BitSource, FloatFormat, RngStream, SoftValue};

/// A random format value with exponent in `[lo, hi]` and a full-width
/// random significand (occasionally shortened so narrow values show up too).
pub fn random_value(rng: &mut RngStream, fmt: &FloatFormat, lo: i64, hi: i64) -> (SoftValue, BigRational) {
    let p = fmt.precision();
    let negative = rng.next_bit();
    let width = if rng.next_bits(2) == 0 { 1 + rng.next_bits(6) as u32 % p } else { p };
    let sig = (1u64 << (width - 1)) | (rng.next_bits(width - 1) & ((1u64 << (width - 1)) - 1));
    let span = (hi - lo + 1) as u64;
    let exponent = lo + (rng.next_u64() % span) as i64;
    let lsb = exponent - width as i64 + 1;
    let sig = BigUint::from(sig);
    let soft = SoftValue::from_parts(negative, sig.clone(), lsb);
    let rat = sroracle::dyadic(negative, &sig, lsb);
    (soft, rat)
}

pub fn random_in(rng: &mut RngStream, fmt: &FloatFormat) -> (SoftValue, BigRational) {
    let (lo, hi) = fmt.exponent_range().unwrap_or((-20, 20));
    random_value(rng, fmt, lo, hi)
}

/// Every value of a small bounded format, zero included.
pub fn all_values(fmt: &FloatFormat) -> Vec<SoftValue> {
    let p = fmt.precision();
    let (lo, hi) = fmt.exponent_range().expect("bounded format");
    let mut out = vec![SoftValue::zero()];
    for e in lo..=hi {
        for frac in 0..(1u64 << (p - 1)) {
            let sig = BigUint::from((1u64 << (p - 1)) | frac);
            for negative in [false, true] {
                out.push(SoftValue::from_parts(negative, sig.clone(), e - p as i64 + 1));
            }
        }
    }
    out
}
