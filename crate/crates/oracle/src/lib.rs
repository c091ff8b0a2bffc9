//! Exact-rational reference arithmetic.
//!
//! Everything here works on `BigRational` and derives neighbours, rounding
//! and truncation from the real-number definitions (floor of a quotient by
//! the grid spacing), never from significand bit patterns. Tests use it to
//! check the bit-level implementation in `srcore`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `2^e` as an exact rational.
pub fn pow2(e: i64) -> BigRational {
    let one = BigInt::one();
    if e >= 0 {
        BigRational::from_integer(one << e as u64)
    } else {
        BigRational::new(one.clone(), one << (-e) as u64)
    }
}

/// `(-1)^neg * significand * 2^lsb`.
pub fn dyadic(negative: bool, significand: &BigUint, lsb: i64) -> BigRational {
    let sign = if significand.is_zero() {
        Sign::NoSign
    } else if negative {
        Sign::Minus
    } else {
        Sign::Plus
    };
    BigRational::from_integer(BigInt::from_biguint(sign, significand.clone())) * pow2(lsb)
}

/// `floor(log2 |x|)` for nonzero `x`.
pub fn binade(x: &BigRational) -> i64 {
    assert!(!x.is_zero(), "binade of zero");
    let a = x.abs();
    let mut e = a.numer().bits() as i64 - a.denom().bits() as i64;
    // bit lengths pin the answer to e or e-1
    while pow2(e) > a {
        e -= 1;
    }
    while pow2(e + 1) <= a {
        e += 1;
    }
    e
}

/// Spacing of the `p`-bit grid in the binade of `x`.
pub fn grid_spacing(x: &BigRational, p: u32) -> BigRational {
    pow2(binade(x) - p as i64 + 1)
}

/// Largest `p`-bit number `<= x` (unbounded exponent).
pub fn floor_p(x: &BigRational, p: u32) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let g = grid_spacing(x, p);
    (x / &g).floor() * g
}

/// Smallest `p`-bit number `>= x` (unbounded exponent).
pub fn ceil_p(x: &BigRational, p: u32) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let g = grid_spacing(x, p);
    (x / &g).ceil() * g
}

/// `x` rounded to the nearest `p`-bit number, ties to the even multiple of the grid spacing.
pub fn round_nearest_even(x: &BigRational, p: u32) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let g = grid_spacing(x, p);
    let scaled = x / &g;
    let lo = scaled.floor();
    let hi = scaled.ceil();
    let dlo = &scaled - &lo;
    let dhi = &hi - &scaled;
    let pick = if dlo < dhi {
        lo
    } else if dhi < dlo {
        hi
    } else {
        let two = BigInt::from(2);
        if (lo.to_integer() % &two).is_zero() {
            lo
        } else {
            hi
        }
    };
    pick * g
}

/// Round toward zero onto the `bits`-bit grid.
pub fn truncate(x: &BigRational, bits: u32) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let g = grid_spacing(x, bits);
    (x / &g).trunc() * g
}

/// `(x - floor_p(x)) / (ceil_p(x) - floor_p(x))`, or zero for representable `x`.
pub fn up_probability(x: &BigRational, p: u32) -> BigRational {
    let f = floor_p(x, p);
    let c = ceil_p(x, p);
    if f == c {
        BigRational::zero()
    } else {
        (x - &f) / (c - f)
    }
}

/// `(fl_{p+r}(x) - floor_p(x)) / (ceil_p(x) - floor_p(x))`.
pub fn limited_up_probability(x: &BigRational, p: u32, r: u32) -> BigRational {
    let f = floor_p(x, p);
    let c = ceil_p(x, p);
    if f == c {
        BigRational::zero()
    } else {
        (truncate(x, p + r) - &f) / (c - f)
    }
}

/// Whether `x` is a `p`-bit number with binade in `[emin, emax]` (zero included).
pub fn representable(x: &BigRational, p: u32, range: Option<(i64, i64)>) -> bool {
    if x.is_zero() {
        return true;
    }
    if floor_p(x, p) != *x {
        return false;
    }
    match range {
        Some((lo, hi)) => (lo..=hi).contains(&binade(x)),
        None => true,
    }
}

/// Strict normal-range contract: `x` itself must lie in the normal binades and,
/// if it is not representable, its larger-magnitude neighbour must too.
pub fn rounding_in_range(x: &BigRational, p: u32, emin: i64, emax: i64) -> bool {
    if x.is_zero() {
        return true;
    }
    let e = binade(x);
    if e < emin || e > emax {
        return false;
    }
    let f = floor_p(x, p);
    let c = ceil_p(x, p);
    if f == c {
        return true;
    }
    let away = if x.is_positive() { c } else { f };
    binade(&away) <= emax
}

/// Horner's recurrence with a rounding applied after every product and sum.
pub fn horner_with<F>(coeffs: &[BigRational], x: &BigRational, mut round: F) -> BigRational
where
    F: FnMut(&BigRational) -> BigRational,
{
    let mut acc = coeffs.last().expect("empty polynomial").clone();
    for a in coeffs.iter().rev().skip(1) {
        acc = round(&(&acc * x));
        acc = round(&(&acc + a));
    }
    acc
}

/// Balanced pairwise summation, splitting at `ceil(n/2)`, with a rounding after each addition.
pub fn pairwise_with<F>(values: &[BigRational], round: &mut F) -> BigRational
where
    F: FnMut(&BigRational) -> BigRational,
{
    match values.len() {
        0 => panic!("empty summation"),
        1 => values[0].clone(),
        n => {
            let m = n.div_ceil(2);
            let left = pairwise_with(&values[..m], round);
            let right = pairwise_with(&values[m..], round);
            round(&(left + right))
        }
    }
}

/// Left-to-right summation with a rounding after each addition.
pub fn recursive_with<F>(values: &[BigRational], mut round: F) -> BigRational
where
    F: FnMut(&BigRational) -> BigRational,
{
    let mut acc = values[0].clone();
    for v in &values[1..] {
        acc = round(&(&acc + v));
    }
    acc
}
