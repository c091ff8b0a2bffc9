//! Condition numbers and probabilistic forward-error bounds for Horner
//! evaluation and pairwise summation under limited-precision stochastic
//! rounding.
//!
//! With probability at least `1 - lambda`, the relative error is at most
//! `cond * factor`, where `factor` is
//!
//! ```text
//! Horner (degree n):    sqrt(u_p * gamma_4n(u_p)) * sqrt(ln(2/lambda))
//!                         + gamma_2n(u_p + u_{p+r}) - gamma_2n(u_p)
//! pairwise (h = ceil(log2 n)):
//!                       sqrt(u_p * gamma_2h(u_p)) * sqrt(ln(2/lambda))
//!                         + gamma_h(u_p + u_{p+r}) - gamma_h(u_p)
//! ```
//!
//! The first term is the martingale part and grows like `sqrt(n) u_p`; the
//! second is the truncation bias and grows like `n u_{p+r}`. It vanishes for
//! exact stochastic rounding.
//!
//! `gamma_m(u) = (1+u)^m - 1` is evaluated as `expm1(m * ln1p(u))`, and the
//! bias difference as `(1+u_p)^m * expm1(m * ln1p(u_{p+r} / (1+u_p)))`, so
//! neither suffers cancellation; both are accurate to a few ulps in `f64`.

use crate::algorithms::{pairwise_depth, Polynomial, SummationInput};
use crate::error::{Error, Result};
use crate::value::{ratio_to_f64, SoftValue};

/// `u_k = 2^(1-k)`.
pub fn unit_roundoff(k: u32) -> f64 {
    2f64.powi(1 - k as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Polynomial degree or number of summands.
    pub n: u64,
    pub precision: u32,
    /// `None` for exact stochastic rounding.
    pub random_bits: Option<u32>,
    /// Failure probability, in `(0, 1)`.
    pub lambda: f64,
}

impl BoundParams {
    pub fn new(n: u64, precision: u32, random_bits: Option<u32>, lambda: f64) -> Result<Self> {
        let params = Self {
            n,
            precision,
            random_bits,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if self.precision < 2 {
            return Err(Error::InvalidArgument("precision must be at least 2".into()));
        }
        if self.random_bits == Some(0) {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in (0, 1), got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// `gamma_m(u) = (1+u)^m - 1`.
pub fn gamma(m: u64, u: f64) -> f64 {
    assert!(u >= 0.0, "gamma needs u >= 0");
    if m == 0 || u == 0.0 {
        return 0.0;
    }
    (m as f64 * u.ln_1p()).exp_m1()
}

/// `gamma_m(u_p + u_{p+r}) - gamma_m(u_p)`; zero for unlimited `r`.
pub fn bias_term(m: u64, precision: u32, random_bits: Option<u32>) -> f64 {
    let Some(r) = random_bits else {
        return 0.0;
    };
    if m == 0 {
        return 0.0;
    }
    let up = unit_roundoff(precision);
    let upr = unit_roundoff(precision + r);
    let m = m as f64;
    (m * up.ln_1p()).exp() * (m * (upr / (1.0 + up)).ln_1p()).exp_m1()
}

fn martingale_term(m: u64, precision: u32, lambda: f64) -> f64 {
    let up = unit_roundoff(precision);
    (up * gamma(m, up)).sqrt() * (2.0 / lambda).ln().sqrt()
}

/// Horner bound factor for degree `n`; multiply by [`cond_poly`].
pub fn horner_bound(params: &BoundParams) -> f64 {
    let n = params.n;
    martingale_term(4 * n, params.precision, params.lambda)
        + bias_term(2 * n, params.precision, params.random_bits)
}

/// Pairwise-summation bound factor for `n` summands; multiply by [`cond_sum`].
pub fn pairwise_bound(params: &BoundParams) -> f64 {
    let h = pairwise_depth(params.n as usize) as u64;
    pairwise_bound_for_depth(h, params.precision, params.random_bits, params.lambda)
}

/// Pairwise bound factor for a tree of depth `h`.
pub fn pairwise_bound_for_depth(h: u64, precision: u32, random_bits: Option<u32>, lambda: f64) -> f64 {
    martingale_term(2 * h, precision, lambda) + bias_term(h, precision, random_bits)
}

/// `sum |a_i| |x|^i / |P(x)|`, evaluated exactly and rounded once.
pub fn cond_poly(poly: &Polynomial, x: &SoftValue) -> Result<f64> {
    let value = poly.evaluate_exact(x);
    if value.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(ratio_to_f64(&poly.evaluate_abs_exact(x), &value.abs()))
}

/// `sum |a_i| / |sum a_i|`, evaluated exactly and rounded once.
pub fn cond_sum(input: &SummationInput) -> Result<f64> {
    let sum = input.exact_sum();
    if sum.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(ratio_to_f64(&input.exact_abs_sum(), &sum.abs()))
}

/// Random bits that balance the two bound terms for error-propagation chains
/// of length `k`: `ceil(log2(k) / 2)`, at least 1.
///
/// Computed as the smallest `r >= 1` with `k <= 4^r`, which avoids rounding
/// trouble in `log2` at exact powers of four.
pub fn rule_of_thumb_r(chain_len: f64) -> u32 {
    assert!(chain_len >= 1.0 && chain_len.is_finite(), "chain length must be >= 1");
    let mut r = 1;
    while 4f64.powi(r as i32) < chain_len {
        r += 1;
    }
    r
}

/// Horner's chain length is the degree itself.
pub fn rule_of_thumb_r_horner(degree: u64) -> u32 {
    rule_of_thumb_r(degree.max(1) as f64)
}

/// Pairwise summation chains have length `log2 n`.
pub fn rule_of_thumb_r_pairwise(n: u64) -> u32 {
    rule_of_thumb_r((n.max(2) as f64).log2())
}
