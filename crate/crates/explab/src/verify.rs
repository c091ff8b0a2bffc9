//! Statistical verification battery: stochastic-rounding unbiasedness, the
//! limited-bit bias identity, bound coverage for Horner and pairwise
//! summation, and the mean-zero property of the rounding-error increments.
//!
//! Check `c`, trial `t` draws from stream `c << 56 | t` (operands) and
//! `c << 56 | 1 << 55 | t` (rounding).

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use srcore::bounds::{cond_poly, cond_sum, horner_bound, pairwise_bound, BoundParams};
use srcore::{
    horner_value, neighbors, op, pairwise_sum_value, ratio_to_f64, round_sr_limited, round_value, BitSource,
    FixedBits, FloatFormat, OpKind, Polynomial, RngStream, RoundingMode, SoftValue, SummationInput,
};

use crate::error::Result;
use crate::sampling::Distribution;

pub const REPORT_SCHEMA: &str = "srlab-verify-v1";

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Compared against `tolerance` with `<=`.
    pub observed: f64,
    pub tolerance: f64,
    pub trials: u64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub unbiased_cases: usize,
    pub unbiased_draws: u64,
    pub bias_operands: usize,
    pub bias_max_r: u32,
    pub horner_trials: u64,
    pub pairwise_trials: u64,
    pub alpha_ops: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            unbiased_cases: 100,
            unbiased_draws: 100_000,
            bias_operands: 100,
            bias_max_r: 8,
            horner_trials: 1000,
            pairwise_trials: 1000,
            alpha_ops: 100_000,
        }
    }
}

impl VerifyOptions {
    /// Reduced counts for smoke runs.
    pub fn quick() -> Self {
        Self {
            unbiased_cases: 20,
            unbiased_draws: 10_000,
            bias_operands: 20,
            bias_max_r: 8,
            horner_trials: 100,
            pairwise_trials: 20,
            alpha_ops: 20_000,
        }
    }
}

fn operand_stream(seed: u64, check: u64, trial: u64) -> RngStream {
    RngStream::new(seed, check << 56 | trial)
}

fn rounding_stream(seed: u64, check: u64, trial: u64) -> RngStream {
    RngStream::new(seed, check << 56 | 1 << 55 | trial)
}

/// A random normal value of `fmt` with a full-width significand and binade in `[elo, ehi]`.
pub fn random_operand<B: BitSource>(bits: &mut B, fmt: &FloatFormat, elo: i64, ehi: i64) -> SoftValue {
    let p = fmt.precision();
    let negative = bits.next_bit();
    let e = elo + (bits.next_bits(32) % (ehi - elo + 1) as u64) as i64;
    let mut sig = BigUint::from(1u32) << (p - 1);
    for i in 0..p - 1 {
        if bits.next_bit() {
            sig.set_bit(i as u64, true);
        }
    }
    SoftValue::from_parts(negative, sig, e - (p as i64 - 1))
}

/// An exact sum or product of two binary16 values that is in range but not representable.
pub fn random_inexact_result<B: BitSource>(bits: &mut B, fmt: &FloatFormat) -> SoftValue {
    loop {
        let a = random_operand(bits, fmt, -5, 5);
        let b = random_operand(bits, fmt, -5, 5);
        let x = if bits.next_bit() { a.exact_mul(&b) } else { a.exact_add(&b) };
        if neighbors(&x, fmt).is_ok_and(|nb| !nb.is_exact()) {
            return x;
        }
    }
}

/// Exact stochastic rounding of an inexact value lands on `ceil` with
/// frequency `q`: `|ups/N - q| <= 5 * 0.5 / sqrt(N)` for every case.
pub fn sr_unbiasedness(seed: u64, cases: usize, draws: u64) -> CheckResult {
    let fmt = FloatFormat::binary16();
    let z: Vec<f64> = (0..cases as u64)
        .into_par_iter()
        .map(|c| {
            let x = random_inexact_result(&mut operand_stream(seed, 1, c), &fmt);
            let nb = neighbors(&x, &fmt).expect("in range");
            let mut bits = rounding_stream(seed, 1, c);
            let mut ups = 0u64;
            for _ in 0..draws {
                let y = round_value(&x, RoundingMode::SrExact, &fmt, &mut bits).expect("in range");
                if y == nb.ceil {
                    ups += 1;
                } else {
                    assert_eq!(y, nb.floor, "stochastic rounding left the neighbours of {x}");
                }
            }
            let n = draws as f64;
            (ups as f64 / n - nb.up_probability()).abs() / (0.5 / n.sqrt())
        })
        .collect();
    let worst = z.iter().copied().fold(0.0, f64::max);
    CheckResult {
        name: "sr_exact_unbiasedness".into(),
        passed: worst <= 5.0,
        observed: worst,
        tolerance: 5.0,
        trials: cases as u64 * draws,
        detail: format!("{cases} binary16 results x {draws} draws; worst deviation in units of 0.5/sqrt(N)"),
    }
}

/// Averaging `SR_{p,r}(x)` over all `2^r` draws gives exactly `x` truncated to `p + r` bits.
pub fn bias_identity(seed: u64, operands: usize, max_r: u32) -> CheckResult {
    let fmt = FloatFormat::binary16();
    let p = fmt.precision();
    let mismatches: usize = (0..operands as u64)
        .into_par_iter()
        .map(|c| {
            let x = random_inexact_result(&mut operand_stream(seed, 2, c), &fmt);
            (1..=max_r)
                .filter(|&r| {
                    let mut total = SoftValue::zero();
                    for z in 0..1u64 << r {
                        let (y, _) = round_sr_limited(&x, &fmt, r, &mut FixedBits::from_value(z, r)).expect("in range");
                        total = total.exact_add(&y);
                    }
                    let want = x.truncate_to(p + r).exact_mul(&SoftValue::from_parts(false, 1u32.into(), r as i64));
                    total != want
                })
                .count()
        })
        .sum();
    let cases = operands as u64 * max_r as u64;
    CheckResult {
        name: "sr_limited_bias_identity".into(),
        passed: mismatches == 0,
        observed: mismatches as f64,
        tolerance: 0.0,
        trials: cases,
        detail: format!("{operands} binary16 results x r = 1..={max_r}, all 2^r draws enumerated; count of inexact means"),
    }
}

fn coverage(name: &str, detail: String, lambda: f64, outcomes: Vec<(f64, f64)>) -> CheckResult {
    let violations = outcomes.iter().filter(|(err, bound)| err > bound).count();
    let worst = outcomes.iter().map(|(err, bound)| err / bound).fold(0.0, f64::max);
    let rate = violations as f64 / outcomes.len() as f64;
    CheckResult {
        name: name.into(),
        passed: rate <= lambda,
        observed: rate,
        tolerance: lambda,
        trials: outcomes.len() as u64,
        detail: format!("{detail}; {violations} violations, largest error/bound {worst:.3e}"),
    }
}

fn relative_error(y: &SoftValue, exact: &SoftValue) -> f64 {
    ratio_to_f64(&y.exact_sub(exact).abs(), &exact.abs())
}

/// Horner evaluation at `x = 1 - 2^-10` in binary16 with `SR_{11,6}`, `U[0,1]`
/// coefficients: the error exceeds `cond * horner_bound` in at most a
/// `lambda` fraction of trials.
pub fn horner_coverage(seed: u64, trials: u64) -> Result<CheckResult> {
    let (n, r, lambda) = (100u64, 6u32, 0.1);
    let fmt = FloatFormat::binary16();
    let x = SoftValue::from_f64(0.9990234375).expect("finite");
    let factor = horner_bound(&BoundParams::new(n, fmt.precision(), Some(r), lambda)?);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let coeffs = Distribution::Uniform01.sample_many(n as usize + 1, &fmt, &mut operand_stream(seed, 3, t))?;
            let poly = Polynomial::new(coeffs, &fmt)?;
            let exact = poly.evaluate_exact(&x);
            let y = horner_value(&poly, &x, &fmt, RoundingMode::SrLimited(r), &mut rounding_stream(seed, 3, t))?;
            Ok((relative_error(&y, &exact), cond_poly(&poly, &x)? * factor))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(coverage(
        "horner_bound_coverage",
        format!("binary16, degree {n}, r = {r}, lambda = {lambda}"),
        lambda,
        outcomes,
    ))
}

/// Pairwise summation of `2^16` bfloat16 `U[0, 1e5]` values with `SR_{8,3}`.
pub fn pairwise_coverage(seed: u64, trials: u64) -> Result<CheckResult> {
    let (n, r, lambda) = (1u64 << 16, 3u32, 0.1);
    let fmt = FloatFormat::bfloat16();
    let factor = pairwise_bound(&BoundParams::new(n, fmt.precision(), Some(r), lambda)?);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let values = Distribution::Uniform0To1e5.sample_many(n as usize, &fmt, &mut operand_stream(seed, 4, t))?;
            let input = SummationInput::new(values, &fmt)?;
            let exact = input.exact_sum();
            let y = pairwise_sum_value(&input, &fmt, RoundingMode::SrLimited(r), &mut rounding_stream(seed, 4, t))?;
            Ok((relative_error(&y, &exact), cond_sum(&input)? * factor))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(coverage(
        "pairwise_bound_coverage",
        format!("bfloat16, n = {n}, r = {r}, lambda = {lambda}"),
        lambda,
        outcomes,
    ))
}

/// The increments `alpha = delta - beta` of `SR_{11,6}` average to zero
/// within five standard errors.
pub fn alpha_mean_zero(seed: u64, ops: u64) -> CheckResult {
    let fmt = FloatFormat::binary16();
    let alphas: Vec<f64> = (0..ops)
        .into_par_iter()
        .map(|t| {
            let mut bits = operand_stream(seed, 5, t);
            let a = random_operand(&mut bits, &fmt, -5, 5);
            let b = random_operand(&mut bits, &fmt, -5, 5);
            let kind = if bits.next_bit() { OpKind::Mul } else { OpKind::Add };
            let (_, trace) = op(&a, &b, kind, RoundingMode::SrLimited(6), &fmt, &mut rounding_stream(seed, 5, t))
                .expect("operands stay in range");
            trace.alpha_f64()
        })
        .collect();
    let n = alphas.len() as f64;
    let mean = alphas.iter().sum::<f64>() / n;
    let var = alphas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let z = mean.abs() / (var / n).sqrt();
    CheckResult {
        name: "alpha_mean_zero".into(),
        passed: z <= 5.0,
        observed: z,
        tolerance: 5.0,
        trials: ops,
        detail: format!("binary16 SR_11,6 add/mul; mean alpha {mean:.3e} in standard errors"),
    }
}

pub fn run_verification_suite(seed: u64) -> Result<VerificationReport> {
    run_verification_suite_with(seed, &VerifyOptions::default())
}

pub fn run_verification_suite_with(seed: u64, opts: &VerifyOptions) -> Result<VerificationReport> {
    let checks = vec![
        sr_unbiasedness(seed, opts.unbiased_cases, opts.unbiased_draws),
        bias_identity(seed, opts.bias_operands, opts.bias_max_r),
        horner_coverage(seed, opts.horner_trials)?,
        pairwise_coverage(seed, opts.pairwise_trials)?,
        alpha_mean_zero(seed, opts.alpha_ops),
    ];
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
