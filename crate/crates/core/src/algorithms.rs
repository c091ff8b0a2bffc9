//! Horner evaluation and summation, with every operation rounded in a chosen
//! format and mode.
//!
//! Random bits are consumed in execution order: Horner steps 1..2n, and a
//! depth-first traversal (left subtree, right subtree, then the node's own
//! addition) for pairwise summation.

use crate::error::{Error, Result};
use crate::format::FloatFormat;
use crate::rounding::{exact_op, round, round_value, BitSource, OpKind, OpTrace, RoundingMode};
use crate::value::SoftValue;

/// `P(x) = sum a_i x^i` with coefficients `a_0..a_n` in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<SoftValue>,
}

impl Polynomial {
    /// Fails on an empty coefficient list or a coefficient outside `fmt`.
    pub fn new(coefficients: Vec<SoftValue>, fmt: &FloatFormat) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        if let Some(i) = coefficients.iter().position(|a| !fmt.contains(a)) {
            return Err(Error::InvalidArgument(format!(
                "coefficient a_{i} = {} is not in {fmt}",
                coefficients[i]
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[SoftValue] {
        &self.coefficients
    }

    /// `P(x)` in exact arithmetic.
    pub fn evaluate_exact(&self, x: &SoftValue) -> SoftValue {
        let mut acc = self.coefficients[self.degree()].clone();
        for a in self.coefficients.iter().rev().skip(1) {
            acc = acc.exact_mul(x).exact_add(a);
        }
        acc
    }

    /// `sum |a_i| |x|^i` in exact arithmetic.
    pub fn evaluate_abs_exact(&self, x: &SoftValue) -> SoftValue {
        let x = x.abs();
        let mut acc = self.coefficients[self.degree()].abs();
        for a in self.coefficients.iter().rev().skip(1) {
            acc = acc.exact_mul(&x).exact_add(&a.abs());
        }
        acc
    }
}

/// Summands `a_1..a_n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummationInput {
    values: Vec<SoftValue>,
}

impl SummationInput {
    pub fn new(values: Vec<SoftValue>, fmt: &FloatFormat) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("summation needs at least one value".into()));
        }
        if let Some(i) = values.iter().position(|a| !fmt.contains(a)) {
            return Err(Error::InvalidArgument(format!(
                "summand {} = {} is not in {fmt}",
                i + 1,
                values[i]
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[SoftValue] {
        &self.values
    }

    pub fn exact_sum(&self) -> SoftValue {
        self.values
            .iter()
            .fold(SoftValue::zero(), |acc, v| acc.exact_add(v))
    }

    pub fn exact_abs_sum(&self) -> SoftValue {
        self.values
            .iter()
            .fold(SoftValue::zero(), |acc, v| acc.exact_add(&v.abs()))
    }
}

/// Depth of the balanced summation tree over `n` leaves, `ceil(log2 n)`.
pub fn pairwise_depth(n: usize) -> u32 {
    assert!(n >= 1);
    usize::BITS - (n - 1).leading_zeros()
}

struct Stepper<'a, B> {
    fmt: &'a FloatFormat,
    mode: RoundingMode,
    bits: &'a mut B,
    traces: Option<Vec<OpTrace>>,
}

impl<'a, B: BitSource> Stepper<'a, B> {
    fn new(fmt: &'a FloatFormat, mode: RoundingMode, bits: &'a mut B, tracing: bool) -> Result<Self> {
        mode.validate()?;
        Ok(Self {
            fmt,
            mode,
            bits,
            traces: tracing.then(Vec::new),
        })
    }

    fn step(&mut self, a: &SoftValue, b: &SoftValue, kind: OpKind) -> Result<SoftValue> {
        let exact = exact_op(a, b, kind);
        match &mut self.traces {
            Some(traces) => {
                let (value, mut t) = round(&exact, self.mode, self.fmt, self.bits)?;
                t.kind = Some(kind);
                traces.push(t);
                Ok(value)
            }
            None => round_value(&exact, self.mode, self.fmt, self.bits),
        }
    }

    fn horner(&mut self, poly: &Polynomial, x: &SoftValue) -> Result<SoftValue> {
        if !self.fmt.contains(x) {
            return Err(Error::InvalidArgument(format!("x = {x} is not in {}", self.fmt)));
        }
        let coeffs = poly.coefficients();
        let mut acc = coeffs[poly.degree()].clone();
        for a in coeffs.iter().rev().skip(1) {
            acc = self.step(&acc, x, OpKind::Mul)?;
            acc = self.step(&acc, a, OpKind::Add)?;
        }
        Ok(acc)
    }

    fn pairwise(&mut self, values: &[SoftValue]) -> Result<SoftValue> {
        match values {
            [] => unreachable!("SummationInput is nonempty"),
            [single] => Ok(single.clone()),
            _ => {
                let mid = values.len().div_ceil(2);
                let left = self.pairwise(&values[..mid])?;
                let right = self.pairwise(&values[mid..])?;
                self.step(&left, &right, OpKind::Add)
            }
        }
    }

    fn recursive(&mut self, values: &[SoftValue]) -> Result<SoftValue> {
        let mut acc = values[0].clone();
        for v in &values[1..] {
            acc = self.step(&acc, v, OpKind::Add)?;
        }
        Ok(acc)
    }

    fn finish(self, value: SoftValue) -> (SoftValue, Vec<OpTrace>) {
        (value, self.traces.unwrap_or_default())
    }
}

/// Horner's rule `((a_n x + a_{n-1}) x + ...) x + a_0` with `2n` rounded
/// operations: a product at each odd step, a sum at each even step.
pub fn horner<B: BitSource>(
    poly: &Polynomial,
    x: &SoftValue,
    fmt: &FloatFormat,
    mode: RoundingMode,
    bits: &mut B,
) -> Result<(SoftValue, Vec<OpTrace>)> {
    let mut s = Stepper::new(fmt, mode, bits, true)?;
    let value = s.horner(poly, x)?;
    Ok(s.finish(value))
}

/// [`horner`] without recording traces.
pub fn horner_value<B: BitSource>(
    poly: &Polynomial,
    x: &SoftValue,
    fmt: &FloatFormat,
    mode: RoundingMode,
    bits: &mut B,
) -> Result<SoftValue> {
    Stepper::new(fmt, mode, bits, false)?.horner(poly, x)
}

/// Balanced binary-tree summation of depth `ceil(log2 n)`: the first
/// `ceil(n/2)` values form the left subtree. Equivalent to padding with
/// zeros up to a power of two, since adding an exact zero never rounds.
pub fn pairwise_sum<B: BitSource>(
    input: &SummationInput,
    fmt: &FloatFormat,
    mode: RoundingMode,
    bits: &mut B,
) -> Result<(SoftValue, Vec<OpTrace>)> {
    let mut s = Stepper::new(fmt, mode, bits, true)?;
    let value = s.pairwise(input.values())?;
    Ok(s.finish(value))
}

pub fn pairwise_sum_value<B: BitSource>(
    input: &SummationInput,
    fmt: &FloatFormat,
    mode: RoundingMode,
    bits: &mut B,
) -> Result<SoftValue> {
    Stepper::new(fmt, mode, bits, false)?.pairwise(input.values())
}

/// Left-to-right summation with `n - 1` rounded additions.
pub fn recursive_sum<B: BitSource>(
    input: &SummationInput,
    fmt: &FloatFormat,
    mode: RoundingMode,
    bits: &mut B,
) -> Result<(SoftValue, Vec<OpTrace>)> {
    let mut s = Stepper::new(fmt, mode, bits, true)?;
    let value = s.recursive(input.values())?;
    Ok(s.finish(value))
}

pub fn recursive_sum_value<B: BitSource>(
    input: &SummationInput,
    fmt: &FloatFormat,
    mode: RoundingMode,
    bits: &mut B,
) -> Result<SoftValue> {
    Stepper::new(fmt, mode, bits, false)?.recursive(input.values())
}
