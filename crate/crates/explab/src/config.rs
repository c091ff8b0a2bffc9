use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use srcore::{FloatFormat, RoundingMode, SoftValue};

use crate::error::{LabError, Result};
use crate::sampling::{Distribution, MAX_RANDOM_BITS, MAX_REPS, MAX_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    Horner,
    Pairwise,
    Recursive,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Horner => "horner",
            Self::Pairwise => "pairwise",
            Self::Recursive => "recursive",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horner" => Ok(Self::Horner),
            "pairwise" => Ok(Self::Pairwise),
            "recursive" => Ok(Self::Recursive),
            _ => Err(LabError::Config(format!("unknown experiment kind {s:?}"))),
        }
    }
}

/// One experiment: every size in `sizes` crossed with every mode in `modes`.
///
/// For Horner, `n` is the degree (so `n + 1` coefficients); for summation it
/// is the number of summands.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub format: FloatFormat,
    /// Evaluation point; Horner only.
    pub x: Option<SoftValue>,
    pub dist: Distribution,
    pub sizes: Vec<u64>,
    pub modes: Vec<RoundingMode>,
    /// Repetitions of each stochastic mode; deterministic modes run once.
    pub reps: u32,
    pub seed: u64,
    pub lambda: f64,
    pub out_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Binary16 Horner at `x = 1 - 2^-10` with `U[0, 1]` coefficients,
    /// 30 repetitions.
    pub fn horner_default(seed: u64) -> Self {
        Self {
            kind: ExperimentKind::Horner,
            format: FloatFormat::binary16(),
            x: Some(SoftValue::from_f64(0.9990234375).expect("finite")),
            dist: Distribution::Uniform01,
            sizes: geometric_sizes(10, 4000, 16),
            modes: default_modes(ExperimentKind::Horner),
            reps: 30,
            seed,
            lambda: 0.1,
            out_path: None,
        }
    }

    /// Bfloat16 summation of `U[0, 1e5]` values, one run per mode.
    pub fn summation_default(kind: ExperimentKind, seed: u64) -> Self {
        Self {
            kind,
            format: FloatFormat::bfloat16(),
            x: None,
            dist: Distribution::Uniform0To1e5,
            sizes: geometric_sizes(1000, 1_000_000, 16),
            modes: default_modes(kind),
            reps: 1,
            seed,
            lambda: 0.1,
            out_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if self.sizes.is_empty() {
            return bad("sizes must not be empty".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sizes must be strictly ascending".into());
        }
        if *self.sizes.last().unwrap() > MAX_SIZE {
            return bad(format!("sizes must not exceed {MAX_SIZE}"));
        }
        if self.kind != ExperimentKind::Horner && self.sizes[0] == 0 {
            return bad("a summation needs at least one summand".into());
        }
        if self.modes.is_empty() {
            return bad("modes must not be empty".into());
        }
        for (i, mode) in self.modes.iter().enumerate() {
            mode.validate()?;
            if mode.random_bits().is_some_and(|r| r > MAX_RANDOM_BITS) {
                return bad(format!("{mode}: at most {MAX_RANDOM_BITS} random bits"));
            }
            if self.modes[..i].contains(mode) {
                return bad(format!("mode {mode} listed twice"));
            }
        }
        if self.reps == 0 || self.reps > MAX_REPS {
            return bad(format!("reps must lie in 1..={MAX_REPS}"));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad(format!("lambda must lie in (0, 1), got {}", self.lambda));
        }
        let horner = self.kind == ExperimentKind::Horner;
        if horner != self.dist.is_coefficient_dist() {
            return bad(format!("distribution {} does not fit a {} experiment", self.dist, self.kind));
        }
        match (&self.x, horner) {
            (None, true) => return bad("horner needs an evaluation point x".into()),
            (Some(_), false) => return bad(format!("x is meaningless for {}", self.kind)),
            (Some(x), true) if !self.format.contains(x) => {
                return bad(format!("x = {x} is not representable in {}", self.format));
            }
            _ => {}
        }
        Ok(())
    }
}

pub fn default_modes(kind: ExperimentKind) -> Vec<RoundingMode> {
    let rs: &[u32] = match kind {
        ExperimentKind::Horner => &[3, 6, 8, 12],
        _ => &[3, 6, 12],
    };
    std::iter::once(RoundingMode::Nearest)
        .chain(rs.iter().map(|&r| RoundingMode::SrLimited(r)))
        .collect()
}

/// `points` sizes spaced geometrically from `lo` to `hi` inclusive, rounded
/// to integers; duplicates after rounding are dropped.
pub fn geometric_sizes(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    assert!(lo >= 1 && lo <= hi && points >= 1, "bad geometric grid");
    if points == 1 || lo == hi {
        return vec![hi];
    }
    let ratio = (hi as f64 / lo as f64).ln();
    let mut sizes: Vec<u64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            ((lo as f64) * (ratio * t).exp()).round() as u64
        })
        .collect();
    sizes[0] = lo;
    sizes[points - 1] = hi;
    sizes.dedup();
    sizes
}

/// `"10,100,1000"`, or `"lo..hi"` / `"lo..hi:points"` for a geometric grid
/// (16 points by default).
pub fn parse_sizes(s: &str) -> Result<Vec<u64>> {
    let err = |msg: &str| LabError::Config(format!("sizes {s:?}: {msg}"));
    let int = |t: &str| t.trim().parse::<u64>().map_err(|_| err("expected an integer"));
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, points) = match rest.split_once(':') {
            Some((hi, p)) => (hi, int(p)? as usize),
            None => (rest, 16),
        };
        let (lo, hi) = (int(lo)?, int(hi)?);
        if lo == 0 || lo > hi || points == 0 {
            return Err(err("need 1 <= lo <= hi and at least one point"));
        }
        return Ok(geometric_sizes(lo, hi, points));
    }
    let sizes = s.split(',').map(int).collect::<Result<Vec<_>>>()?;
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(err("list must be strictly ascending"));
    }
    Ok(sizes)
}
