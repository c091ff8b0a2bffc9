//! Experiment engine.
//!
//! Inputs for each size are sampled once from the size's own stream and
//! shared by every mode and repetition, so repetitions differ only in their
//! rounding draws. Each `(n, mode, rep)` trial owns a rounding stream and
//! trials run in parallel; rows come out ordered by size, then by the
//! config's mode order, whatever the number of worker threads.

use rayon::prelude::*;
use srcore::bounds::{cond_poly, cond_sum, horner_bound, pairwise_bound, BoundParams};
use srcore::{
    horner_value, pairwise_sum_value, ratio_to_f64, recursive_sum_value, Polynomial, RoundingMode, SoftValue,
    SummationInput,
};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, Result};
use crate::sampling::{rounding_stream, sampling_stream};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub kind: ExperimentKind,
    pub format: String,
    pub n: u64,
    pub mode: RoundingMode,
    pub seed: u64,
    pub reps: u32,
    /// `|mean(results) - ref| / |ref|`.
    pub rel_err_of_avg: Option<f64>,
    /// Mean over repetitions of `|result - ref| / |ref|`.
    pub mean_rel_err: Option<f64>,
    /// `cond * bound factor`; stochastic modes only.
    pub bound: Option<f64>,
    pub cond: Option<f64>,
    /// Set when the row could not be computed, e.g. on overflow.
    pub error: Option<String>,
}

impl ResultRow {
    pub fn is_flagged(&self) -> bool {
        self.error.is_some()
    }
}

enum Problem {
    Horner { poly: Polynomial, x: SoftValue },
    Sum { kind: ExperimentKind, input: SummationInput },
}

struct Prepared {
    problem: Problem,
    reference: SoftValue,
    cond: f64,
}

impl Problem {
    fn evaluate(&self, cfg: &ExperimentConfig, n: u64, mode: RoundingMode, rep: u32) -> srcore::Result<SoftValue> {
        let fmt = &cfg.format;
        let mut bits = rounding_stream(cfg.seed, n, mode, rep);
        match self {
            Problem::Horner { poly, x } => horner_value(poly, x, fmt, mode, &mut bits),
            Problem::Sum { kind: ExperimentKind::Pairwise, input } => pairwise_sum_value(input, fmt, mode, &mut bits),
            Problem::Sum { input, .. } => recursive_sum_value(input, fmt, mode, &mut bits),
        }
    }

    fn bound(&self, cfg: &ExperimentConfig, n: u64, mode: RoundingMode, cond: f64) -> Option<f64> {
        if !mode.is_stochastic() {
            return None;
        }
        // a degree-0 polynomial involves no rounding
        if n == 0 {
            return Some(0.0);
        }
        let params = BoundParams::new(n, cfg.format.precision(), mode.random_bits(), cfg.lambda).ok()?;
        match self {
            Problem::Horner { .. } => Some(cond * horner_bound(&params)),
            Problem::Sum { kind: ExperimentKind::Pairwise, .. } => Some(cond * pairwise_bound(&params)),
            Problem::Sum { .. } => None,
        }
    }
}

fn prepare(cfg: &ExperimentConfig, n: u64) -> Result<Prepared> {
    let mut bits = sampling_stream(cfg.seed, n);
    let fmt = &cfg.format;
    let (problem, reference, cond) = match cfg.kind {
        ExperimentKind::Horner => {
            let x = cfg.x.clone().ok_or_else(|| LabError::Config("horner needs x".into()))?;
            let poly = Polynomial::new(cfg.dist.sample_many(n as usize + 1, fmt, &mut bits)?, fmt)?;
            let reference = poly.evaluate_exact(&x);
            let cond = cond_poly(&poly, &x);
            (Problem::Horner { poly, x }, reference, cond)
        }
        kind => {
            let input = SummationInput::new(cfg.dist.sample_many(n as usize, fmt, &mut bits)?, fmt)?;
            let reference = input.exact_sum();
            let cond = cond_sum(&input);
            (Problem::Sum { kind, input }, reference, cond)
        }
    };
    Ok(Prepared {
        problem,
        reference,
        cond: cond?,
    })
}

fn reps_for(cfg: &ExperimentConfig, mode: RoundingMode) -> u32 {
    if mode.is_stochastic() {
        cfg.reps
    } else {
        1
    }
}

/// `(|sum(results) - k ref| / (k |ref|), mean |result - ref| / |ref|)` for `k` results.
fn relative_errors(results: &[SoftValue], reference: &SoftValue) -> (f64, f64) {
    let k = SoftValue::from_i64(results.len() as i64);
    let total = results.iter().fold(SoftValue::zero(), |acc, v| acc.exact_add(v));
    let scaled_ref = reference.exact_mul(&k);
    let of_avg = ratio_to_f64(&total.exact_sub(&scaled_ref).abs(), &scaled_ref.abs());
    let mean = results
        .iter()
        .map(|v| ratio_to_f64(&v.exact_sub(reference).abs(), &reference.abs()))
        .sum::<f64>()
        / results.len() as f64;
    (of_avg, mean)
}

/// Runs `cfg` on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.sizes.len() * cfg.modes.len());
    for &n in &cfg.sizes {
        let row = |mode: RoundingMode, reps: u32| ResultRow {
            kind: cfg.kind,
            format: cfg.format.to_string(),
            n,
            mode,
            seed: cfg.seed,
            reps,
            rel_err_of_avg: None,
            mean_rel_err: None,
            bound: None,
            cond: None,
            error: None,
        };
        let prepared = match prepare(cfg, n) {
            Ok(p) => p,
            Err(e @ (LabError::Core(_) | LabError::Config(_))) => {
                let msg = e.to_string();
                rows.extend(cfg.modes.iter().map(|&m| ResultRow {
                    error: Some(msg.clone()),
                    ..row(m, reps_for(cfg, m))
                }));
                continue;
            }
            Err(e) => return Err(e),
        };

        let jobs: Vec<(usize, u32)> = cfg
            .modes
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| (0..reps_for(cfg, m)).map(move |rep| (i, rep)))
            .collect();
        let outcomes: Vec<srcore::Result<SoftValue>> = jobs
            .par_iter()
            .map(|&(i, rep)| prepared.problem.evaluate(cfg, n, cfg.modes[i], rep))
            .collect();

        let mut outcomes = outcomes.into_iter();
        for &mode in &cfg.modes {
            let reps = reps_for(cfg, mode);
            let results: srcore::Result<Vec<SoftValue>> = outcomes.by_ref().take(reps as usize).collect();
            let mut r = ResultRow {
                cond: Some(prepared.cond),
                bound: prepared.problem.bound(cfg, n, mode, prepared.cond),
                ..row(mode, reps)
            };
            match results {
                Ok(results) => {
                    let (of_avg, mean) = relative_errors(&results, &prepared.reference);
                    r.rel_err_of_avg = Some(of_avg);
                    r.mean_rel_err = Some(mean);
                }
                Err(e) => {
                    r.error = Some(e.to_string());
                    r.bound = None;
                }
            }
            rows.push(r);
        }
    }
    Ok(rows)
}

pub fn run_horner_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if cfg.kind != ExperimentKind::Horner {
        return Err(LabError::Config(format!("expected a horner config, got {}", cfg.kind)));
    }
    run_experiment(cfg)
}

/// Pairwise or recursive summation.
pub fn run_pairwise_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if cfg.kind == ExperimentKind::Horner {
        return Err(LabError::Config("expected a summation config, got horner".into()));
    }
    run_experiment(cfg)
}

/// Runs `cfg` on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
