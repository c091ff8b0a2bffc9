//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use srcore::bounds::{horner_bound, pairwise_bound_for_depth, BoundParams};
use srcore::{
    round_rn, round_sr_limited, round_value, BitSource, FixedBits, FloatFormat, RngStream, RoundingMode, SoftValue,
};
use srlab::csv::to_csv_string;
use srlab::verify::{horner_coverage, pairwise_coverage, random_inexact_result};
use srlab::{run_experiment_with_threads, Distribution, ExperimentConfig, ExperimentKind, ResultRow};

type Verdict = (bool, String);

/// A random format value built from integer parts, with its oracle image.
fn random_operand(rng: &mut RngStream, fmt: &FloatFormat) -> (SoftValue, BigRational) {
    let p = fmt.precision();
    let (lo, hi) = fmt.exponent_range().unwrap();
    let negative = rng.next_bit();
    let e = lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64;
    let sig = BigUint::from(1u64 << (p - 1) | rng.next_bits(p - 1));
    let lsb = e - (p as i64 - 1);
    (
        SoftValue::from_parts(negative, sig.clone(), lsb),
        sroracle::dyadic(negative, &sig, lsb),
    )
}

fn operand_pairs(seed: u64, fmt: &FloatFormat, count: usize) -> Vec<[(SoftValue, BigRational); 2]> {
    let mut rng = RngStream::new(seed, 0);
    (0..count)
        .map(|_| [random_operand(&mut rng, fmt), random_operand(&mut rng, fmt)])
        .collect()
}

fn formats() -> [FloatFormat; 2] {
    [FloatFormat::binary16(), FloatFormat::bfloat16()]
}

fn exact_ops() -> Verdict {
    let mut checked = 0;
    let mut bad = 0;
    for (i, fmt) in formats().iter().enumerate() {
        for [(a, ra), (b, rb)] in operand_pairs(100 + i as u64, fmt, 10_000) {
            checked += 2;
            bad += (a.exact_add(&b).to_rational() != &ra + &rb) as usize;
            bad += (a.exact_mul(&b).to_rational() != &ra * &rb) as usize;
        }
    }
    (bad == 0, format!("{bad} mismatches in {checked} operations"))
}

fn rn_agrees(x: &SoftValue, rx: &BigRational, fmt: &FloatFormat) -> bool {
    let p = fmt.precision();
    let (lo, hi) = fmt.exponent_range().unwrap();
    match round_rn(x, fmt) {
        Ok(y) => sroracle::rounding_in_range(rx, p, lo, hi) && y.to_rational() == sroracle::round_nearest_even(rx, p),
        Err(_) => !sroracle::rounding_in_range(rx, p, lo, hi),
    }
}

fn rn_correctness() -> Verdict {
    let mut checked = 0;
    let mut bad = 0;
    for (i, fmt) in formats().iter().enumerate() {
        for [(a, ra), (b, rb)] in operand_pairs(100 + i as u64, fmt, 10_000) {
            checked += 2;
            bad += !rn_agrees(&a.exact_add(&b), &(&ra + &rb), fmt) as usize;
            bad += !rn_agrees(&a.exact_mul(&b), &(&ra * &rb), fmt) as usize;
        }
    }
    // every p = 3 value with binade in [-3, 3], both signs
    let small = FloatFormat::new(3, Some((-3, 3))).unwrap();
    let mut grid = vec![(SoftValue::zero(), BigRational::zero())];
    for e in -3..=3i64 {
        for m in 4u32..8 {
            for neg in [false, true] {
                let sig = BigUint::from(m);
                grid.push((SoftValue::from_parts(neg, sig.clone(), e - 2), sroracle::dyadic(neg, &sig, e - 2)));
            }
        }
    }
    for (a, ra) in &grid {
        for (b, rb) in &grid {
            checked += 2;
            bad += !rn_agrees(&a.exact_add(b), &(ra + rb), &small) as usize;
            bad += !rn_agrees(&a.exact_mul(b), &(ra * rb), &small) as usize;
        }
    }
    (bad == 0, format!("{bad} mismatches in {checked} roundings ({} p=3 grid values)", grid.len()))
}

fn ratio(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn sr_unbiasedness() -> Verdict {
    let fmt = FloatFormat::binary16();
    let p = fmt.precision();
    let draws = 100_000u64;
    let mut rng = RngStream::new(300, 0);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for case in 0..100 {
        let x = random_inexact_result(&mut rng, &fmt);
        let rx = x.to_rational();
        let gap = sroracle::ceil_p(&rx, p) - sroracle::floor_p(&rx, p);
        let mut bits = RngStream::new(301, case);
        let mut total = SoftValue::zero();
        for _ in 0..draws {
            total = total.exact_add(&round_value(&x, RoundingMode::SrExact, &fmt, &mut bits).unwrap());
        }
        let mean = total.to_rational() / BigRational::from_integer(draws.into());
        let tolerance = 5.0 * ratio(&gap) / 2.0 / (draws as f64).sqrt();
        let dev = ratio(&(mean - &rx).abs());
        worst = worst.max(dev / tolerance);
        failures += (dev > tolerance) as usize;
    }
    (
        failures == 0,
        format!("100 cases x 10^5 draws; {failures} outside tolerance, worst at {worst:.3} of it"),
    )
}

fn bias_identity() -> Verdict {
    let fmt = FloatFormat::binary16();
    let p = fmt.precision();
    let mut rng = RngStream::new(400, 0);
    let operands: Vec<SoftValue> = (0..100).map(|_| random_inexact_result(&mut rng, &fmt)).collect();
    let mut exact = 0;
    for r in 1..=8u32 {
        for x in &operands {
            let mut total = SoftValue::zero();
            for z in 0..1u64 << r {
                let (y, _) = round_sr_limited(x, &fmt, r, &mut FixedBits::from_value(z, r)).unwrap();
                total = total.exact_add(&y);
            }
            let mean = total.to_rational() / sroracle::pow2(r as i64);
            exact += (mean == sroracle::truncate(&x.to_rational(), p + r)) as usize;
        }
    }
    (exact == 800, format!("{exact}/800 exact means over r = 1..8"))
}

fn coverage(check: srlab::verify::CheckResult) -> Verdict {
    (
        check.passed,
        format!("violation rate {} over {} trials (limit {}); {}", check.observed, check.trials, check.tolerance, check.detail),
    )
}

fn rows_for(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let rows = run_experiment_with_threads(cfg, 1).unwrap();
    assert!(rows.iter().all(|r| !r.is_flagged()), "flagged rows");
    rows
}

fn err(rows: &[ResultRow], mode: &str) -> f64 {
    let mode: RoundingMode = mode.parse().unwrap();
    rows.iter().find(|r| r.mode == mode).unwrap().rel_err_of_avg.unwrap()
}

fn majority(votes: &[bool]) -> bool {
    2 * votes.iter().filter(|&&v| v).count() > votes.len()
}

fn votes_line(votes: &[bool]) -> String {
    format!("{}/{} seeds", votes.iter().filter(|&&v| v).count(), votes.len())
}

fn horner_fig_runs() -> Vec<Vec<ResultRow>> {
    (1..=5)
        .map(|seed| {
            let mut cfg = ExperimentConfig::horner_default(seed);
            cfg.sizes = vec![4000];
            cfg.modes = ["rn", "sr:3", "sr:6", "sr:12"].iter().map(|m| m.parse().unwrap()).collect();
            rows_for(&cfg)
        })
        .collect()
}

fn stagnation(runs: &[Vec<ResultRow>]) -> Verdict {
    let rn: Vec<bool> = runs.iter().map(|r| err(r, "rn") > err(r, "sr:6")).collect();
    let sr3: Vec<bool> = runs.iter().map(|r| err(r, "sr:3") > err(r, "sr:6")).collect();
    let detail = runs
        .iter()
        .map(|r| format!("{:.2e}/{:.2e}/{:.2e}", err(r, "rn"), err(r, "sr:3"), err(r, "sr:6")))
        .collect::<Vec<_>>()
        .join(" ");
    (
        majority(&rn) && majority(&sr3),
        format!("RN > SR6 {}, SR3 > SR6 {}; rn/sr3/sr6: {detail}", votes_line(&rn), votes_line(&sr3)),
    )
}

fn saturation(runs: &[Vec<ResultRow>]) -> Verdict {
    let votes: Vec<bool> = runs.iter().map(|r| err(r, "sr:6") <= 4.0 * err(r, "sr:12")).collect();
    let ratios = runs
        .iter()
        .map(|r| format!("{:.1}", err(r, "sr:6") / err(r, "sr:12")))
        .collect::<Vec<_>>()
        .join(" ");
    (majority(&votes), format!("SR6 <= 4 SR12 {}; SR6/SR12 ratios {ratios}", votes_line(&votes)))
}

fn pairwise_parity() -> Verdict {
    let runs: Vec<Vec<ResultRow>> = (1..=7)
        .map(|seed| {
            let mut cfg = ExperimentConfig::summation_default(ExperimentKind::Pairwise, seed);
            cfg.sizes = vec![1_000_000];
            cfg.modes = ["rn", "sr:3", "sr:12"].iter().map(|m| m.parse().unwrap()).collect();
            rows_for(&cfg)
        })
        .collect();
    let both: Vec<bool> = runs
        .iter()
        .map(|r| err(r, "sr:3") <= 10.0 * err(r, "rn") && err(r, "rn") <= 10.0 * err(r, "sr:3"))
        .collect();
    let sat: Vec<bool> = runs.iter().map(|r| err(r, "sr:3") <= 2.0 * err(r, "sr:12")).collect();
    (
        majority(&both) && majority(&sat),
        format!("SR3 within 10x of RN {}, SR3 <= 2 SR12 {}", votes_line(&both), votes_line(&sat)),
    )
}

fn bound_asymptotics() -> Verdict {
    let horner = |n: u64, r: Option<u32>| horner_bound(&BoundParams::new(n, 30, r, 0.1).unwrap());
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let mut check = |label: &str, got: f64, want: f64| {
        let rel = (got / want - 1.0).abs();
        worst = worst.max(rel);
        lines.push(format!("{label} {got:.4}"));
    };
    for n in [10_000u64, 100_000, 1_000_000] {
        check(&format!("horner r=inf n={n}"), horner(2 * n, None) / horner(n, None), 2f64.sqrt());
        check(&format!("horner r=1 n={n}"), horner(2 * n, Some(1)) / horner(n, Some(1)), 2.0);
    }
    // doubling log2(n) doubles the tree depth
    for h in [16u64, 32] {
        let b = |h| pairwise_bound_for_depth(h, 30, None, 0.1);
        check(&format!("pairwise r=inf h={h}"), b(2 * h) / b(h), 2f64.sqrt());
    }
    for h in [10_000u64, 100_000] {
        let b = |h| pairwise_bound_for_depth(h, 30, Some(1), 0.1);
        check(&format!("pairwise r=1 h={h}"), b(2 * h) / b(h), 2.0);
    }
    (worst <= 0.05, format!("worst relative deviation {worst:.4}; {}", lines.join(", ")))
}

fn determinism() -> Verdict {
    let mut horner = ExperimentConfig::horner_default(11);
    horner.sizes = vec![0, 10, 300];
    horner.modes = ["rn", "rz", "sr:exact", "sr:6"].iter().map(|m| m.parse().unwrap()).collect();
    let mut pairwise = ExperimentConfig::summation_default(ExperimentKind::Pairwise, 12);
    pairwise.sizes = vec![1, 1000, 20_000];
    pairwise.dist = Distribution::UniformSym1e5;
    pairwise.reps = 8;
    let mut recursive = ExperimentConfig::summation_default(ExperimentKind::Recursive, 13);
    recursive.sizes = vec![5000];
    recursive.reps = 4;
    let mut same = true;
    for cfg in [&horner, &pairwise, &recursive] {
        let outputs: Vec<String> = [1, 4, 1, 3]
            .iter()
            .map(|&t| to_csv_string(&run_experiment_with_threads(cfg, t).unwrap()).unwrap())
            .collect();
        same &= outputs.windows(2).all(|w| w[0] == w[1]);
    }
    (same, "horner, pairwise and recursive CSV identical across runs with 1, 4, 1, 3 threads".into())
}

fn main() -> ExitCode {
    let mut fig_runs = None;
    let mut fig = |f: fn(&[Vec<ResultRow>]) -> Verdict| {
        let runs = fig_runs.get_or_insert_with(horner_fig_runs);
        f(runs)
    };
    let mut results = Vec::new();
    let mut run = |name: &str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        let (passed, detail) = outcome;
        println!(
            "{} {name} [{:.1}s] {detail}",
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        results.push(passed);
    };

    run("exact_op_oracle_equivalence", &mut exact_ops);
    run("rn_correctness", &mut rn_correctness);
    run("sr_exact_unbiasedness", &mut sr_unbiasedness);
    run("sr_limited_bias_identity", &mut bias_identity);
    run("horner_bound_coverage", &mut || coverage(horner_coverage(500, 1000).unwrap()));
    run("pairwise_bound_coverage", &mut || coverage(pairwise_coverage(600, 1000).unwrap()));
    run("horner_stagnation_ordering", &mut || fig(stagnation));
    run("horner_random_bits_saturation", &mut || fig(saturation));
    run("pairwise_parity_with_rn", &mut pairwise_parity);
    run("bound_asymptotics", &mut bound_asymptotics);
    run("determinism", &mut determinism);

    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
