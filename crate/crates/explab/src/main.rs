use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use srcore::{parse_value, FloatFormat, RoundingMode, SoftValue};
use srlab::config::default_modes;
use srlab::{
    parse_sizes, run_experiment, run_verification_suite_with, Distribution, ExperimentConfig, ExperimentKind,
    VerifyOptions,
};

#[derive(Parser)]
#[command(name = "srlab", version, about = "Stochastic-rounding error experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Horner evaluation of random polynomials
    Horner {
        /// Evaluation point; defaults to 0.9990234375 (binary16) or 0.98828125 (bfloat16)
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value = "uniform01")]
        coef_dist: Distribution,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pairwise summation of random values
    Pairwise {
        #[arg(long, default_value = "uniform-0-1e5")]
        value_dist: Distribution,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Left-to-right summation of random values
    Recursive {
        #[arg(long, default_value = "uniform-0-1e5")]
        value_dist: Distribution,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the statistical verification battery
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// JSON report path; stdout if omitted
        #[arg(long)]
        report: Option<PathBuf>,
        /// Reduced trial counts
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// binary16, bfloat16, p=<int> or p=<int>,<emin>,<emax>
    #[arg(long)]
    format: Option<FloatFormat>,
    /// Comma-separated list, or lo..hi[:points] for a geometric grid
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated: rn, rz, sr:exact, sr:<r>
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<RoundingMode>>,
    /// Repetitions of each stochastic mode
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Failure probability for the bound column
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    /// CSV path; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl CommonArgs {
    fn apply(self, cfg: &mut ExperimentConfig) -> anyhow::Result<Option<usize>> {
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(s) = self.sizes {
            cfg.sizes = parse_sizes(&s)?;
        }
        cfg.modes = self.modes.unwrap_or_else(|| default_modes(cfg.kind));
        if let Some(r) = self.reps {
            cfg.reps = r;
        }
        cfg.lambda = self.lambda;
        cfg.out_path = self.out;
        Ok(self.threads)
    }
}

fn default_x(fmt: &FloatFormat) -> anyhow::Result<SoftValue> {
    let text = match fmt.precision() {
        11 => "0.9990234375",
        8 => "0.98828125",
        p => bail!("no default x for precision {p}; pass --x"),
    };
    Ok(parse_value(text, fmt)?)
}

fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T>
where
    T: Send,
{
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
            Ok(pool.install(f))
        }
    }
}

fn output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn experiment(cfg: ExperimentConfig, threads: Option<usize>) -> anyhow::Result<ExitCode> {
    cfg.validate()?;
    let rows = with_threads(threads, || run_experiment(&cfg))??;
    for r in rows.iter().filter(|r| r.is_flagged()) {
        eprintln!("warning: n={} {}: {}", r.n, r.mode, r.error.as_deref().unwrap_or(""));
    }
    let mut out = output(cfg.out_path.as_ref())?;
    srlab::csv::write_rows(&rows, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn summation(kind: ExperimentKind, dist: Distribution, common: CommonArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = ExperimentConfig::summation_default(kind, common.seed);
    cfg.dist = dist;
    let threads = common.apply(&mut cfg)?;
    experiment(cfg, threads)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Horner { x, coef_dist, common } => {
            let mut cfg = ExperimentConfig::horner_default(common.seed);
            cfg.dist = coef_dist;
            let threads = common.apply(&mut cfg)?;
            cfg.x = Some(match x {
                Some(text) => parse_value(&text, &cfg.format)?,
                None => default_x(&cfg.format)?,
            });
            experiment(cfg, threads)
        }
        Command::Pairwise { value_dist, common } => summation(ExperimentKind::Pairwise, value_dist, common),
        Command::Recursive { value_dist, common } => summation(ExperimentKind::Recursive, value_dist, common),
        Command::Verify {
            seed,
            report,
            quick,
            threads,
        } => {
            let opts = if quick { VerifyOptions::quick() } else { VerifyOptions::default() };
            let report_data = with_threads(threads, || run_verification_suite_with(seed, &opts))??;
            for c in &report_data.checks {
                eprintln!(
                    "{} {}: observed {:.4e}, tolerance {:.4e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.observed,
                    c.tolerance
                );
            }
            let mut out = output(report.as_ref())?;
            serde_json::to_writer_pretty(&mut out, &report_data)?;
            writeln!(out)?;
            Ok(if report_data.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
