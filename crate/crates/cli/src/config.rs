use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use coherence_mc::experiments::DEFAULT_CHUNK_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Persistence,
    Sample,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Persistence => "persistence",
            Experiment::Sample => "sample",
        }
    }
}

/// Fully resolved run configuration; echoed verbatim into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub n_list: Vec<usize>,
    pub samples: u64,
    pub k_max: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub chunk_size: u64,
    /// Worker threads; `None` lets rayon decide. Never affects output.
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
}

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "coherence-mc",
    version,
    about = "Monte Carlo experiments on majorization between random pure states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convertibility probability against n, with a power-law fit.
    Fig2(Flags),
    /// Occupation fraction of the bridge walk against the arcsine law.
    Fig3(Flags),
    /// CDFs of the conversion probability for several n and of its limit.
    Fig4(Flags),
    /// Persistence probabilities of the integrated random walk.
    Persistence(Flags),
    /// Print random points of the simplex.
    Sample(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Master seed.
    #[arg(long, default_value_t = DEFAULT_SEED, allow_hyphen_values = true)]
    seed: u64,
    /// Samples per grid point (points to print for `sample`).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    /// Dimension; repeat or comma-separate for a grid.
    #[arg(
        long = "n",
        value_delimiter = ',',
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    n: Vec<u64>,
    /// Truncation horizon for `fig4` (limit chain) and `persistence`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    kmax: Option<u64>,
    /// Dirichlet concentration of the simplex sampler; 1 is the flat measure.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, value_parser = positive_real)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE, value_parser = clap::value_parser!(u64).range(1..))]
    chunk_size: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be a finite positive number".into())
    }
}

/// Parses arguments (without the program name) into a [`RunConfig`].
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args =
        std::iter::once(OsString::from("coherence-mc")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args)?;
    let (experiment, flags) = match cli.command {
        Command::Fig2(f) => (Experiment::Fig2, f),
        Command::Fig3(f) => (Experiment::Fig3, f),
        Command::Fig4(f) => (Experiment::Fig4, f),
        Command::Persistence(f) => (Experiment::Persistence, f),
        Command::Sample(f) => (Experiment::Sample, f),
    };

    let (n_default, samples_default, k_default): (Vec<usize>, u64, usize) = match experiment {
        Experiment::Fig2 => ((1..=10).map(|e| 1 << e).collect(), 1_000_000, 10_000),
        Experiment::Fig3 => (vec![32], 100_000, 10_000),
        Experiment::Fig4 => (vec![8, 64, 1024], 500_000, 10_000),
        Experiment::Persistence => (vec![], 100_000, 1_000),
        Experiment::Sample => (vec![3], 1, 10_000),
    };
    let n_list = if flags.n.is_empty() {
        n_default
    } else {
        flags.n.iter().map(|&n| n as usize).collect()
    };
    let config = RunConfig {
        experiment,
        n_list,
        samples: flags.samples.unwrap_or(samples_default),
        k_max: flags.kmax.map_or(k_default, |k| k as usize),
        alpha: flags.alpha,
        master_seed: flags.seed,
        chunk_size: flags.chunk_size,
        threads: flags.threads.map(|t| t as usize),
        output_dir: flags.out,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &RunConfig) -> Result<(), clap::Error> {
    let fail = |msg: &str| Err(Cli::command().error(ErrorKind::ValueValidation, msg));
    match c.experiment {
        Experiment::Fig3 | Experiment::Sample if c.n_list.len() != 1 => fail(&format!(
            "--n: {} takes a single dimension",
            c.experiment.name()
        )),
        Experiment::Fig4 if c.n_list.iter().any(|&n| n < 2) => {
            fail("--n: fig4 needs every dimension to be at least 2")
        }
        _ => Ok(()),
    }
}
