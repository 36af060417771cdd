use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use coherence_mc::experiments::{
    estimate_convertibility, occupation_time_experiment, persistence_irw,
    pi_distribution_experiment, pi_limit_experiment, MonteCarlo, PiLimitOptions,
};
use coherence_mc::stats::{
    arcsine_cdf, fit_power_law, ks_distance, ks_two_sample, sup_distance_at,
};
use coherence_mc::{RngStream, SimplexSampler};

use crate::config::{Experiment, RunConfig};

/// Every grid point (and the limit chain in `fig4`) gets its own block of
/// this many stream indices, so estimates at different `n` are independent.
pub const GRID_STREAM_STRIDE: u64 = 1 << 32;

/// Resolution of the `p` axis in `fig4.csv`.
pub const FIG4_GRID: usize = 200;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Invalid(#[from] coherence_mc::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("could not build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

/// A table destined for `<name>.csv`.
struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Doubles are written with 17 significant digits so they round-trip.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'static str,
    master_seed: u64,
    config: &'a RunConfig,
    wall_time_seconds: f64,
    files: Vec<String>,
    outputs: Value,
}

/// Runs the configured experiment and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Like [`run`] but returns the error instead of printing it.
pub fn execute(config: &RunConfig) -> Result<(), RunError> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()?;
    let (tables, outputs) = pool.install(|| compute(config))?;

    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut files = vec![];
    for t in &tables {
        let file = format!("{}.csv", t.name);
        write_csv(&dir.join(&file), t)?;
        files.push(file);
    }
    let manifest = Manifest {
        experiment: config.experiment.name(),
        master_seed: config.master_seed,
        config,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        files,
        outputs,
    };
    let path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, body + "\n").map_err(|source| RunError::Io { path, source })
}

fn write_csv(path: &Path, t: &Table) -> Result<(), RunError> {
    let err = |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(err)?;
    w.write_record(&t.header).map_err(err)?;
    for row in &t.rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn block(config: &RunConfig, j: usize) -> MonteCarlo {
    let mut mc =
        MonteCarlo::new(config.master_seed, config.samples).with_chunk_size(config.chunk_size);
    mc.seed = RngStream::new(config.master_seed, j as u64 * GRID_STREAM_STRIDE);
    mc
}

fn compute(config: &RunConfig) -> Result<(Vec<Table>, Value), RunError> {
    let sampler = SimplexSampler::from_alpha(config.alpha)?;
    match config.experiment {
        Experiment::Fig2 => fig2(config, &sampler),
        Experiment::Fig3 => fig3(config, &sampler),
        Experiment::Fig4 => fig4(config, &sampler),
        Experiment::Persistence => persistence(config),
        Experiment::Sample => sample(config, &sampler),
    }
}

fn fig2(config: &RunConfig, sampler: &SimplexSampler) -> Result<(Vec<Table>, Value), RunError> {
    let mut points = vec![];
    let mut rows = vec![];
    for (j, &n) in config.n_list.iter().enumerate() {
        let est = estimate_convertibility(n, sampler, &block(config, j))?;
        points.push((n as f64, est.value, est.std_error));
        rows.push(vec![
            n.to_string(),
            format_real(est.value),
            format_real(est.std_error),
        ]);
    }
    let mut tables = vec![Table {
        name: "fig2".into(),
        header: vec!["n".into(), "p_hat".into(), "std_err".into()],
        rows,
    }];
    // A grid too small or with a zero estimate has no fit; the table stands alone.
    let fit = fit_power_law(&points).ok();
    if let Some(f) = &fit {
        tables.push(Table {
            name: "fig2_fit".into(),
            header: vec!["amplitude_b".into(), "theta".into(), "sigma_theta".into()],
            rows: vec![vec![
                format_real(f.amplitude_b),
                format_real(f.exponent_theta),
                format_real(f.sigma_theta),
            ]],
        });
    }
    Ok((tables, json!({ "fit": fit })))
}

fn fig3(config: &RunConfig, sampler: &SimplexSampler) -> Result<(Vec<Table>, Value), RunError> {
    let n = config.n_list[0];
    let cdf = occupation_time_experiment(n, sampler, &block(config, 0))?;
    let lattice: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let arcsine = |t: f64| arcsine_cdf(t.clamp(0.0, 1.0)).expect("clamped");
    let rows = lattice
        .iter()
        .map(|&t| {
            vec![
                format_real(t),
                format_real(cdf.eval(t)),
                format_real(arcsine(t)),
            ]
        })
        .collect();
    let outputs = json!({
        "n": n,
        "sup_distance_on_lattice": sup_distance_at(&cdf, lattice.iter().copied(), arcsine),
        "ks_distance_two_sided": ks_distance(&cdf, arcsine),
    });
    let table = Table {
        name: "fig3".into(),
        header: vec!["t".into(), "empirical_cdf".into(), "arcsine_cdf".into()],
        rows,
    };
    Ok((vec![table], outputs))
}

fn fig4(config: &RunConfig, sampler: &SimplexSampler) -> Result<(Vec<Table>, Value), RunError> {
    let mut finite = vec![];
    for (j, &n) in config.n_list.iter().enumerate() {
        finite.push(pi_distribution_experiment(n, sampler, &block(config, j))?);
    }
    let limit_mc = block(config, config.n_list.len());
    let limit = pi_limit_experiment(&PiLimitOptions::new(config.k_max), &limit_mc)?;
    let f_inf = limit.clamped_cdf();

    let mut header = vec!["p".to_string()];
    header.extend(config.n_list.iter().map(|n| format!("F_{n}")));
    header.push("F_inf".into());
    let rows = (0..=FIG4_GRID)
        .map(|i| {
            let p = i as f64 / FIG4_GRID as f64;
            let mut row = vec![format_real(p)];
            row.extend(finite.iter().map(|f| format_real(f.eval(p))));
            row.push(format_real(f_inf.eval(p)));
            row
        })
        .collect();

    let per_n: Vec<Value> = config
        .n_list
        .iter()
        .zip(&finite)
        .map(|(&n, f)| {
            json!({
                "n": n,
                "sup_distance_to_limit": ks_two_sample(f, &f_inf),
                "mass_at_one": f.mass_at(1.0),
            })
        })
        .collect();
    let outputs = json!({
        "finite_n": per_n,
        "limit": {
            "k_max": config.k_max,
            "raw_at_least_one": limit.mass_at_one(),
            "raw_max": limit.raw.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "early_stopped": limit.early_stopped,
        },
    });
    let table = Table {
        name: "fig4".into(),
        header,
        rows,
    };
    Ok((vec![table], outputs))
}

fn persistence(config: &RunConfig) -> Result<(Vec<Table>, Value), RunError> {
    let p = persistence_irw(config.k_max, &block(config, 0))?;
    let rows = p
        .iter()
        .enumerate()
        .map(|(i, e)| {
            vec![
                (i + 1).to_string(),
                format_real(e.value),
                format_real(e.std_error),
            ]
        })
        .collect();
    let outputs = json!({
        "p_1": p[0],
        "p_k_max": p[p.len() - 1],
    });
    let table = Table {
        name: "persistence".into(),
        header: vec!["k".into(), "p_k".into(), "std_err".into()],
        rows,
    };
    Ok((vec![table], outputs))
}

fn sample(config: &RunConfig, sampler: &SimplexSampler) -> Result<(Vec<Table>, Value), RunError> {
    let n = config.n_list[0];
    let mut rng = RngStream::new(config.master_seed, 0).generator();
    let mut rows = vec![];
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for _ in 0..config.samples {
        let point = sampler.sample(n, &mut rng);
        let row: Vec<String> = point.values().iter().map(|&v| format_real(v)).collect();
        writeln!(out, "{}", row.join(",")).map_err(|source| RunError::Io {
            path: "<stdout>".into(),
            source,
        })?;
        rows.push(row);
    }
    let table = Table {
        name: "sample".into(),
        header: (1..=n).map(|i| format!("x_{i}")).collect(),
        rows,
    };
    Ok((vec![table], json!({ "n": n })))
}
