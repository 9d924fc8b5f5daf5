//! Reproducible experiment runner behind the `spreadlab` binary.
//!
//! A run fans replicates out over a worker pool. Replicate `i` draws only
//! from streams keyed by `(master_seed, i, role)` and results are collected
//! in replicate order, so output bytes do not depend on the thread count.

mod config;
mod output;
mod runners;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{
    DemographicsConfig, ExperimentConfig, ExperimentKind, ExperimentParams, OutputFormat, PRule,
    Sweep,
};
pub use output::{emit, write_csv, write_jsonl, ResultRow, ResultTable, Summary};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io(_) => 3,
        }
    }
}

/// Results for one population size.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    /// File stem, e.g. `broadcast` or `broadcast_n1000` in a sweep.
    pub stem: String,
    pub table: ResultTable,
    pub summary: Summary,
}

/// Runs every population size of `cfg` on a pool of `threads` workers
/// (0 picks the number of CPUs).
pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ExperimentOutput>, RunError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Config(format!("cannot start worker pool: {e}")))?;
    let sweep = cfg.sweep.is_some();
    pool.install(|| {
        cfg.sizes()
            .into_iter()
            .map(|n| {
                let demo = cfg.demographics_for(n);
                let (table, metrics) = runners::run_one(cfg, &demo);
                let name = cfg.experiment.name();
                let stem = if sweep { format!("{name}_n{n}") } else { name.to_string() };
                let summary = Summary {
                    experiment: name.to_string(),
                    n,
                    p: demo.p,
                    z0: demo.z0,
                    lambda: demo.lambda(),
                    replicates: cfg.replicates,
                    master_seed: cfg.master_seed,
                    metrics,
                };
                Ok(ExperimentOutput { stem, table, summary })
            })
            .collect()
    })
}

/// Runs `cfg` and writes every table and summary into `dir`.
pub fn run_and_emit(
    cfg: &ExperimentConfig,
    threads: usize,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>, RunError> {
    let outputs = run(cfg, threads)?;
    let mut paths = Vec::new();
    for out in &outputs {
        paths.extend(emit(&out.table, &out.summary, format, dir, &out.stem)?);
    }
    Ok(paths)
}
