//! Library surface of the `levyratio` CLI: config parsing, runners and
//! artifact writers, exposed so integration tests can drive the pipelines
//! in-process.

pub mod config;
pub mod output;
pub mod runner;

use std::path::PathBuf;

use levyratio::Error;

pub use config::{ExperimentConfig, OutputFormat};

/// Exit codes of the binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Limit,
    Diagnose,
    Verify,
    ErRt,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config_path: PathBuf,
    pub seed_override: Option<u64>,
    pub jobs: Option<usize>,
    pub out_override: Option<PathBuf>,
    pub format_override: Option<OutputFormat>,
}

/// Run one invocation; returns the process exit code.
pub fn run(inv: &Invocation) -> i32 {
    if let Some(jobs) = inv.jobs {
        // ignore failure: the global pool may already be initialized
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let mut cfg = match ExperimentConfig::from_file(&inv.config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(seed) = inv.seed_override {
        cfg.run.seed = seed;
    }
    if let Some(dir) = &inv.out_override {
        cfg.out_dir = dir.clone();
    }
    if let Some(fmt) = inv.format_override {
        cfg.format = fmt;
    }

    let result = match inv.command {
        Command::Simulate => runner::run_simulate(&cfg),
        Command::Limit => runner::run_limit(&cfg),
        Command::Diagnose => runner::run_diagnose(&cfg),
        Command::Verify => runner::run_verify(&cfg),
        Command::ErRt => runner::run_er_rt(&cfg),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::InvalidMeasure(_) | Error::InvalidWeights(_)
                | Error::Io(_) => EXIT_CONFIG,
                _ => EXIT_NUMERIC,
            }
        }
    }
}
