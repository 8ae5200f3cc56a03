//! Config-driven batch runner.
//!
//! Each run writes one directory holding `report.json`,
//! `config.resolved.json`, `statistics.csv`, one CSV per table or profile,
//! and a `MANIFEST` with the config hash, seed, versions and file digests.

pub mod config;
pub mod plotdata;
pub mod run;

use std::path::{Path, PathBuf};

pub use config::{load_config, parse_config, Experiment, ExperimentConfig, SCHEMA_VERSION};
pub use plotdata::emit_plotdata;
pub use run::{check_golden, execute, run, RunReport};

use crate::error::Result;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub check: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub out: PathBuf,
    pub report: RunReport,
    /// First golden mismatch, when `--check` was requested.
    pub golden_mismatch: Option<String>,
}

/// Loads, runs and (optionally) golden-checks a config file.
pub fn run_file(path: &Path, ov: &Overrides) -> Result<Outcome> {
    let mut cfg = load_config(path)?;
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(w) = ov.workers {
        cfg.workers = w.max(1);
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let out = match (&ov.out, &cfg.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => base.join(o),
        (None, None) => PathBuf::from("runs").join(cfg.experiment.kind()),
    };
    let report = run(&cfg, &out)?;
    let mut golden_mismatch = None;
    if ov.check {
        let Some(g) = &cfg.golden else {
            return Err(crate::Error::Config { path: "golden".into(), message: "--check needs a golden report".into() });
        };
        golden_mismatch = check_golden(&report, &base.join(g))?;
    }
    let exit_code = if report.passed && golden_mismatch.is_none() { EXIT_PASS } else { EXIT_FAIL };
    Ok(Outcome { exit_code, out, report, golden_mismatch })
}
