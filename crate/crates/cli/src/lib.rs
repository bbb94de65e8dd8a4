//! Config-driven experiments for the `linresp` library.
//!
//! [`run`] loads a TOML config, executes one experiment, writes its tables
//! as CSV (and SVG charts on request) plus a JSON report, and returns the
//! [`RunReport`]. [`exit_code`] maps failures onto the process status.

pub mod config;
pub mod emit;
pub mod experiments;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use config::{ConfigError, ExperimentConfig};
use emit::{emit_csv, emit_svg};

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub name: String,
    pub kind: String,
    pub resolution: usize,
    pub seed: u64,
    pub scalars: Vec<(String, f64)>,
    pub csv_files: Vec<PathBuf>,
    pub svg_files: Vec<PathBuf>,
    pub assertions: Vec<AssertionOutcome>,
    pub passed: bool,
    pub duration_seconds: f64,
}

impl RunReport {
    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn assertion(&self, name: &str) -> Option<&AssertionOutcome> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

pub fn run(config_path: &Path, overrides: &Overrides) -> Result<RunReport> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(n) = overrides.resolution {
        cfg.resolution = n;
        cfg.validate()
            .map_err(|m| ConfigError::new(config_path, m))?;
    }
    let out_dir = overrides
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let name = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| cfg.kind.name().to_string());
    run_config(&cfg, &name, &out_dir, overrides.plot)
}

/// Execute a parsed config, writing `<name>.<table>.csv` and
/// `<name>.report.json` into `out_dir`.
pub fn run_config(
    cfg: &ExperimentConfig,
    name: &str,
    out_dir: &Path,
    plot: bool,
) -> Result<RunReport> {
    let start = Instant::now();
    let outcome = experiments::execute(cfg).with_context(|| {
        format!(
            "experiment {} (N = {}, u0 = {:?}, seed = {:#x})",
            cfg.kind, cfg.resolution, cfg.params.u0, cfg.seed
        )
    })?;

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut csv_files = Vec::new();
    let mut svg_files = Vec::new();
    for t in &outcome.tables {
        let path = out_dir.join(format!("{name}.{}.csv", t.name));
        emit_csv(&t.header, &t.rows, &path)?;
        csv_files.push(path);
        if plot {
            if let Some(spec) = &t.plot {
                let path = out_dir.join(format!("{name}.{}.svg", t.name));
                let ylabel = if spec.ys.len() == 1 {
                    t.header[spec.ys[0]].as_str()
                } else {
                    "value"
                };
                emit_svg(&t.series(), &t.header[spec.x], ylabel, spec.log_log, &path)?;
                svg_files.push(path);
            }
        }
    }

    let assertions: Vec<AssertionOutcome> = cfg
        .requested_assertions()
        .into_iter()
        .map(|a| {
            let c = outcome
                .checks
                .iter()
                .find(|c| c.name == a)
                .with_context(|| format!("internal: no outcome for assertion {a}"))?;
            Ok(AssertionOutcome {
                name: a,
                passed: c.passed,
                detail: c.detail.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let passed = assertions.iter().all(|a| a.passed);
    let report = RunReport {
        name: name.to_string(),
        kind: cfg.kind.name().to_string(),
        resolution: cfg.resolution,
        seed: cfg.seed,
        scalars: outcome.scalars,
        csv_files,
        svg_files,
        assertions,
        passed,
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out_dir.join(format!("{name}.report.json"));
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(report)
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Process status for a failed run: 2 config errors (including rejected
/// parameter values), 3 numerical failures, 4 IO. Failed assertions are
/// reported through [`RunReport::passed`] and map to [`EXIT_ASSERTION`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return EXIT_CONFIG;
        }
        if let Some(e) = cause.downcast_ref::<linresp::Error>() {
            return if e.is_numerical_failure() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_IO
}
