//! Config-driven experiments: each run writes CSV outputs, a copy of its
//! configuration and a `manifest.json` with pass/fail checks.

pub mod config;
mod experiments;
pub mod manifest;
pub mod plot;

use std::path::{Path, PathBuf};

pub use config::{
    BoundCheck, BoundsParams, CounterexampleParams, Experiment, ExperimentConfig, GeometricGapParams,
    LazyVarianceParams, OptimalScanParams, SequenceConfig, TruncatedLadderParams, VariantConfig,
};
pub use manifest::{CheckResult, RunManifest};
pub use plot::emit_plot_data;

use crate::error::Result;

/// What an experiment produced: files relative to the output directory and
/// its checks.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub checks: Vec<CheckResult>,
}

impl Outcome {
    fn file(&mut self, name: impl Into<PathBuf>) {
        self.outputs.push(name.into());
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail,
        });
    }
}

/// Runs `config` into `out_dir` (created if missing) and writes the manifest.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let started_at = manifest::now();
    let seed = config.seed;
    let mut out = match &config.experiment {
        Experiment::Counterexample(p) => experiments::counterexample(p, seed, out_dir)?,
        Experiment::TruncatedLadder(p) => experiments::truncated_ladder(p, out_dir)?,
        Experiment::Bounds(p) => experiments::bounds(p, seed, out_dir)?,
        Experiment::LazyVariance(p) => experiments::lazy_variance(p, seed, out_dir)?,
        Experiment::OptimalScan(p) => experiments::optimal_scan(p, seed, out_dir)?,
        Experiment::GeometricGap(p) => experiments::geometric_gap(p, out_dir)?,
    };
    std::fs::write(out_dir.join("config.toml"), config.to_toml_string()?)?;
    out.file("config.toml");
    let manifest = RunManifest {
        kind: config.experiment.kind().into(),
        config_digest: config.digest()?,
        seed,
        version: env!("CARGO_PKG_VERSION").into(),
        started_at,
        finished_at: manifest::now(),
        outputs: out.outputs,
        checks: out.checks,
        config: config.clone(),
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}
