use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One experiment: a `kind` tag, its parameters, a base seed and an optional
/// output directory. Parameters missing from the file take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Counterexample(CounterexampleParams),
    TruncatedLadder(TruncatedLadderParams),
    Bounds(BoundsParams),
    LazyVariance(LazyVarianceParams),
    OptimalScan(OptimalScanParams),
    GeometricGap(GeometricGapParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Counterexample(_) => "counterexample",
            Experiment::TruncatedLadder(_) => "truncated-ladder",
            Experiment::Bounds(_) => "bounds",
            Experiment::LazyVariance(_) => "lazy-variance",
            Experiment::OptimalScan(_) => "optimal-scan",
            Experiment::GeometricGap(_) => "geometric-gap",
        }
    }

    /// Default parameters for a kind name.
    pub fn default_for(kind: &str) -> Result<Self> {
        Ok(match kind {
            "counterexample" => Experiment::Counterexample(Default::default()),
            "truncated-ladder" => Experiment::TruncatedLadder(Default::default()),
            "bounds" => Experiment::Bounds(Default::default()),
            "lazy-variance" => Experiment::LazyVariance(Default::default()),
            "optimal-scan" => Experiment::OptimalScan(Default::default()),
            "geometric-gap" => Experiment::GeometricGap(Default::default()),
            other => return Err(Error::Config(format!("unknown experiment kind {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleParams {
    pub n_steps: usize,
    pub n_runs: usize,
    /// Write every `trace_every`-th row of each trace; 0 writes no traces.
    pub trace_every: usize,
    /// Pass thresholds: adaptive runs must end above this.
    pub adaptive_min_final: f64,
    /// Control runs must end at or below this.
    pub control_max_final: f64,
    /// Runs required to meet each threshold.
    pub min_passing: usize,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self {
            n_steps: 100_000,
            n_runs: 20,
            trace_every: 100,
            adaptive_min_final: 500.0,
            control_max_final: 50.0,
            min_passing: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceConfig {
    /// `b_n`, `c_n`, `a_n = 10 + log k` block schedule.
    Schedule,
    /// `a_n = a0 + scale · n^power`.
    Power { a0: f64, scale: f64, power: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncatedLadderParams {
    pub truncation: u64,
    pub sequence: SequenceConfig,
    pub threshold: f64,
    pub max_steps: usize,
}

impl Default for TruncatedLadderParams {
    fn default() -> Self {
        Self {
            truncation: 20,
            sequence: SequenceConfig::Power {
                a0: 10.0,
                scale: 1.0,
                power: 1.0,
            },
            threshold: 1e-3,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCheck {
    Lipschitz,
    UniformErgodicity,
    StrongUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsParams {
    pub checks: Vec<BoundCheck>,
    pub n_targets: usize,
    pub d_max: usize,
    pub levels_max: usize,
    pub epsilon: f64,
    /// Random `α` per target for the uniform-ergodicity check.
    pub n_alpha: usize,
    pub horizon: usize,
    /// Largest `m` tried when searching for a certificate.
    pub m_max: usize,
    pub n_chains: usize,
    pub chain_states_max: usize,
}

impl Default for BoundsParams {
    fn default() -> Self {
        Self {
            checks: vec![
                BoundCheck::Lipschitz,
                BoundCheck::UniformErgodicity,
                BoundCheck::StrongUniform,
            ],
            n_targets: 100,
            d_max: 3,
            levels_max: 4,
            epsilon: 0.1,
            n_alpha: 20,
            horizon: 200,
            m_max: 20,
            n_chains: 50,
            chain_states_max: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LazyVarianceParams {
    pub n_chains: usize,
    pub max_states: usize,
    pub deltas: Vec<f64>,
    pub tolerance: f64,
}

impl Default for LazyVarianceParams {
    fn default() -> Self {
        Self {
            n_chains: 100,
            max_states: 8,
            deltas: vec![0.1, 0.3, 0.5, 0.9, 1.0],
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantConfig {
    Hst,
    Rr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimalScanParams {
    pub scales: Vec<f64>,
    pub a: Vec<f64>,
    pub a0: f64,
    pub base: String,
    pub epsilon: f64,
    pub variant: VariantConfig,
    pub gamma0: f64,
    pub adapt_steps: usize,
    pub eval_steps: usize,
    pub weight_tolerance: f64,
    pub ratio_slack: f64,
    pub acceptance_band: [f64; 2],
    pub last_batches: usize,
    /// Record `α_n` every this many steps in `weights.csv`.
    pub weight_record_every: usize,
}

impl Default for OptimalScanParams {
    fn default() -> Self {
        Self {
            scales: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            a: vec![1.0; 5],
            a0: 0.0,
            base: "epanechnikov".into(),
            epsilon: 0.01,
            variant: VariantConfig::Rr,
            gamma0: 1.0,
            adapt_steps: 2_000_000,
            eval_steps: 1_000_000,
            weight_tolerance: 0.05,
            ratio_slack: 1.25,
            acceptance_band: [0.34, 0.54],
            last_batches: 100,
            weight_record_every: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometricGapParams {
    pub p: f64,
    pub proposal_n: usize,
    pub proposal_max: f64,
    pub kernel_n: usize,
    pub kernel_band: [f64; 2],
    pub trend_ps: Vec<f64>,
    pub trend_range: [usize; 2],
}

impl Default for GeometricGapParams {
    fn default() -> Self {
        Self {
            p: 0.5,
            proposal_n: 30,
            proposal_max: 1e-8,
            kernel_n: 25,
            kernel_band: [0.45, 0.5],
            trend_ps: vec![0.3, 0.5, 0.7],
            trend_range: [10, 40],
        }
    }
}

impl ExperimentConfig {
    pub fn new(seed: u64, experiment: Experiment) -> Self {
        Self {
            seed,
            output_dir: None,
            experiment,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Range checks that serde cannot express. Errors name the field.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Config(format!("{field}: {why}")));
        match &self.experiment {
            Experiment::Counterexample(p) => {
                if p.n_steps == 0 || p.n_runs == 0 {
                    return bad("n_steps/n_runs", "must be positive");
                }
                if p.min_passing > p.n_runs {
                    return bad("min_passing", "cannot exceed n_runs");
                }
            }
            Experiment::TruncatedLadder(p) => {
                if p.truncation < 2 {
                    return bad("truncation", "must be at least 2");
                }
                if !(p.threshold > 0.0 && p.threshold < 1.0) {
                    return bad("threshold", "must lie in (0, 1)");
                }
                if let SequenceConfig::Power { a0, scale, power } = p.sequence {
                    if !(a0 > 8.0 && scale >= 0.0 && power >= 0.0) {
                        return bad("sequence", "needs a0 > 8, scale >= 0, power >= 0");
                    }
                }
            }
            Experiment::Bounds(p) => {
                if p.d_max == 0 || p.levels_max < 2 {
                    return bad("d_max/levels_max", "need d_max >= 1 and levels_max >= 2");
                }
                if !(p.epsilon > 0.0 && p.epsilon <= 1.0 / p.d_max as f64) {
                    return bad("epsilon", "must lie in (0, 1/d_max]");
                }
                if p.m_max == 0 || p.chain_states_max < 2 {
                    return bad("m_max/chain_states_max", "need m_max >= 1 and chain_states_max >= 2");
                }
            }
            Experiment::LazyVariance(p) => {
                if p.max_states < 2 {
                    return bad("max_states", "must be at least 2");
                }
                if p.deltas.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
                    return bad("deltas", "each must lie in (0, 1]");
                }
            }
            Experiment::OptimalScan(p) => {
                let d = p.scales.len();
                if d == 0 || p.a.len() != d {
                    return bad("scales/a", "must be nonempty and of equal length");
                }
                if p.scales.iter().any(|c| !(*c > 0.0)) {
                    return bad("scales", "must be positive");
                }
                if !(p.epsilon > 0.0 && p.epsilon <= 1.0 / d as f64) {
                    return bad("epsilon", "must lie in (0, 1/d]");
                }
                if !(p.gamma0 > 0.0) {
                    return bad("gamma0", "must be positive");
                }
                if p.eval_steps < crate::variance::MIN_TRACE_LEN {
                    return bad("eval_steps", "too short for autocorrelation estimates");
                }
            }
            Experiment::GeometricGap(p) => {
                if !(p.p > 0.0 && p.p < 1.0) || p.trend_ps.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
                    return bad("p/trend_ps", "must lie in (0, 1)");
                }
                if p.trend_range[0] > p.trend_range[1] {
                    return bad("trend_range", "must be increasing");
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (sorted keys), excluding the
    /// output directory.
    pub fn digest(&self) -> Result<String> {
        let mut canon = self.clone();
        canon.output_dir = None;
        let value = serde_json::to_value(&canon).map_err(|e| Error::Config(e.to_string()))?;
        let text = serde_json::to_string(&value).map_err(|e| Error::Config(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let c = ExperimentConfig::from_toml_str("kind = \"lazy-variance\"\nseed = 7\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.experiment, Experiment::LazyVariance(LazyVarianceParams::default()));
    }

    #[test]
    fn unknown_field_is_reported_by_name() {
        let e = ExperimentConfig::from_toml_str("kind = \"geometric-gap\"\nseed = 1\npp = 0.5\n").unwrap_err();
        assert!(e.to_string().contains("pp"), "{e}");
    }

    #[test]
    fn range_error_names_field() {
        let e = ExperimentConfig::from_toml_str("kind = \"geometric-gap\"\nseed = 1\np = 1.5\n").unwrap_err();
        assert!(e.to_string().contains("p/trend_ps"), "{e}");
    }

    #[test]
    fn digest_ignores_output_dir_and_key_order() {
        let a = ExperimentConfig::from_toml_str("seed = 1\nkind = \"geometric-gap\"\np = 0.3\nkernel_n = 20\n").unwrap();
        let mut b = ExperimentConfig::from_toml_str("kind = \"geometric-gap\"\nkernel_n = 20\np = 0.3\nseed = 1\n").unwrap();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(a.digest().unwrap(), b.digest().unwrap());
        let c = ExperimentConfig::from_toml_str("kind = \"geometric-gap\"\nseed = 2\np = 0.3\nkernel_n = 20\n").unwrap();
        assert_ne!(a.digest().unwrap(), c.digest().unwrap());
    }

    #[test]
    fn toml_roundtrip() {
        for kind in ["counterexample", "truncated-ladder", "bounds", "lazy-variance", "optimal-scan", "geometric-gap"] {
            let c = ExperimentConfig::new(3, Experiment::default_for(kind).unwrap());
            let text = c.to_toml_string().unwrap();
            assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c, "{kind}");
        }
    }
}
