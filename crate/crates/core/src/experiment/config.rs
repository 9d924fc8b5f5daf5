use serde::{Deserialize, Serialize};

use super::RunError;
use crate::asymptotics::DEFAULT_TRUNCATION;
use crate::demographics::{Demographics, RateDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Broadcast,
    Passage,
    Curve,
    Slowdown,
    Oracle,
    Yule,
    Limits,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Broadcast => "broadcast",
            ExperimentKind::Passage => "passage",
            ExperimentKind::Curve => "curve",
            ExperimentKind::Slowdown => "slowdown",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::Yule => "yule",
            ExperimentKind::Limits => "limits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

/// Transmitter probability as a function of population size,
/// `p(n) = min(1, scale · n^exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PRule {
    pub scale: f64,
    pub exponent: f64,
}

impl PRule {
    pub fn eval(&self, n: usize) -> f64 {
        (self.scale * (n as f64).powf(self.exponent)).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemographicsConfig {
    pub n: usize,
    /// Fixed transmitter probability. Exactly one of `p` and `p_rule` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_rule: Option<PRule>,
    pub z0: f64,
    pub rates: RateDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentParams {
    /// Tagged nodes per replicate (passage).
    pub k_targets: usize,
    /// Informed-fraction grid (curve).
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    /// Series terms of the `V` sampler.
    pub truncation: usize,
    /// Limit-law reference draws for KS comparisons.
    pub reference_samples: usize,
    /// Birth count for the thinned Yule comparison (yule).
    pub yule_m: usize,
    /// Phase split exponent (broadcast phase columns).
    pub beta: f64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            k_targets: 2,
            grid_lo: -8.0,
            grid_hi: 8.0,
            grid_step: 0.1,
            truncation: DEFAULT_TRUNCATION,
            reference_samples: 10_000,
            yule_m: 50,
            beta: 0.75,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Population sizes to run in turn; `demographics.n` is ignored when set.
    pub n: Vec<usize>,
}

fn default_out_dir() -> String {
    "results".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    pub demographics: DemographicsConfig,
    #[serde(default)]
    pub params: ExperimentParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Broadcast,
            replicates: 1000,
            master_seed: 1,
            format: OutputFormat::Csv,
            out_dir: default_out_dir(),
            demographics: DemographicsConfig {
                n: 1000,
                p: Some(0.5),
                p_rule: None,
                z0: 1.0,
                rates: RateDistribution::PointMass { value: 1.0 },
            },
            params: ExperimentParams::default(),
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: Self = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Population sizes this config runs.
    pub fn sizes(&self) -> Vec<usize> {
        match &self.sweep {
            Some(s) => s.n.clone(),
            None => vec![self.demographics.n],
        }
    }

    /// Demographics for population size `n`.
    pub fn demographics_for(&self, n: usize) -> Demographics {
        let d = &self.demographics;
        let p = match (d.p, d.p_rule) {
            (Some(p), _) => p,
            (None, Some(rule)) => rule.eval(n),
            (None, None) => f64::NAN,
        };
        Demographics::new(n, p, d.z0, d.rates)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        let d = &self.demographics;
        match (d.p, d.p_rule) {
            (Some(_), Some(_)) => return bad("set only one of demographics.p and demographics.p_rule".into()),
            (None, None) => return bad("one of demographics.p or demographics.p_rule is required".into()),
            _ => {}
        }
        if let Some(s) = &self.sweep {
            if s.n.is_empty() {
                return bad("sweep.n must list at least one population size".into());
            }
        }
        for n in self.sizes() {
            self.demographics_for(n)
                .validate()
                .map_err(|e| RunError::Config(format!("demographics (n = {n}): {e}")))?;
        }
        let p = &self.params;
        if p.truncation == 0 {
            return bad("params.truncation must be at least 1".into());
        }
        if p.reference_samples == 0 {
            return bad("params.reference_samples must be at least 1".into());
        }
        if !(p.grid_step > 0.0 && p.grid_lo.is_finite() && p.grid_hi.is_finite() && p.grid_lo <= p.grid_hi) {
            return bad("params grid needs finite grid_lo <= grid_hi and grid_step > 0".into());
        }
        if !(p.beta > 0.0 && p.beta < 1.0) {
            return bad("params.beta must lie in (0, 1)".into());
        }
        match self.experiment {
            ExperimentKind::Passage => {
                let min_n = self.sizes().into_iter().min().unwrap_or(0);
                if p.k_targets == 0 || p.k_targets > min_n {
                    return bad(format!("params.k_targets must lie in 1..={min_n}"));
                }
            }
            ExperimentKind::Yule if p.yule_m == 0 => {
                return bad("params.yule_m must be at least 1".into());
            }
            ExperimentKind::Slowdown if self.sizes().iter().any(|&n| n < 2) => {
                return bad("slowdown needs n >= 2".into());
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn parses_minimal_file() {
        let text = r#"
            experiment = "oracle"
            replicates = 10
            master_seed = 7

            [demographics]
            n = 10
            p = 0.5
            z0 = 1.0
            rates = { kind = "exponential", mean = 1.0 }
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Oracle);
        assert_eq!(cfg.params, ExperimentParams::default());
        assert_eq!(cfg.demographics_for(10).rates, RateDistribution::Exponential { mean: 1.0 });
    }

    #[test]
    fn rejects_invalid_configs() {
        let mut cfg = ExperimentConfig::default();
        cfg.replicates = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::default();
        cfg.demographics.rates = RateDistribution::PointMass { value: 0.0 };
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::default();
        cfg.demographics.p_rule = Some(PRule { scale: 1.0, exponent: -0.5 });
        assert!(cfg.validate().is_err());

        assert!(ExperimentConfig::from_toml("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::from_toml("not toml at all [").is_err());
    }

    #[test]
    fn p_rule_sequence() {
        let mut cfg = ExperimentConfig::default();
        cfg.demographics.p = None;
        cfg.demographics.p_rule = Some(PRule { scale: 2.0, exponent: -0.5 });
        cfg.sweep = Some(Sweep { n: vec![1, 100, 10_000] });
        cfg.validate().unwrap();
        let ps: Vec<f64> = cfg.sizes().into_iter().map(|n| cfg.demographics_for(n).p).collect();
        assert_eq!(ps, vec![1.0, 0.2, 0.02]);
    }
}
