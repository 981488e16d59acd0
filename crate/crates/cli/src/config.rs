//! Declarative experiment configs: a versioned JSON document pins the model,
//! the sweep grids, the trial count, and the master seed, so every CSV is
//! reproducible from its config alone.

use onebit_amp::estimation::EstimateStrategy;
use onebit_amp::model::{ModelConfig, NoiseDistribution};
use onebit_amp::sampling::ExperimentSeed;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Mse,
    Detection,
    Recovery,
    Gapfit,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Mse => "mse",
            ExperimentKind::Detection => "detection",
            ExperimentKind::Recovery => "recovery",
            ExperimentKind::Gapfit => "gapfit",
        }
    }
}

/// Gain profile across the quantizer bank.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    /// Fixed list; its length is the quantizer count.
    Explicit { values: Vec<f64> },
    /// Linear profile from `u` down to `l`.
    Ramp { u: f64, l: f64 },
    /// `sin(2 pi x_i)` at sorted uniform positions.
    Sinusoid { seed: u64 },
    /// Independent standard normal gains.
    Gaussian { seed: u64 },
}

/// Threshold profile across the quantizer bank.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ThresholdSpec {
    Explicit { values: Vec<f64> },
    /// Proportional to the gains: `tau = c0 * h`.
    Scaled { c0: f64 },
    /// Independent uniforms over the amplitude interval.
    Uniform { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    Gaussian,
    Laplace,
}

impl From<NoiseKind> for NoiseDistribution {
    fn from(kind: NoiseKind) -> Self {
        match kind {
            NoiseKind::Gaussian => NoiseDistribution::Gaussian,
            NoiseKind::Laplace => NoiseDistribution::Laplace,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub h: ShapeSpec,
    pub tau: ThresholdSpec,
    /// Quantizer count; redundant (and checked) for explicit gain lists,
    /// ignored by experiments that sweep the count.
    #[serde(default)]
    pub k: Option<usize>,
    pub sigma_w: f64,
    pub q0: f64,
    pub q1: f64,
    pub delta: f64,
    #[serde(default)]
    pub noise: NoiseKind,
}

/// Initialization strategies exposed on the command line and in CSV
/// column names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Auto,
    Reorder,
    Altmax,
    Goodinit,
}

impl StrategyName {
    pub fn label(self) -> &'static str {
        match self {
            StrategyName::Auto => "auto",
            StrategyName::Reorder => "reorder",
            StrategyName::Altmax => "altmax",
            StrategyName::Goodinit => "goodinit",
        }
    }

    pub fn to_strategy(self) -> EstimateStrategy {
        match self {
            StrategyName::Auto => EstimateStrategy::Auto,
            StrategyName::Reorder => EstimateStrategy::Reorder,
            StrategyName::Altmax => EstimateStrategy::AltMax,
            StrategyName::Goodinit => EstimateStrategy::AltMaxGoodInit,
        }
    }
}

/// Publication-scale grid and trial overrides activated by `--full`.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FullOverrides {
    #[serde(default)]
    pub n_grid: Option<Vec<u64>>,
    #[serde(default)]
    pub k_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Schema version; currently 1.
    pub version: u32,
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    pub theta_true: f64,
    #[serde(default)]
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub k_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Output CSV path; `--out` overrides.
    #[serde(default)]
    pub out: Option<String>,
    /// Detection only: false-alarm target, default 0.05.
    #[serde(default)]
    pub p_fa: Option<f64>,
    /// Estimator columns (amplitude sweeps) or joint-detector variants
    /// (detection sweeps).
    #[serde(default)]
    pub strategies: Option<Vec<StrategyName>>,
    /// Gap-fit only: pin the exponent and fit the constant alone.
    #[serde(default)]
    pub fixed_alpha: Option<f64>,
    #[serde(default)]
    pub full: Option<FullOverrides>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.version != 1 {
            return Err(format!("unsupported config version {}", self.version));
        }
        if self.trials < 1 {
            return Err("trials must be at least 1".into());
        }
        // Rejecting-side comparisons so NaN fails validation too.
        if self.model.sigma_w.is_nan() || self.model.sigma_w <= 0.0 {
            return Err("sigma_w must be positive".into());
        }
        if self.model.delta.is_nan() || self.model.delta <= 0.0 {
            return Err("delta must be positive".into());
        }
        if let Some(p_fa) = self.p_fa {
            if !(p_fa > 0.0 && p_fa <= 1.0) {
                return Err(format!("p_fa {p_fa} outside (0, 1]"));
            }
        }
        match self.experiment {
            ExperimentKind::Mse | ExperimentKind::Detection => {
                if self.n_grid.is_empty() {
                    return Err("n_grid must not be empty".into());
                }
                self.fixed_k()?;
            }
            ExperimentKind::Recovery => {
                if self.n_grid.is_empty() {
                    return Err("n_grid must not be empty (sample counts)".into());
                }
                if self.k_grid.is_empty() {
                    self.fixed_k()?;
                }
            }
            ExperimentKind::Gapfit => {
                if self.k_grid.len() < 3 {
                    return Err("gapfit needs a k_grid with at least three values".into());
                }
            }
        }
        if self.n_grid.contains(&0) {
            return Err("n_grid entries must be positive".into());
        }
        if self.k_grid.iter().any(|&k| k < 2) {
            return Err("k_grid entries must be at least 2".into());
        }
        // Resolve once so shape errors surface as config errors, not
        // mid-run failures.
        let probe_k = match self.k_grid.first() {
            Some(&k) => k,
            None => self.fixed_k()?,
        };
        self.model.resolve_fixed(probe_k)?;
        Ok(())
    }

    /// Quantizer count for experiments that do not sweep it.
    pub fn fixed_k(&self) -> Result<usize, String> {
        let k = match (&self.model.h, self.model.k) {
            (ShapeSpec::Explicit { values }, declared) => {
                if let Some(k) = declared {
                    if k != values.len() {
                        return Err(format!(
                            "model.k = {k} disagrees with {} explicit gains",
                            values.len()
                        ));
                    }
                }
                values.len()
            }
            (_, Some(k)) => k,
            (_, None) => return Err("model.k is required unless gains are explicit".into()),
        };
        if k < 2 {
            return Err("need at least two quantizers".into());
        }
        Ok(k)
    }

    /// Applies command-line overrides, then `--full` grid restoration.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        out: Option<String>,
        trials: Option<usize>,
        full: bool,
    ) {
        if full {
            if let Some(overrides) = self.full.clone() {
                if let Some(n_grid) = overrides.n_grid {
                    self.n_grid = n_grid;
                }
                if let Some(k_grid) = overrides.k_grid {
                    self.k_grid = k_grid;
                }
                if let Some(t) = overrides.trials {
                    self.trials = t;
                }
            }
        }
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(o) = out {
            self.out = Some(o);
        }
        if let Some(t) = trials {
            self.trials = t;
        }
    }

    pub fn master_seed(&self) -> ExperimentSeed {
        ExperimentSeed::new(self.seed, 0)
    }
}

pub fn ramp_shape(u: f64, l: f64, k: usize) -> Vec<f64> {
    assert!(k >= 2);
    (0..k).map(|i| u + (l - u) * i as f64 / (k - 1) as f64).collect()
}

pub fn sinusoid_shape<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    x.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
    x.into_iter().map(|xi| (std::f64::consts::TAU * xi).sin()).collect()
}

pub fn gaussian_shape<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn uniform_thresholds<R: Rng>(k: usize, delta: f64, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-delta..delta)).collect()
}

impl ModelSpec {
    fn build(&self, h: Vec<f64>, tau: Vec<f64>) -> Result<ModelConfig, String> {
        ModelConfig::new(h, tau, self.sigma_w, self.q0, self.q1, self.delta, self.noise.into())
            .map_err(|e| format!("invalid model: {e}"))
    }

    fn gains_fixed(&self, k: usize) -> Result<Vec<f64>, String> {
        Ok(match &self.h {
            ShapeSpec::Explicit { values } => {
                if values.len() != k {
                    return Err(format!("expected {k} gains, config lists {}", values.len()));
                }
                values.clone()
            }
            ShapeSpec::Ramp { u, l } => ramp_shape(*u, *l, k),
            ShapeSpec::Sinusoid { seed } => {
                sinusoid_shape(k, &mut ExperimentSeed::new(*seed, 0).rng())
            }
            ShapeSpec::Gaussian { seed } => {
                gaussian_shape(k, &mut ExperimentSeed::new(*seed, 0).rng())
            }
        })
    }

    fn thresholds_fixed(&self, h: &[f64]) -> Result<Vec<f64>, String> {
        Ok(match &self.tau {
            ThresholdSpec::Explicit { values } => {
                if values.len() != h.len() {
                    return Err(format!(
                        "expected {} thresholds, config lists {}",
                        h.len(),
                        values.len()
                    ));
                }
                values.clone()
            }
            ThresholdSpec::Scaled { c0 } => h.iter().map(|&x| c0 * x).collect(),
            ThresholdSpec::Uniform { seed } => {
                uniform_thresholds(h.len(), self.delta, &mut ExperimentSeed::new(*seed, 0).rng())
            }
        })
    }

    /// One fixed model: randomized parts come from their embedded seeds,
    /// so the model does not change across trials or master-seed overrides.
    pub fn resolve_fixed(&self, k: usize) -> Result<ModelConfig, String> {
        let h = self.gains_fixed(k)?;
        let tau = self.thresholds_fixed(&h)?;
        self.build(h, tau)
    }

    /// A freshly randomized model drawn from `rng` (gains first, then
    /// thresholds); deterministic parts are unchanged. Used by sweeps that
    /// average over shapes, where embedded seeds are ignored.
    pub fn resolve_random<R: Rng>(&self, k: usize, rng: &mut R) -> Result<ModelConfig, String> {
        let h = match &self.h {
            ShapeSpec::Sinusoid { .. } => sinusoid_shape(k, rng),
            ShapeSpec::Gaussian { .. } => gaussian_shape(k, rng),
            _ => self.gains_fixed(k)?,
        };
        let tau = match &self.tau {
            ThresholdSpec::Uniform { .. } => uniform_thresholds(h.len(), self.delta, rng),
            _ => self.thresholds_fixed(&h)?,
        };
        self.build(h, tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json() -> String {
        r#"{
            "version": 1,
            "experiment": "mse",
            "model": {
                "h": {"kind": "ramp", "u": 2.5, "l": -1.5},
                "tau": {"kind": "scaled", "c0": 0.5},
                "k": 20,
                "sigma_w": 1.0,
                "q0": 0.05,
                "q1": 0.05,
                "delta": 2.0
            },
            "theta_true": 1.0,
            "n_grid": [100, 1000],
            "trials": 10,
            "seed": 7,
            "out": "mse.csv"
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_resolves_a_ramp_config() {
        let cfg = ExperimentConfig::from_json(&base_json()).unwrap();
        assert_eq!(cfg.fixed_k().unwrap(), 20);
        let model = cfg.model.resolve_fixed(20).unwrap();
        assert_eq!(model.k(), 20);
        assert!((model.h[0] - 2.5).abs() < 1e-15, "ramp starts at u");
        assert!((model.h[19] + 1.5).abs() < 1e-15, "ramp ends at l");
        assert!((model.tau[3] - 0.5 * model.h[3]).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        let wrong_version = base_json().replace("\"version\": 1", "\"version\": 2");
        assert!(ExperimentConfig::from_json(&wrong_version)
            .unwrap_err()
            .contains("version"));

        let no_trials = base_json().replace("\"trials\": 10", "\"trials\": 0");
        assert!(ExperimentConfig::from_json(&no_trials).unwrap_err().contains("trials"));

        let empty_grid = base_json().replace("[100, 1000]", "[]");
        assert!(ExperimentConfig::from_json(&empty_grid).unwrap_err().contains("n_grid"));

        let unknown_field = base_json().replace("\"seed\": 7", "\"seed\": 7, \"sead\": 1");
        assert!(ExperimentConfig::from_json(&unknown_field).is_err());

        let bad_channel = base_json().replace("\"q0\": 0.05", "\"q0\": 1.4");
        assert!(ExperimentConfig::from_json(&bad_channel).is_err());
    }

    #[test]
    fn explicit_gain_length_must_match_k() {
        let json = base_json().replace(
            r#"{"kind": "ramp", "u": 2.5, "l": -1.5}"#,
            r#"{"kind": "explicit", "values": [1.0, -0.5, 0.3]}"#,
        );
        let err = ExperimentConfig::from_json(&json).unwrap_err();
        assert!(err.contains("disagrees"), "{err}");
    }

    #[test]
    fn randomized_shapes_are_seed_stable() {
        let mut spec = ExperimentConfig::from_json(&base_json()).unwrap().model;
        spec.h = ShapeSpec::Sinusoid { seed: 99 };
        spec.tau = ThresholdSpec::Uniform { seed: 100 };
        let a = spec.resolve_fixed(12).unwrap();
        let b = spec.resolve_fixed(12).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.tau, b.tau);
        // Sorted positions make the sinusoid start near sin(0+) territory.
        assert!(a.h.iter().all(|&x| (-1.0..=1.0).contains(&x)));
        assert!(a.tau.iter().all(|&t| (-2.0..2.0).contains(&t)));

        let mut rng = ExperimentSeed::new(5, 0).rng();
        let c = spec.resolve_random(12, &mut rng).unwrap();
        let d = spec.resolve_random(12, &mut rng).unwrap();
        assert_ne!(c.h, d.h, "fresh draws differ");
    }

    #[test]
    fn overrides_apply_in_order() {
        let mut cfg = ExperimentConfig::from_json(&base_json()).unwrap();
        cfg.full = Some(FullOverrides {
            n_grid: Some(vec![10_000]),
            k_grid: None,
            trials: Some(5000),
        });
        cfg.apply_overrides(Some(11), Some("x.csv".into()), Some(42), true);
        assert_eq!(cfg.n_grid, vec![10_000]);
        // Explicit --trials wins over the full-scale trial count.
        assert_eq!(cfg.trials, 42);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.out.as_deref(), Some("x.csv"));
    }
}
