//! Experiment configuration, read from TOML.
//!
//! Every field has a default, so an empty file is a valid configuration. The
//! `[engine]` table is merged over [`desk_engine`] rather than over
//! `EngineConfig::default()`, so overriding one hyperparameter keeps the rest
//! of the desk-scale settings.

use std::fmt;
use std::path::{Path, PathBuf};

use pseudosup_core::data::SplitFractions;
use pseudosup_core::EngineConfig;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Method {
    PseudoSup,
    PseudoSupAug,
    Supervised,
    SelfTraining,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::PseudoSup,
        Method::PseudoSupAug,
        Method::Supervised,
        Method::SelfTraining,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PseudoSup => "pseudo_sup",
            Method::PseudoSupAug => "pseudo_sup_aug",
            Method::Supervised => "supervised",
            Method::SelfTraining => "self_training",
        }
    }

    /// Whether the method trains a policy network (and so has β and γ).
    pub fn uses_policy(self) -> bool {
        matches!(self, Method::PseudoSup | Method::PseudoSupAug)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where samples come from: a pre-split dataset file, or the synthetic
/// generators (regenerated and re-split for every seed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: Option<PathBuf>,
    pub n_per_class: usize,
    pub dim: usize,
    pub class_separation: f64,
    /// `[height, width]`. When set, samples are grid-shaped and `dim` is ignored.
    pub grid: Option<[usize; 2]>,
    /// Length the 52-location vector modality is up-scaled to in multimodal mode.
    pub vf_target_len: usize,
    pub label_fraction: f64,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            path: None,
            n_per_class: 2000,
            dim: 20,
            class_separation: 1.0,
            grid: None,
            vf_target_len: 52,
            label_fraction: 0.25,
            train_fraction: 0.5,
            val_fraction: 0.1,
            test_fraction: 0.4,
        }
    }
}

impl DatasetConfig {
    pub fn fractions(&self) -> SplitFractions {
        SplitFractions::new(self.train_fraction, self.val_fraction, self.test_fraction)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationConfig {
    pub betas: Vec<usize>,
    pub gammas: Vec<f64>,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            betas: vec![10, 50, 100],
            gammas: vec![0.0, 0.5, 0.9, 1.0],
        }
    }
}

/// The (β, γ) cell flagged in ablation output as the reference optimum.
pub const REFERENCE_BETA: usize = 50;
pub const REFERENCE_GAMMA: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Method for `run` and `ablate`.
    pub method: Method,
    /// Methods for `compare`.
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Generate a grid modality plus a vector modality and concatenate them.
    pub multimodal: bool,
    /// Softmax confidence a self-training pseudo label must exceed.
    pub confidence_threshold: Option<f64>,
    pub dataset: DatasetConfig,
    /// `engine.seed` is ignored; each run takes its seed from `seeds`.
    #[serde(deserialize_with = "engine_over_desk")]
    pub engine: EngineConfig,
    pub ablation: AblationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            method: Method::PseudoSup,
            methods: vec![Method::Supervised, Method::PseudoSup],
            seeds: vec![1, 2, 3, 4, 5],
            output_dir: PathBuf::from("runs"),
            multimodal: false,
            confidence_threshold: None,
            dataset: DatasetConfig::default(),
            engine: desk_engine(),
            ablation: AblationConfig::default(),
        }
    }
}

/// Engine settings that train in well under a second per run on the default
/// synthetic data. The policy keeps the small learning rate; the classifier
/// gets a larger one because desk-scale runs are short.
pub fn desk_engine() -> EngineConfig {
    EngineConfig {
        classifier_lr: 1e-3,
        epochs: 20,
        ..EngineConfig::default()
    }
}

fn engine_over_desk<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<EngineConfig, D::Error> {
    use serde::de::Error as _;
    let given = toml::Value::deserialize(d)?;
    let mut merged = toml::Value::try_from(desk_engine()).map_err(D::Error::custom)?;
    merge(&mut merged, given);
    merged.try_into().map_err(D::Error::custom)
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string().trim_end()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::config(format!("cannot serialize config: {e}")))
    }

    /// Checks everything that does not depend on a particular verb.
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, msg: String| Err(CliError::config(format!("{field}: {msg}")));
        if self.seeds.is_empty() {
            return fail("seeds", "at least one seed is required".into());
        }
        if let Some(dup) = first_duplicate(&self.seeds) {
            return fail("seeds", format!("seed {dup} is listed twice"));
        }
        self.check_method(self.method)?;
        if let Some(t) = self.confidence_threshold {
            if !(t > 0.5 && t <= 1.0) {
                return fail("confidence_threshold", format!("{t} is outside (0.5, 1]"));
            }
        }
        if let Err(e) = self.engine.validate() {
            return fail("engine", e.to_string());
        }

        let d = &self.dataset;
        if d.path.is_none() {
            if d.n_per_class == 0 {
                return fail("dataset.n_per_class", "must be at least 1".into());
            }
            if d.grid.is_none() && d.dim == 0 {
                return fail("dataset.dim", "must be at least 1".into());
            }
            if let Some([h, w]) = d.grid {
                if h == 0 || w == 0 {
                    return fail("dataset.grid", format!("{h}x{w} has no cells"));
                }
            }
            if !(d.class_separation.is_finite() && d.class_separation >= 0.0) {
                return fail("dataset.class_separation", "must be finite and non-negative".into());
            }
            if !(d.label_fraction > 0.0 && d.label_fraction <= 1.0) {
                return fail("dataset.label_fraction", format!("{} is outside (0, 1]", d.label_fraction));
            }
            let fr = [d.train_fraction, d.val_fraction, d.test_fraction];
            if fr.iter().any(|f| !(f.is_finite() && *f >= 0.0)) || (fr.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return fail(
                    "dataset.train_fraction",
                    "train, val and test fractions must be non-negative and sum to 1".into(),
                );
            }
            if self.multimodal {
                if d.grid.is_none() {
                    return fail("multimodal", "requires dataset.grid".into());
                }
                if d.vf_target_len < pseudosup_core::data::VF_LOCATIONS {
                    return fail(
                        "dataset.vf_target_len",
                        format!("must be at least {}", pseudosup_core::data::VF_LOCATIONS),
                    );
                }
            }
        } else if self.multimodal {
            return fail("multimodal", "only applies to synthetic data, not dataset.path".into());
        }
        Ok(())
    }

    /// Requirements specific to one method.
    pub fn check_method(&self, method: Method) -> Result<()> {
        match method {
            Method::SelfTraining if self.confidence_threshold.is_none() => Err(CliError::config(
                "confidence_threshold: required when the method is self_training",
            )),
            Method::PseudoSupAug if self.dataset.path.is_none() && self.dataset.grid.is_none() => {
                Err(CliError::config("dataset.grid: pseudo_sup_aug needs grid-shaped samples"))
            }
            _ => Ok(()),
        }
    }

    pub fn validate_compare(&self) -> Result<()> {
        self.validate()?;
        if self.methods.len() < 2 {
            return Err(CliError::config("methods: compare needs at least two methods"));
        }
        if let Some(dup) = first_duplicate(&self.methods) {
            return Err(CliError::config(format!("methods: {dup} is listed twice")));
        }
        self.methods.iter().try_for_each(|&m| self.check_method(m))
    }

    pub fn validate_ablation(&self) -> Result<()> {
        self.validate()?;
        let a = &self.ablation;
        if !self.method.uses_policy() {
            return Err(CliError::config(format!(
                "method: ablation varies β and γ, which {} does not use",
                self.method
            )));
        }
        if a.betas.is_empty() || a.gammas.is_empty() {
            return Err(CliError::config("ablation: beta and gamma grids must be non-empty"));
        }
        if a.betas.contains(&0) {
            return Err(CliError::config("ablation.betas: β must be at least 1"));
        }
        if let Some(g) = a.gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(CliError::config(format!("ablation.gammas: {g} is outside [0, 1]")));
        }
        if let Some(dup) = first_duplicate(&a.betas) {
            return Err(CliError::config(format!("ablation.betas: {dup} is listed twice")));
        }
        Ok(())
    }
}

fn first_duplicate<T: PartialEq + Copy>(items: &[T]) -> Option<T> {
    items
        .iter()
        .enumerate()
        .find(|(i, x)| items[..*i].contains(x))
        .map(|(_, x)| *x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn partial_engine_table_keeps_desk_defaults() {
        let cfg = ExperimentConfig::from_toml("[engine]\nbeta = 10\n[engine.augment_config]\nflip_prob = 0.0\n").unwrap();
        assert_eq!(cfg.engine.beta, 10);
        assert_eq!(cfg.engine.classifier_lr, desk_engine().classifier_lr);
        assert_eq!(cfg.engine.augment_config.flip_prob, 0.0);
        assert_eq!(cfg.engine.augment_config.scale_min, 0.8);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml("sedes = [1]").is_err());
        assert!(ExperimentConfig::from_toml("[engine]\nbetta = 3").is_err());
    }

    #[test]
    fn round_trip_through_toml() {
        let mut cfg = ExperimentConfig {
            confidence_threshold: Some(0.95),
            ..Default::default()
        };
        cfg.dataset.grid = Some([6, 5]);
        cfg.engine.gamma = 0.123456789012345;
        cfg.ablation.gammas = vec![0.1, 1.0 / 3.0];
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = ExperimentConfig { method: Method::SelfTraining, ..Default::default() };
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("confidence_threshold"), "{msg}");
        cfg.confidence_threshold = Some(0.9);
        cfg.validate().unwrap();

        let cfg = ExperimentConfig { seeds: vec![], ..Default::default() };
        assert!(cfg.validate().unwrap_err().to_string().contains("seeds"));

        let mut cfg = ExperimentConfig::default();
        cfg.ablation.gammas = vec![0.9, 1.5];
        assert!(cfg.validate_ablation().unwrap_err().to_string().contains("ablation.gammas"));

        let cfg = ExperimentConfig { methods: vec![Method::Supervised], ..Default::default() };
        assert!(cfg.validate_compare().unwrap_err().to_string().contains("methods"));

        let cfg = ExperimentConfig { method: Method::PseudoSupAug, ..Default::default() };
        assert!(cfg.validate().unwrap_err().to_string().contains("dataset.grid"));
    }
}
