use serde::{Deserialize, Serialize};

use crate::data::AugmentConfig;
use crate::error::{ensure, Result};
use crate::nn::AdamWConfig;

/// How the policy network starts out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyInit {
    /// Copy of the classifier after warmup.
    #[default]
    CloneClassifier,
    /// Fresh random weights with the classifier's architecture.
    Random,
}

/// Hyperparameters for one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Steps buffered per policy update.
    pub beta: usize,
    /// Discount rate in `[0, 1]`.
    pub gamma: f64,
    pub policy_lr: f64,
    pub classifier_lr: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_labeled: usize,
    pub batch_unlabeled: usize,
    pub batch_val: usize,
    pub warmup_steps: usize,
    pub seed: u64,
    pub pseudo_loss_weight: f64,
    /// Weak augmentation of labeled and unlabeled training inputs.
    pub augment: bool,
    pub augment_config: AugmentConfig,
    pub hidden_dims: Vec<usize>,
    pub num_classes: usize,
    pub policy_init: PolicyInit,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            beta: 50,
            gamma: 0.9,
            policy_lr: 4e-5,
            classifier_lr: 4e-5,
            weight_decay: 0.0,
            epochs: 10,
            batch_labeled: 32,
            batch_unlabeled: 32,
            batch_val: 64,
            warmup_steps: 100,
            seed: 0,
            pseudo_loss_weight: 1.0,
            augment: false,
            augment_config: AugmentConfig::default(),
            hidden_dims: vec![64, 32],
            num_classes: 2,
            policy_init: PolicyInit::default(),
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.beta >= 1, "beta must be at least 1");
        ensure!(
            (0.0..=1.0).contains(&self.gamma),
            "gamma must be in [0, 1], got {}",
            self.gamma
        );
        ensure!(
            self.policy_lr > 0.0 && self.policy_lr.is_finite(),
            "policy_lr must be positive, got {}",
            self.policy_lr
        );
        ensure!(
            self.classifier_lr > 0.0 && self.classifier_lr.is_finite(),
            "classifier_lr must be positive, got {}",
            self.classifier_lr
        );
        ensure!(
            self.weight_decay >= 0.0 && self.weight_decay.is_finite(),
            "weight_decay must be non-negative"
        );
        ensure!(
            self.batch_labeled >= 1 && self.batch_unlabeled >= 1 && self.batch_val >= 1,
            "batch sizes must be at least 1"
        );
        ensure!(
            self.pseudo_loss_weight >= 0.0 && self.pseudo_loss_weight.is_finite(),
            "pseudo_loss_weight must be non-negative"
        );
        ensure!(self.num_classes >= 2, "need at least two classes");
        ensure!(
            self.hidden_dims.iter().all(|&d| d > 0),
            "hidden layer widths must be positive"
        );
        let a = &self.augment_config;
        ensure!(
            (0.0..=1.0).contains(&a.flip_prob)
                && 0.0 < a.scale_min
                && a.scale_min <= a.scale_max
                && a.scale_max <= 1.0,
            "augment_config needs flip_prob in [0, 1] and 0 < scale_min <= scale_max <= 1"
        );
        ensure!(
            (0.0..1.0).contains(&self.adam_beta1)
                && (0.0..1.0).contains(&self.adam_beta2)
                && self.adam_eps > 0.0,
            "invalid Adam moment parameters"
        );
        Ok(())
    }

    pub fn layer_dims(&self, n_features: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(n_features);
        dims.extend(&self.hidden_dims);
        dims.push(self.num_classes);
        dims
    }

    pub fn classifier_optimizer(&self) -> AdamWConfig {
        self.adam(self.classifier_lr)
    }

    pub fn policy_optimizer(&self) -> AdamWConfig {
        self.adam(self.policy_lr)
    }

    fn adam(&self, lr: f64) -> AdamWConfig {
        AdamWConfig {
            lr,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
            weight_decay: self.weight_decay,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = EngineConfig::default();
        c.validate().unwrap();
        assert_eq!((c.beta, c.gamma, c.policy_lr, c.epochs), (50, 0.9, 4e-5, 10));
        assert_eq!(c.layer_dims(20), vec![20, 64, 32, 2]);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            EngineConfig { gamma: 1.1, ..Default::default() },
            EngineConfig { gamma: -0.1, ..Default::default() },
            EngineConfig { beta: 0, ..Default::default() },
            EngineConfig { policy_lr: 0.0, ..Default::default() },
            EngineConfig { classifier_lr: -1.0, ..Default::default() },
            EngineConfig { batch_val: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
