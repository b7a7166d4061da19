//! The pseudo supervisor and its baselines.
//!
//! Each training step:
//! 1. measure the classifier's loss on a validation mini-batch,
//! 2. let the policy sample pseudo labels for an unlabeled mini-batch,
//! 3. take one classifier step on labeled + pseudo-labeled data,
//! 4. re-measure the loss on the same validation mini-batch,
//! 5. reward the step with `max(exp(before − after) − 1, 0)`.
//!
//! Every `beta` steps the buffered trajectory drives one REINFORCE update of
//! the policy using discounted returns-to-go.

mod classifier;
mod config;
mod engine;
mod history;
mod policy;
mod reward;

pub use classifier::{
    classifier_gradients, classifier_step, eval_loss, eval_val_loss, evaluate, warmup_supervised,
    Batch, BatchCycler,
};
pub use config::{EngineConfig, PolicyInit};
pub use engine::{train, train_self_training, train_supervised_only, PseudoSelection, TrainOutput};
pub use history::{EpochRecord, History, StepRecord};
pub use policy::{
    policy_update, sample_pseudo_labels, surrogate_gradient, surrogate_objective, PolicyModel,
    PolicyUpdate, Trajectory, TrajectoryStep,
};
pub use reward::{compute_reward, discounted_return, returns_to_go};
