//! Training loops.
//!
//! The pseudo supervisor, the supervised baseline and confidence-threshold
//! self-training share one loop and differ only in where pseudo labels come
//! from. Every random decision draws from its own seeded stream, so turning
//! the pseudo path off (no unlabeled data, zero pseudo weight, nothing above
//! the confidence threshold) reproduces the supervised run exactly.

use rand::Rng as _;

use super::classifier::{classifier_step, eval_loss, evaluate, Batch, BatchCycler};
use super::policy::{policy_update, sample_pseudo_labels, PolicyModel, Trajectory, TrajectoryStep};
use super::{compute_reward, EngineConfig, EpochRecord, History, PolicyInit, StepRecord};
use crate::data::{augment_weak, features_matrix, labels_of, DatasetSplits, Sample};
use crate::error::{ensure, Result};
use crate::metrics::MetricsReport;
use crate::nn::{softmax_rows, AdamW, Matrix, MlpModel};
use crate::rng::{self, Rng};

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct TrainOutput {
    pub classifier: MlpModel,
    /// Present for the pseudo supervisor only.
    pub policy: Option<PolicyModel>,
    pub history: History,
    /// Test metrics of the final classifier.
    pub test_metrics: MetricsReport,
    /// Self-training only: the pseudo-labeled pool chosen at each epoch.
    pub selections: Vec<PseudoSelection>,
}

/// Unlabeled samples admitted by self-training in one epoch, as
/// `(index into unlabeled_train, pseudo label)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PseudoSelection {
    pub epoch: usize,
    pub picks: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum PseudoSource {
    None,
    Policy,
    Confidence(f64),
}

/// Runs the pseudo supervisor.
pub fn train(splits: &DatasetSplits, cfg: &EngineConfig) -> Result<TrainOutput> {
    run(splits, cfg, PseudoSource::Policy)
}

/// Cross-entropy on labeled data only.
pub fn train_supervised_only(splits: &DatasetSplits, cfg: &EngineConfig) -> Result<TrainOutput> {
    run(splits, cfg, PseudoSource::None)
}

/// After warmup, each epoch admits the unlabeled samples whose top softmax
/// probability reaches `confidence_threshold`, labeled with their argmax.
pub fn train_self_training(
    splits: &DatasetSplits,
    cfg: &EngineConfig,
    confidence_threshold: f64,
) -> Result<TrainOutput> {
    ensure!(
        confidence_threshold > 0.5 && confidence_threshold <= 1.0,
        "confidence threshold must be in (0.5, 1], got {}",
        confidence_threshold
    );
    run(splits, cfg, PseudoSource::Confidence(confidence_threshold))
}

/// Labeled training view: the loop reads inputs and labels from here only.
struct TrainData<'a> {
    labeled: &'a [Sample],
    labeled_x: Matrix,
    labeled_y: Vec<usize>,
    unlabeled: &'a [Sample],
    unlabeled_x: Matrix,
    val_x: Matrix,
    val_y: Vec<usize>,
}

impl<'a> TrainData<'a> {
    fn new(splits: &'a DatasetSplits) -> Result<Self> {
        let n = splits.n_features();
        let unlabeled = splits.unlabeled_train();
        Ok(TrainData {
            labeled: splits.labeled_train(),
            labeled_x: features_matrix(splits.labeled_train())?,
            labeled_y: labels_of(splits.labeled_train())?,
            unlabeled,
            unlabeled_x: if unlabeled.is_empty() {
                Matrix::zeros(0, n)
            } else {
                features_matrix(unlabeled)?
            },
            val_x: features_matrix(splits.validation())?,
            val_y: labels_of(splits.validation())?,
        })
    }
}

struct Augmenter {
    enabled: bool,
    cfg: crate::data::AugmentConfig,
    rng: Rng,
}

impl Augmenter {
    /// Rows `idx` of `x`, augmented from `samples` when enabled.
    fn rows(&mut self, samples: &[Sample], x: &Matrix, idx: &[usize]) -> Result<Matrix> {
        if !self.enabled {
            return Ok(x.select_rows(idx));
        }
        let mut out = Matrix::zeros(idx.len(), x.cols());
        for (r, &i) in idx.iter().enumerate() {
            let a = augment_weak(&samples[i], &self.cfg, &mut self.rng)?;
            out.row_mut(r).copy_from_slice(&a.features);
        }
        Ok(out)
    }
}

fn run(splits: &DatasetSplits, cfg: &EngineConfig, source: PseudoSource) -> Result<TrainOutput> {
    cfg.validate()?;
    ensure!(!splits.labeled_train().is_empty(), "labeled_train is empty");
    ensure!(!splits.validation().is_empty(), "validation split is empty");
    ensure!(!splits.test().is_empty(), "test split is empty");
    if cfg.augment {
        ensure!(
            splits.grid_dims().is_some(),
            "augmentation needs grid-shaped samples"
        );
    }
    let data = TrainData::new(splits)?;
    let n_features = splits.n_features();
    let dims = cfg.layer_dims(n_features);

    let mut init_rng = rng::stream(cfg.seed, "init");
    let classifier_seed: u64 = init_rng.random();
    let policy_seed: u64 = init_rng.random();
    let mut classifier = MlpModel::init(&dims, classifier_seed)?;
    let mut opt = AdamW::new(cfg.classifier_optimizer());
    let mut labeled_batches =
        BatchCycler::new(data.labeled.len(), rng::stream(cfg.seed, "batches/labeled"));
    let mut unlabeled_batches =
        BatchCycler::new(data.unlabeled.len(), rng::stream(cfg.seed, "batches/unlabeled"));
    let mut val_batches =
        BatchCycler::new(data.val_y.len(), rng::stream(cfg.seed, "batches/val"));
    let mut action_rng = rng::stream(cfg.seed, "actions");
    let mut aug = Augmenter {
        enabled: cfg.augment,
        cfg: cfg.augment_config,
        rng: rng::stream(cfg.seed, "augment/labeled"),
    };
    let mut aug_unlabeled = Augmenter {
        enabled: cfg.augment,
        cfg: cfg.augment_config,
        rng: rng::stream(cfg.seed, "augment/unlabeled"),
    };

    let mut labeled_batch = |aug: &mut Augmenter| -> Result<Batch> {
        let idx = labeled_batches.next_batch(cfg.batch_labeled);
        Batch::new(
            aug.rows(data.labeled, &data.labeled_x, &idx)?,
            idx.iter().map(|&i| data.labeled_y[i]).collect(),
        )
    };

    let no_pseudo = Batch::empty(n_features);
    for _ in 0..cfg.warmup_steps {
        let batch = labeled_batch(&mut aug)?;
        classifier_step(&mut classifier, &batch, &no_pseudo, &mut opt, 0.0)?;
    }

    let mut policy = match (source, cfg.policy_init) {
        (PseudoSource::Policy, PolicyInit::CloneClassifier) => Some(PolicyModel::new(classifier.clone())),
        (PseudoSource::Policy, PolicyInit::Random) => Some(PolicyModel::new(MlpModel::init(&dims, policy_seed)?)),
        _ => None,
    };
    let mut policy_opt = AdamW::new(cfg.policy_optimizer());
    let mut trajectory = Trajectory::new(cfg.beta);

    let steps_per_epoch = data.labeled.len().div_ceil(cfg.batch_labeled);
    let mut history = History::default();
    let mut selections = Vec::new();
    let mut step = 0;

    for epoch in 0..cfg.epochs {
        // self-training pool for this epoch
        let mut pool: Vec<(usize, usize)> = Vec::new();
        if let PseudoSource::Confidence(threshold) = source {
            if !data.unlabeled.is_empty() {
                let probs = softmax_rows(&classifier.logits(&data.unlabeled_x)?);
                for (i, row) in probs.iter_rows().enumerate() {
                    let (arg, &p) = row
                        .iter()
                        .enumerate()
                        .fold((0, &row[0]), |best, (k, v)| if *v > *best.1 { (k, v) } else { best });
                    if p >= threshold {
                        pool.push((i, arg));
                    }
                }
            }
            selections.push(PseudoSelection { epoch, picks: pool.clone() });
        }
        let mut pool_batches = BatchCycler::new(
            pool.len(),
            rng::stream(cfg.seed ^ epoch as u64, "batches/pool"),
        );
        let mut pseudo_count = 0;

        for _ in 0..steps_per_epoch {
            let labeled = labeled_batch(&mut aug)?;
            let val_idx = val_batches.next_batch(cfg.batch_val);
            let val = Batch::new(
                data.val_x.select_rows(&val_idx),
                val_idx.iter().map(|&i| data.val_y[i]).collect(),
            )?;
            let loss_before = eval_loss(&classifier, &val)?;

            let mut pending = None;
            let pseudo = match source {
                PseudoSource::None => no_pseudo.clone(),
                PseudoSource::Policy => {
                    let idx = unlabeled_batches.next_batch(cfg.batch_unlabeled);
                    let states = aug_unlabeled.rows(data.unlabeled, &data.unlabeled_x, &idx)?;
                    let (actions, log_probs) = if idx.is_empty() {
                        (Vec::new(), Vec::new())
                    } else {
                        let p = policy.as_ref().expect("policy exists in policy mode");
                        sample_pseudo_labels(p, &states, &mut action_rng)?
                    };
                    let batch = Batch::new(states.clone(), actions.clone())?;
                    pending = Some((states, actions, log_probs));
                    batch
                }
                PseudoSource::Confidence(_) => {
                    let picks = pool_batches.next_batch(cfg.batch_unlabeled);
                    let idx: Vec<usize> = picks.iter().map(|&k| pool[k].0).collect();
                    Batch::new(
                        aug_unlabeled.rows(data.unlabeled, &data.unlabeled_x, &idx)?,
                        picks.iter().map(|&k| pool[k].1).collect(),
                    )?
                }
            };
            pseudo_count += pseudo.len();

            classifier_step(&mut classifier, &labeled, &pseudo, &mut opt, cfg.pseudo_loss_weight)?;
            let loss_after = eval_loss(&classifier, &val)?;
            let reward = compute_reward(loss_before, loss_after)?;

            let mut updated = false;
            if let (Some(p), Some((states, actions, log_probs))) = (policy.as_mut(), pending) {
                trajectory.push(TrajectoryStep {
                    states,
                    actions,
                    log_probs,
                    reward,
                })?;
                if trajectory.is_full() {
                    policy_update(p, &mut trajectory, cfg.gamma, &mut policy_opt)?;
                    updated = true;
                }
            }
            history.steps.push(StepRecord {
                step,
                epoch,
                loss_val_before: loss_before,
                loss_val_after: loss_after,
                reward,
                policy_update: updated,
            });
            step += 1;
        }
        history.epochs.push(EpochRecord {
            epoch,
            test: evaluate(&classifier, splits.test())?,
            pseudo_count,
        });
    }

    let test_metrics = evaluate(&classifier, splits.test())?;
    Ok(TrainOutput {
        classifier,
        policy,
        history,
        test_metrics,
        selections,
    })
}
