use rand::seq::SliceRandom;

use super::EngineConfig;
use crate::data::{features_matrix, labels_of, Sample};
use crate::error::{ensure, Error, Result};
use crate::metrics::MetricsReport;
use crate::nn::{softmax_cross_entropy, AdamW, Matrix, MlpGrads, MlpModel};
use crate::rng::{self, Rng};

/// Features with one class index per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub features: Matrix,
    pub labels: Vec<usize>,
}

impl Batch {
    pub fn new(features: Matrix, labels: Vec<usize>) -> Result<Self> {
        ensure!(
            features.rows() == labels.len(),
            "{} rows but {} labels",
            features.rows(),
            labels.len()
        );
        Ok(Batch { features, labels })
    }

    pub fn empty(n_features: usize) -> Self {
        Batch {
            features: Matrix::zeros(0, n_features),
            labels: Vec::new(),
        }
    }

    pub fn from_samples(samples: &[Sample]) -> Result<Self> {
        Batch::new(features_matrix(samples)?, labels_of(samples)?)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Endless shuffled passes over `0..n`. Each pass is a fresh permutation and
/// batches never straddle two passes, so the last batch of a pass may be short.
#[derive(Clone, Debug)]
pub struct BatchCycler {
    order: Vec<usize>,
    cursor: usize,
    rng: Rng,
}

impl BatchCycler {
    pub fn new(n: usize, rng: Rng) -> Self {
        BatchCycler {
            order: (0..n).collect(),
            cursor: n,
            rng,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn next_batch(&mut self, size: usize) -> Vec<usize> {
        if self.order.is_empty() || size == 0 {
            return Vec::new();
        }
        if self.cursor >= self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let end = (self.cursor + size).min(self.order.len());
        let out = self.order[self.cursor..end].to_vec();
        self.cursor = end;
        out
    }
}

/// Mean cross-entropy of `classifier` on `batch`.
pub fn eval_loss(classifier: &MlpModel, batch: &Batch) -> Result<f64> {
    ensure!(!batch.is_empty(), "loss of an empty batch");
    let logits = classifier.logits(&batch.features)?;
    Ok(softmax_cross_entropy(&logits, &batch.labels)?.0)
}

/// Validation loss on labeled samples.
pub fn eval_val_loss(classifier: &MlpModel, val: &[Sample]) -> Result<f64> {
    ensure!(!val.is_empty(), "validation batch is empty");
    if let Some(s) = val.iter().find(|s| s.label.is_none()) {
        return Err(Error::invalid(format!(
            "validation sample {} is unlabeled",
            s.id
        )));
    }
    eval_loss(classifier, &Batch::from_samples(val)?)
}

fn ce_gradients(model: &MlpModel, batch: &Batch) -> Result<(f64, MlpGrads)> {
    let (logits, cache) = model.forward(&batch.features)?;
    let (loss, grad) = softmax_cross_entropy(&logits, &batch.labels)?;
    Ok((loss, model.backward(&cache, &grad)?))
}

/// Loss `CE(labeled) + weight · CE(pseudo)` and its gradient. An empty part
/// contributes nothing.
pub fn classifier_gradients(
    classifier: &MlpModel,
    labeled: &Batch,
    pseudo: &Batch,
    pseudo_weight: f64,
) -> Result<(f64, MlpGrads)> {
    ensure!(
        !(labeled.is_empty() && pseudo.is_empty()),
        "classifier step needs at least one sample"
    );
    let (mut loss, mut grads) = if labeled.is_empty() {
        (0.0, MlpGrads::zeros_like(classifier))
    } else {
        ce_gradients(classifier, labeled)?
    };
    if !pseudo.is_empty() {
        let (pl, pg) = ce_gradients(classifier, pseudo)?;
        loss += pseudo_weight * pl;
        grads.add_scaled(&pg, pseudo_weight)?;
    }
    Ok((loss, grads))
}

/// One optimizer step on the combined labeled + pseudo-labeled loss.
pub fn classifier_step(
    classifier: &mut MlpModel,
    labeled: &Batch,
    pseudo: &Batch,
    optimizer: &mut AdamW,
    pseudo_weight: f64,
) -> Result<f64> {
    let (loss, grads) = classifier_gradients(classifier, labeled, pseudo, pseudo_weight)?;
    optimizer.step(classifier, &grads)?;
    Ok(loss)
}

/// Supervised-only mini-batch steps on `labeled`, with a fresh optimizer and
/// the same labeled batch stream the training loop uses.
pub fn warmup_supervised(
    classifier: &mut MlpModel,
    labeled: &[Sample],
    cfg: &EngineConfig,
) -> Result<()> {
    ensure!(!labeled.is_empty(), "warmup needs labeled samples");
    let data = Batch::from_samples(labeled)?;
    let mut cycler = BatchCycler::new(labeled.len(), rng::stream(cfg.seed, "batches/labeled"));
    let mut opt = AdamW::new(cfg.classifier_optimizer());
    let empty = Batch::empty(data.features.cols());
    for _ in 0..cfg.warmup_steps {
        let idx = cycler.next_batch(cfg.batch_labeled);
        let batch = Batch::new(
            data.features.select_rows(&idx),
            idx.iter().map(|&i| data.labels[i]).collect(),
        )?;
        classifier_step(classifier, &batch, &empty, &mut opt, 0.0)?;
    }
    Ok(())
}

/// Binary metrics with class 1 as positive.
pub fn evaluate(classifier: &MlpModel, samples: &[Sample]) -> Result<MetricsReport> {
    let batch = Batch::from_samples(samples)?;
    let logits = classifier.logits(&batch.features)?;
    MetricsReport::from_logits(&logits, &batch.labels, 1)
}
