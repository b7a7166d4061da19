use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use pseudosup_bench::{classifier, desk_splits, input_batch, label_batch, scores_and_labels};
use pseudosup_core::metrics::auc_roc;
use pseudosup_core::nn::{softmax_cross_entropy, AdamW, AdamWConfig};
use pseudosup_core::ssl::{classifier_step, train};
use pseudosup_core::EngineConfig;

fn mlp(c: &mut Criterion) {
    let model = classifier(20);
    let x = input_batch(64, 20);
    let labels: Vec<usize> = (0..64).map(|i| i % 2).collect();
    c.bench_function("mlp_forward_64x20", |b| b.iter(|| model.logits(black_box(&x)).unwrap()));
    c.bench_function("mlp_forward_backward_64x20", |b| {
        b.iter(|| {
            let (logits, cache) = model.forward(black_box(&x)).unwrap();
            let (_, g) = softmax_cross_entropy(&logits, &labels).unwrap();
            model.backward(&cache, &g).unwrap()
        })
    });
}

fn auc(c: &mut Criterion) {
    let (scores, labels) = scores_and_labels(10_000);
    c.bench_function("auc_10k_with_ties", |b| b.iter(|| auc_roc(black_box(&scores), &labels).unwrap()));
}

fn training(c: &mut Criterion) {
    let labeled = label_batch(32, 20);
    let pseudo = label_batch(32, 20);
    c.bench_function("classifier_step_32+32", |b| {
        b.iter_batched(
            || (classifier(20), AdamW::new(AdamWConfig::new(1e-3, 0.0))),
            |(mut model, mut opt)| classifier_step(&mut model, &labeled, &pseudo, &mut opt, 1.0).unwrap(),
            BatchSize::SmallInput,
        )
    });

    let splits = desk_splits(500, 20);
    let cfg = EngineConfig {
        classifier_lr: 1e-3,
        epochs: 2,
        ..EngineConfig::default()
    };
    let mut group = c.benchmark_group("engine");
    group.sample_size(10);
    group.bench_function("train_500x2_2_epochs", |b| b.iter(|| train(black_box(&splits), &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, mlp, auc, training);
criterion_main!(benches);
