mod common;

use common::{finite_difference, max_relative_error};
use proptest::prelude::*;
use pseudosup_core::data::*;
use pseudosup_core::nn::{log_softmax_rows, AdamW, AdamWConfig, Matrix, MlpModel};
use pseudosup_core::rng;
use pseudosup_core::ssl::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(separation: f64, dim: usize, n_per_class: usize, seed: u64) -> DatasetSplits {
    let s = generate_overlapping_gaussians(n_per_class, dim, separation, seed).unwrap();
    split_dataset(&s, 0.25, SplitFractions::new(0.5, 0.1, 0.4), seed).unwrap()
}

fn small_cfg(seed: u64) -> EngineConfig {
    EngineConfig {
        classifier_lr: 1e-3,
        epochs: 3,
        warmup_steps: 20,
        beta: 7,
        hidden_dims: vec![16, 8],
        seed,
        ..Default::default()
    }
}

fn single_step(policy: &PolicyModel, states: Matrix, reward: f64, rng: &mut rng::Rng) -> TrajectoryStep {
    let (actions, log_probs) = sample_pseudo_labels(policy, &states, rng).unwrap();
    TrajectoryStep { states, actions, log_probs, reward }
}

#[test]
fn sampled_log_probs_match_log_softmax() {
    let policy = PolicyModel::new(MlpModel::init(&[3, 6, 2], 8).unwrap());
    let mut r = ChaCha8Rng::seed_from_u64(0);
    let states = Matrix::new(50, 3, (0..150).map(|_| r.random_range(-3.0..3.0)).collect()).unwrap();
    let (actions, lp) = sample_pseudo_labels(&policy, &states, &mut rng::seeded(3)).unwrap();
    let logits = policy.model().logits(&states).unwrap();
    for (i, (&a, &l)) in actions.iter().zip(&lp).enumerate() {
        let row = logits.row(i);
        let lse = row.iter().map(|v| v.exp()).sum::<f64>().ln();
        assert!((l - (row[a] - lse)).abs() < 1e-12);
    }
}

#[test]
fn single_positive_step_raises_taken_action_probability() {
    let mut seeds = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..100 {
        let dims = [4, 8, 2];
        let mut policy = PolicyModel::new(MlpModel::init(&dims, seeds.random()).unwrap());
        let state = Matrix::new(1, 4, (0..4).map(|_| seeds.random_range(-1.0..1.0)).collect()).unwrap();
        let mut sampler = rng::seeded(seeds.random());
        let step = single_step(&policy, state.clone(), 1.0, &mut sampler);
        let action = step.actions[0];
        let before = log_softmax_rows(&policy.model().logits(&state).unwrap()).get(0, action);
        let mut traj = Trajectory::new(1);
        traj.push(step).unwrap();
        let mut opt = AdamW::new(AdamWConfig::new(1e-3, 0.0));
        policy_update(&mut policy, &mut traj, 0.9, &mut opt).unwrap();
        let after = log_softmax_rows(&policy.model().logits(&state).unwrap()).get(0, action);
        assert!(after > before, "trial {trial}: {before} -> {after}");
    }
}

#[test]
fn surrogate_gradient_matches_finite_differences() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for case in 0..10 {
        let policy = PolicyModel::new(MlpModel::init(&[3, 5, 2], r.random()).unwrap());
        let mut sampler = rng::seeded(case);
        let mut traj = Trajectory::new(6);
        for _ in 0..6 {
            let b = r.random_range(1..5);
            let states = Matrix::new(b, 3, (0..3 * b).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
            let reward = if r.random::<f64>() < 0.3 { 0.0 } else { r.random_range(0.0..2.0) };
            traj.push(single_step(&policy, states, reward, &mut sampler)).unwrap();
        }
        let gamma = r.random_range(0.0..=1.0);
        let (value, grads) = surrogate_gradient(&policy, &traj, gamma).unwrap();
        assert!((value - surrogate_objective(&policy, &traj, gamma).unwrap()).abs() < 1e-12);
        let numeric = finite_difference(policy.model(), 1e-5, |m| {
            surrogate_objective(&PolicyModel::new(m.clone()), &traj, gamma).unwrap()
        });
        let err = max_relative_error(&grads.flat(), &numeric);
        assert!(err < 1e-4, "case {case}: {err}");
    }
}

/// Action 0 always pays 1, action 1 pays nothing; the classifier is not involved.
fn bandit_probability_after(seed: u64, updates: usize) -> f64 {
    let mut policy = PolicyModel::new(MlpModel::init(&[4, 8, 2], seed).unwrap());
    let state = Matrix::from_rows(&[[0.5, -0.25, 1.0, 0.0]]).unwrap();
    let mut opt = AdamW::new(AdamWConfig::new(1e-2, 0.0));
    let mut sampler = rng::stream(seed, "bandit");
    let mut traj = Trajectory::new(1);
    for _ in 0..updates {
        let (actions, log_probs) = sample_pseudo_labels(&policy, &state, &mut sampler).unwrap();
        let reward = if actions[0] == 0 { 1.0 } else { 0.0 };
        traj.push(TrajectoryStep { states: state.clone(), actions, log_probs, reward }).unwrap();
        policy_update(&mut policy, &mut traj, 0.9, &mut opt).unwrap();
    }
    policy.log_probs(&state).unwrap().get(0, 0).exp()
}

#[test]
fn bandit_converges_to_paying_action() {
    for seed in 1..=5 {
        let p = bandit_probability_after(seed, 5000);
        assert!(p > 0.99, "seed {seed}: P(action 0) = {p}");
    }
}

#[test]
fn classifier_gradient_is_linear_in_parts() {
    let model = MlpModel::init(&[3, 6, 2], 12).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let mut batch = |n: usize| {
        let x = Matrix::new(n, 3, (0..3 * n).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
        let y = (0..n).map(|_| r.random_range(0..2)).collect();
        Batch::new(x, y).unwrap()
    };
    let (labeled, pseudo) = (batch(5), batch(4));
    let empty = Batch::empty(3);
    let w = 0.7;
    let (_, combined) = classifier_gradients(&model, &labeled, &pseudo, w).unwrap();
    let (_, gl) = classifier_gradients(&model, &labeled, &empty, w).unwrap();
    let (_, gp) = classifier_gradients(&model, &empty, &pseudo, 1.0).unwrap();
    for ((c, a), b) in combined.flat().iter().zip(gl.flat()).zip(gp.flat()) {
        assert!((c - (a + w * b)).abs() < 1e-12);
    }

    let mut frozen = model.clone();
    let mut opt = AdamW::new(AdamWConfig::new(0.0, 0.0));
    classifier_step(&mut frozen, &labeled, &pseudo, &mut opt, 1.0).unwrap();
    assert_eq!(frozen, model);
}

#[test]
fn validation_loss_does_not_touch_parameters() {
    let sp = blobs(1.0, 4, 40, 0);
    let model = MlpModel::init(&[4, 8, 2], 0).unwrap();
    let before: Vec<u64> = model.flat_params().iter().map(|v| v.to_bits()).collect();
    let l = eval_val_loss(&model, sp.validation()).unwrap();
    let after: Vec<u64> = model.flat_params().iter().map(|v| v.to_bits()).collect();
    assert_eq!(before, after);
    let batch = Batch::from_samples(sp.validation()).unwrap();
    let logits = model.logits(&batch.features).unwrap();
    let direct = -logits
        .iter_rows()
        .zip(&batch.labels)
        .map(|(r, &y)| (r[y].exp() / r.iter().map(|v| v.exp()).sum::<f64>()).ln())
        .sum::<f64>()
        / batch.len() as f64;
    assert!((l - direct).abs() < 1e-12);
}

#[test]
fn warmup_fits_separable_blobs() {
    let sp = blobs(6.0, 2, 200, 3);
    let cfg = EngineConfig { classifier_lr: 1e-2, warmup_steps: 200, hidden_dims: vec![8], seed: 3, ..Default::default() };
    let mut m = MlpModel::init(&cfg.layer_dims(2), 3).unwrap();
    warmup_supervised(&mut m, sp.labeled_train(), &cfg).unwrap();
    let acc = evaluate(&m, sp.labeled_train()).unwrap().accuracy;
    assert!(acc > 0.95, "train accuracy {acc}");
    let mut again = MlpModel::init(&cfg.layer_dims(2), 3).unwrap();
    warmup_supervised(&mut again, sp.labeled_train(), &cfg).unwrap();
    assert_eq!(again, m);
}

#[test]
fn zero_epochs_returns_warm_classifier() {
    let sp = blobs(1.0, 3, 50, 1);
    let cfg = EngineConfig { epochs: 0, ..small_cfg(1) };
    let out = train(&sp, &cfg).unwrap();
    assert!(out.history.is_empty());
    let sup = train_supervised_only(&sp, &cfg).unwrap();
    assert_eq!(out.classifier, sup.classifier);
}

#[test]
fn policy_update_count_is_floor_of_steps_over_beta() {
    let sp = blobs(1.0, 3, 60, 2);
    for beta in [1, 4, 7, 50] {
        let cfg = EngineConfig { beta, ..small_cfg(2) };
        let out = train(&sp, &cfg).unwrap();
        let total = out.history.steps.len();
        assert_eq!(out.history.policy_updates(), total / beta, "beta {beta}");
        for s in &out.history.steps {
            assert!(s.reward >= 0.0);
            if s.loss_val_after >= s.loss_val_before {
                assert_eq!(s.reward, 0.0);
            }
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let sp = blobs(1.0, 5, 60, 4);
    let cfg = small_cfg(4);
    let a = train(&sp, &cfg).unwrap();
    let b = train(&sp, &cfg).unwrap();
    assert_eq!(a.history.to_csv(), b.history.to_csv());
    assert_eq!(a.classifier, b.classifier);
    assert_eq!(a.policy, b.policy);
    let c = train(&sp, &EngineConfig { seed: 5, ..cfg }).unwrap();
    assert_ne!(a.history.to_csv(), c.history.to_csv());
}

fn assert_same_metrics(a: &TrainOutput, b: &TrainOutput) {
    let (x, y) = (a.test_metrics, b.test_metrics);
    assert!((x.accuracy - y.accuracy).abs() <= 1e-12);
    assert!((x.f1 - y.f1).abs() <= 1e-12);
    assert!((x.auc - y.auc).abs() <= 1e-12);
}

#[test]
fn degenerate_pseudo_paths_equal_supervised() {
    for seed in 0..3 {
        let sp = blobs(1.0, 5, 80, seed);
        let cfg = small_cfg(seed);
        let sup = train_supervised_only(&sp, &cfg).unwrap();

        let no_unlabeled = train(&sp.without_unlabeled(), &cfg).unwrap();
        assert_same_metrics(&no_unlabeled, &sup);
        assert_eq!(no_unlabeled.classifier, sup.classifier);

        let zero_weight = train(&sp, &EngineConfig { pseudo_loss_weight: 0.0, ..cfg.clone() }).unwrap();
        assert_same_metrics(&zero_weight, &sup);
        assert_eq!(zero_weight.classifier, sup.classifier);

        let strict = train_self_training(&sp, &cfg, 1.0).unwrap();
        assert!(strict.selections.iter().all(|s| s.picks.is_empty()));
        assert_same_metrics(&strict, &sup);
    }
}

#[test]
fn supervised_baseline_sanity() {
    let sp = blobs(6.0, 2, 200, 9);
    let cfg = EngineConfig { classifier_lr: 1e-2, ..small_cfg(9) };
    assert!(train_supervised_only(&sp, &cfg).unwrap().test_metrics.auc > 0.95);

    for seed in 1..=5 {
        let sp = blobs(0.0, 5, 1500, seed);
        let auc = train_supervised_only(&sp, &small_cfg(seed)).unwrap().test_metrics.auc;
        assert!((0.45..=0.55).contains(&auc), "seed {seed}: AUC {auc}");
    }
}

#[test]
fn self_training_threshold_and_pseudo_accuracy() {
    let sp = blobs(6.0, 2, 200, 11);
    let cfg = EngineConfig { classifier_lr: 1e-2, ..small_cfg(11) };
    for bad in [0.5, 0.3, 1.0 + 1e-9] {
        assert!(train_self_training(&sp, &cfg, bad).is_err());
    }
    let out = train_self_training(&sp, &cfg, 0.9).unwrap();
    let hidden = sp.hidden_labels();
    let (mut right, mut total) = (0, 0);
    for sel in &out.selections {
        for &(i, label) in &sel.picks {
            total += 1;
            right += usize::from(hidden[i] == Some(label));
        }
    }
    assert!(total > 0);
    let acc = right as f64 / total as f64;
    assert!(acc > 0.95, "pseudo-label accuracy {acc}");
}

#[test]
fn augmented_pseudo_supervisor_runs_on_grids() {
    let s = generate_grid_gaussians(60, 4, 4, 1.5, 0).unwrap();
    let sp = split_dataset(&s, 0.3, SplitFractions::default(), 0).unwrap();
    let cfg = EngineConfig { augment: true, ..small_cfg(0) };
    let a = train(&sp, &cfg).unwrap();
    let b = train(&sp, &cfg).unwrap();
    assert_eq!(a.history, b.history);
    let plain = train(&sp, &EngineConfig { augment: false, ..cfg.clone() }).unwrap();
    assert_ne!(a.classifier, plain.classifier);
    let flat = blobs(1.0, 3, 30, 0);
    assert!(train(&flat, &cfg).is_err());
}

fn naive_return(rewards: &[f64], gamma: f64, t: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..rewards.len() - t {
        total += gamma.powi(k as i32) * rewards[t + k];
    }
    total
}

#[test]
fn returns_match_naive_sum() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let n = r.random_range(1..60);
        let rewards: Vec<f64> = (0..n).map(|_| r.random_range(0.0..3.0)).collect();
        let gamma = match i % 4 {
            0 => 0.0,
            1 => 1.0,
            _ => r.random_range(0.0..=1.0),
        };
        let t = r.random_range(0..n);
        let naive = naive_return(&rewards, gamma, t);
        assert!((discounted_return(&rewards, gamma, t).unwrap() - naive).abs() < 1e-12);
        assert!((returns_to_go(&rewards, gamma)[t] - naive).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn reward_law(before in 0.0f64..20.0, after in 0.0f64..20.0) {
        let r = compute_reward(before, after).unwrap();
        prop_assert!(r >= 0.0);
        if after >= before {
            prop_assert_eq!(r, 0.0);
        } else {
            prop_assert!((r - ((before - after).exp() - 1.0)).abs() <= 1e-15);
        }
    }

    #[test]
    fn reward_increases_with_improvement(base in 0.0f64..5.0, d1 in 1e-6f64..2.0, d2 in 1e-6f64..2.0) {
        prop_assume!((d1 - d2).abs() > 1e-9);
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let r_lo = compute_reward(base + lo, base).unwrap();
        let r_hi = compute_reward(base + hi, base).unwrap();
        prop_assert!(r_hi > r_lo);
    }
}
