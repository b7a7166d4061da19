use rand::Rng as _;

use super::reward::returns_to_go;
use crate::error::{ensure, Result};
use crate::nn::{log_softmax_rows, AdamW, Matrix, MlpGrads, MlpModel};
use crate::rng::Rng;

/// The pseudo supervisor: an MLP whose softmax is the distribution over
/// pseudo labels for each unlabeled sample.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyModel(pub MlpModel);

impl PolicyModel {
    pub fn new(model: MlpModel) -> Self {
        PolicyModel(model)
    }

    pub fn model(&self) -> &MlpModel {
        &self.0
    }

    pub fn model_mut(&mut self) -> &mut MlpModel {
        &mut self.0
    }

    pub fn into_inner(self) -> MlpModel {
        self.0
    }

    /// Row-wise action log-probabilities.
    pub fn log_probs(&self, states: &Matrix) -> Result<Matrix> {
        Ok(log_softmax_rows(&self.0.logits(states)?))
    }
}

/// Draws one pseudo label per row of `states` and returns it with its log-probability.
pub fn sample_pseudo_labels(
    policy: &PolicyModel,
    states: &Matrix,
    rng: &mut Rng,
) -> Result<(Vec<usize>, Vec<f64>)> {
    ensure!(states.rows() > 0, "cannot sample pseudo labels for an empty batch");
    let logp = policy.log_probs(states)?;
    let mut actions = Vec::with_capacity(states.rows());
    let mut log_probs = Vec::with_capacity(states.rows());
    for row in logp.iter_rows() {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        // falls back to the last class if rounding leaves u above the total mass
        let mut action = row.len() - 1;
        for (k, lp) in row.iter().enumerate() {
            acc += lp.exp();
            if u < acc {
                action = k;
                break;
            }
        }
        actions.push(action);
        log_probs.push(row[action]);
    }
    Ok((actions, log_probs))
}

/// One training step as seen by the policy: states `s_t`, sampled actions
/// `a_t`, their log-probabilities at sampling time, and the shared reward `r_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStep {
    pub states: Matrix,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub reward: f64,
}

/// Buffer of at most `capacity` steps between policy updates.
#[derive(Clone, Debug)]
pub struct Trajectory {
    steps: Vec<TrajectoryStep>,
    capacity: usize,
}

impl Trajectory {
    pub fn new(capacity: usize) -> Self {
        Trajectory {
            steps: Vec::with_capacity(capacity),
            capacity: capacity.max(1),
        }
    }

    pub fn push(&mut self, step: TrajectoryStep) -> Result<()> {
        ensure!(!self.is_full(), "trajectory already holds {} steps", self.capacity);
        ensure!(
            step.actions.len() == step.states.rows() && step.log_probs.len() == step.actions.len(),
            "trajectory step has {} states, {} actions and {} log-probabilities",
            step.states.rows(),
            step.actions.len(),
            step.log_probs.len()
        );
        ensure!(
            step.reward.is_finite() && step.reward >= 0.0,
            "reward must be finite and non-negative, got {}",
            step.reward
        );
        ensure!(
            step.log_probs.iter().all(|&lp| lp <= 0.0),
            "log-probabilities must be non-positive"
        );
        self.steps.push(step);
        Ok(())
    }

    pub fn steps(&self) -> &[TrajectoryStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.steps.len() >= self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }

    pub fn clear(&mut self) {
        self.steps.clear();
    }
}

/// `Σ_t G_t · mean_i log π(a_{t,i} | s_{t,i})` under the current policy.
pub fn surrogate_objective(policy: &PolicyModel, trajectory: &Trajectory, gamma: f64) -> Result<f64> {
    let returns = returns_to_go(&trajectory.rewards(), gamma);
    let mut total = 0.0;
    for (step, g) in trajectory.steps().iter().zip(returns) {
        if step.actions.is_empty() {
            continue;
        }
        let logp = policy.log_probs(&step.states)?;
        let mean: f64 = step
            .actions
            .iter()
            .enumerate()
            .map(|(i, &a)| logp.get(i, a))
            .sum::<f64>()
            / step.actions.len() as f64;
        total += g * mean;
    }
    Ok(total)
}

/// Value and gradient (for ascent) of [`surrogate_objective`].
pub fn surrogate_gradient(
    policy: &PolicyModel,
    trajectory: &Trajectory,
    gamma: f64,
) -> Result<(f64, MlpGrads)> {
    let model = policy.model();
    let returns = returns_to_go(&trajectory.rewards(), gamma);
    let mut grads = MlpGrads::zeros_like(model);
    let mut total = 0.0;
    for (step, g) in trajectory.steps().iter().zip(returns) {
        if step.actions.is_empty() || g == 0.0 {
            continue;
        }
        let (logits, cache) = model.forward(&step.states)?;
        let logp = log_softmax_rows(&logits);
        let scale = g / step.actions.len() as f64;
        // d log softmax(z)[a] / dz = onehot(a) − softmax(z)
        let mut upstream = Matrix::zeros(logits.rows(), logits.cols());
        for (i, &a) in step.actions.iter().enumerate() {
            ensure!(a < logits.cols(), "action {} out of range", a);
            total += scale * logp.get(i, a);
            let row = upstream.row_mut(i);
            for (k, v) in row.iter_mut().enumerate() {
                *v = -scale * logp.get(i, k).exp();
            }
            row[a] += scale;
        }
        grads.add_scaled(&model.backward(&cache, &upstream)?, 1.0)?;
    }
    Ok((total, grads))
}

/// Outcome of one [`policy_update`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyUpdate {
    pub steps: usize,
    pub objective: f64,
    /// False when the surrogate gradient vanished and the optimizer was not stepped.
    pub applied: bool,
}

/// One gradient-ascent step on the surrogate objective; clears the trajectory.
///
/// A vanishing gradient (e.g. all rewards zero) leaves the policy and the
/// optimizer state untouched.
pub fn policy_update(
    policy: &mut PolicyModel,
    trajectory: &mut Trajectory,
    gamma: f64,
    optimizer: &mut AdamW,
) -> Result<PolicyUpdate> {
    ensure!(!trajectory.is_empty(), "policy update needs a non-empty trajectory");
    ensure!((0.0..=1.0).contains(&gamma), "gamma must be in [0, 1], got {}", gamma);
    let (objective, mut grads) = surrogate_gradient(policy, trajectory, gamma)?;
    let applied = !grads.is_zero();
    if applied {
        // the optimizer descends, so hand it the negated ascent direction
        grads.scale(-1.0);
        optimizer.step(policy.model_mut(), &grads)?;
    }
    let steps = trajectory.len();
    trajectory.clear();
    Ok(PolicyUpdate {
        steps,
        objective,
        applied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{AdamWConfig, MlpModel};
    use crate::rng;

    fn forced_policy(bias: [f64; 2]) -> PolicyModel {
        let w = Matrix::zeros(1, 2);
        PolicyModel::new(MlpModel::from_parts(vec![w], vec![bias.to_vec()]).unwrap())
    }

    #[test]
    fn near_deterministic_policy() {
        let p = forced_policy([20.0, -20.0]);
        let states = Matrix::zeros(10_000, 1);
        let (a, lp) = sample_pseudo_labels(&p, &states, &mut rng::seeded(0)).unwrap();
        let zeros = a.iter().filter(|&&x| x == 0).count();
        assert!(zeros as f64 / 10_000.0 > 0.999);
        assert!(lp.iter().all(|&v| v <= 0.0));
    }

    #[test]
    fn fair_coin_policy() {
        let p = forced_policy([0.0, 0.0]);
        let states = Matrix::zeros(10_000, 1);
        let (a, lp) = sample_pseudo_labels(&p, &states, &mut rng::seeded(1)).unwrap();
        let freq = a.iter().filter(|&&x| x == 0).count() as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
        assert!(lp.iter().all(|&v| (v + std::f64::consts::LN_2).abs() < 1e-15));
    }

    #[test]
    fn zero_rewards_leave_policy_alone() {
        let mut p = PolicyModel::new(MlpModel::init(&[3, 4, 2], 2).unwrap());
        let before = p.clone();
        let states = Matrix::from_rows(&[[0.1, 0.2, 0.3], [1.0, -1.0, 0.0]]).unwrap();
        let (actions, log_probs) = sample_pseudo_labels(&p, &states, &mut rng::seeded(0)).unwrap();
        let mut t = Trajectory::new(5);
        for _ in 0..3 {
            t.push(TrajectoryStep {
                states: states.clone(),
                actions: actions.clone(),
                log_probs: log_probs.clone(),
                reward: 0.0,
            })
            .unwrap();
        }
        let mut opt = AdamW::new(AdamWConfig::new(1e-2, 0.0));
        let u = policy_update(&mut p, &mut t, 0.9, &mut opt).unwrap();
        assert!(!u.applied);
        assert_eq!(p, before);
        assert!(t.is_empty());
        assert!(policy_update(&mut p, &mut t, 0.9, &mut opt).is_err());
    }

    #[test]
    fn trajectory_enforces_capacity_and_signs() {
        let mut t = Trajectory::new(1);
        let step = TrajectoryStep {
            states: Matrix::zeros(1, 1),
            actions: vec![0],
            log_probs: vec![-0.1],
            reward: 0.5,
        };
        t.push(step.clone()).unwrap();
        assert!(t.push(step.clone()).is_err());
        let mut t = Trajectory::new(3);
        assert!(t.push(TrajectoryStep { reward: -1.0, ..step.clone() }).is_err());
        assert!(t.push(TrajectoryStep { log_probs: vec![0.2], ..step }).is_err());
    }
}
