use crate::error::{ensure, Result};

/// `max(exp(loss_before − loss_after) − 1, 0)`.
pub fn compute_reward(loss_before: f64, loss_after: f64) -> Result<f64> {
    ensure!(
        loss_before.is_finite() && loss_after.is_finite(),
        "losses must be finite, got {} and {}",
        loss_before,
        loss_after
    );
    ensure!(
        loss_before >= 0.0 && loss_after >= 0.0,
        "losses must be non-negative, got {} and {}",
        loss_before,
        loss_after
    );
    Ok(((loss_before - loss_after).exp() - 1.0).max(0.0))
}

/// `Σ_{k=0}^{T−1−t} γ^k · rewards[t+k]`.
pub fn discounted_return(rewards: &[f64], gamma: f64, t: usize) -> Result<f64> {
    ensure!(
        t < rewards.len(),
        "index {} out of range for {} rewards",
        t,
        rewards.len()
    );
    ensure!((0.0..=1.0).contains(&gamma), "gamma must be in [0, 1], got {}", gamma);
    let mut total = 0.0;
    let mut weight = 1.0;
    for r in &rewards[t..] {
        total += weight * r;
        weight *= gamma;
    }
    Ok(total)
}

/// Returns-to-go for every step, by backward recursion `G_t = r_t + γ G_{t+1}`.
pub fn returns_to_go(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (g, r) in out.iter_mut().zip(rewards).rev() {
        acc = r + gamma * acc;
        *g = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reward_cases() {
        assert_eq!(compute_reward(0.7, 0.7).unwrap(), 0.0);
        assert_eq!(compute_reward(0.5, 0.9).unwrap(), 0.0);
        let r = compute_reward(1.0 + std::f64::consts::LN_2, 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        assert!(compute_reward(f64::NAN, 1.0).is_err());
        assert!(compute_reward(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn return_cases() {
        let r = [1.0, 1.0, 1.0];
        assert!((discounted_return(&r, 0.9, 0).unwrap() - 2.71).abs() < 1e-15);
        assert_eq!(discounted_return(&[3.0, 5.0], 0.0, 0).unwrap(), 3.0);
        assert_eq!(discounted_return(&[3.0, 5.0], 1.0, 0).unwrap(), 8.0);
        assert!(discounted_return(&r, 0.9, 3).is_err());
        assert!(discounted_return(&r, 1.5, 0).is_err());
        let g = returns_to_go(&r, 0.9);
        assert!((g[0] - 2.71).abs() < 1e-15 && (g[1] - 1.9).abs() < 1e-15 && g[2] == 1.0);
    }
}
