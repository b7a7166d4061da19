#![allow(dead_code)]

use pseudosup_core::nn::MlpModel;

/// Central finite differences of `f` with respect to every parameter of `model`,
/// in canonical parameter order.
pub fn finite_difference<F>(model: &MlpModel, step: f64, mut f: F) -> Vec<f64>
where
    F: FnMut(&MlpModel) -> f64,
{
    let sizes: Vec<usize> = model.param_slices().iter().map(|s| s.len()).collect();
    let mut out = Vec::new();
    let mut probe = model.clone();
    for (slot, &len) in sizes.iter().enumerate() {
        for i in 0..len {
            let orig = probe.param_slices()[slot][i];
            probe.param_slices_mut()[slot][i] = orig + step;
            let up = f(&probe);
            probe.param_slices_mut()[slot][i] = orig - step;
            let down = f(&probe);
            probe.param_slices_mut()[slot][i] = orig;
            out.push((up - down) / (2.0 * step));
        }
    }
    out
}

/// `|a − b| / max(|a|, |b|, floor)`; the floor keeps entries that are zero up to
/// finite-difference noise from reading as large relative errors.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| relative_error(*x, *y))
        .fold(0.0, f64::max)
}

/// Standard normal CDF by composite Simpson quadrature of the density.
pub fn normal_cdf(x: f64) -> f64 {
    let n = 20_000;
    let a = -12.0;
    let h = (x - a) / n as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(a) + pdf(x);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(a + i as f64 * h);
    }
    s * h / 3.0
}
