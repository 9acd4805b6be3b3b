//! Central finite-difference gradient oracle for the MLP.

use numeral_core::mlp::MlpModel;

pub const FD_STEP: f64 = 1e-5;

/// Numerical gradient of the halved sample SSE (the quantity the trainer
/// descends) with respect to every weight, W1 row-major then W2 row-major,
/// via central differences.
pub fn fd_gradients(model: &MlpModel, x: &[f64], targets: &[f64], h: f64) -> Vec<f64> {
    let mut probe = model.clone();
    let mut grads = Vec::with_capacity(model.param_count());
    for i in 0..model.param_count() {
        let w = probe.param(i);
        probe.set_param(i, w + h);
        let plus = 0.5 * probe.sample_sse(x, targets).expect("probe forward");
        probe.set_param(i, w - h);
        let minus = 0.5 * probe.sample_sse(x, targets).expect("probe forward");
        probe.set_param(i, w);
        grads.push((plus - minus) / (2.0 * h));
    }
    grads
}

/// Worst normalized disagreement between backpropagated and numerical
/// gradients: `|a - n| / max(|a|, |n|, 1e-4)`. The `1e-4` floor turns the
/// comparison absolute for elements below `1e-8`, where finite-difference
/// noise dominates. A correct implementation stays under `1e-4`.
pub fn max_gradient_mismatch(model: &MlpModel, x: &[f64], targets: &[f64]) -> f64 {
    let (g1, g2, _) = model.gradients(x, targets).expect("analytic gradients");
    let analytic: Vec<f64> = g1.as_slice().iter().chain(g2.as_slice()).copied().collect();
    let numeric = fd_gradients(model, x, targets, FD_STEP);
    analytic
        .iter()
        .zip(&numeric)
        .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-4))
        .fold(0.0, f64::max)
}
