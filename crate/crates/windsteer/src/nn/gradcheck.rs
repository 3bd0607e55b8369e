//! Finite-difference gradient verification.
//!
//! Central differences over the flat parameter vector give an oracle that is
//! independent of the backward pass: it only ever calls `forward`.

use super::Mlp;

/// Central-difference gradient of `loss` with respect to every parameter.
///
/// The network is restored to its original parameters before returning.
pub fn finite_diff_grad<F: Fn(&Mlp) -> f64>(loss: F, net: &mut Mlp, h: f64) -> Vec<f64> {
    let n = net.num_params();
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let orig = net.params()[i];
        net.params_mut()[i] = orig + h;
        let up = loss(net);
        net.params_mut()[i] = orig - h;
        let down = loss(net);
        net.params_mut()[i] = orig;
        grad[i] = (up - down) / (2.0 * h);
    }
    grad
}

/// Largest elementwise relative error between two gradient vectors,
/// `|a - b| / max(|a|, |b|, 1e-8)`.
pub fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "gradient lengths differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-8))
        .fold(0.0, f64::max)
}
