//! Minimal dense-network toolkit: multilayer perceptrons with exact
//! reverse-mode gradients, an adaptive moment optimizer, a squashed-Gaussian
//! policy head, and finite-difference gradient verification.
//!
//! Everything is `f64` and allocation-light; networks store all parameters in
//! one flat buffer so the optimizer, polyak averaging, checkpointing, and
//! gradient checks all operate on plain slices.

mod adam;
mod checkpoint;
mod gradcheck;
mod mat;
mod mlp;
mod policy;

pub use adam::Adam;
pub use checkpoint::{load_network, save_network, MAGIC_MNET};
pub use gradcheck::{finite_diff_grad, max_rel_error};
pub use mat::Matrix;
pub use mlp::{Activation, Mlp, Tape};
pub use policy::{ActionSample, HeadGrad, SquashedGaussianHead};

/// Numerically stable `ln(1 + exp(x))`.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}
