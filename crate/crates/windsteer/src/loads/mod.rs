//! Structural load modelling: analytic DEL ground truth, sliding feature
//! windows, a learned surrogate, and rainflow counting for verification.

mod oracle;
mod rainflow;
mod surrogate;
mod window;

pub use oracle::{DelFeatures, DelOracle};
pub use rainflow::{rainflow_cycles, rainflow_del, turning_points, Cycle};
pub use surrogate::{
    train_surrogate, SurrogateNet, SurrogateReport, SurrogateTrainConfig, MAGIC_DSUR,
};
pub use window::{delta_ratio, DelWindowState};

/// Surrogate DEL estimate from a turbine's current feature window, or `None`
/// while the window is still empty.
pub fn estimate_del(window: &DelWindowState, net: &SurrogateNet, turbine: usize) -> Option<f64> {
    window.features(turbine).map(|f| net.estimate(&f))
}
