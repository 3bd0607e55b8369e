//! DEL surrogate fidelity: trains the small network against the analytic
//! sector-based load model, reports held-out accuracy, and sweeps yaw at a
//! fixed inflow to show where the errors sit.
//!
//! Run with `cargo run --example surrogate_fidelity`.

use windsteer::config::Config;
use windsteer::loads::{train_surrogate, DelFeatures, DelOracle, SurrogateTrainConfig};

fn main() {
    let farm = Config::default().farm;
    let oracle = DelOracle::from_config(&farm);
    let cfg = SurrogateTrainConfig {
        n_samples: 4000,
        hidden: 32,
        max_epochs: 300,
        batch_size: 128,
        stop_frac_rmse: 0.02,
        required_frac_rmse: None,
        seed: 7,
        ..SurrogateTrainConfig::default()
    };
    println!(
        "training on {} Latin-hypercube samples (hidden width {}, up to {} epochs)...",
        cfg.n_samples, cfg.hidden, cfg.max_epochs
    );
    let (net, report) = train_surrogate(&oracle, &cfg).expect("training converges");
    println!(
        "held-out fractional RMSE {:.4} after {} epochs; audit max relative error {:.4}",
        report.held_out_frac_rmse, report.epochs_run, report.audit_max_rel_err
    );

    // Yaw sweep at a fixed, mildly sheared inflow: the oracle and the net
    // should agree to a few percent everywhere in range.
    let sweep_inflow = |yaw: f64| DelFeatures {
        sector_ws: [7.6, 8.4, 8.8, 7.2],
        sector_ti: [0.09, 0.07, 0.06, 0.10],
        yaw,
    };
    println!("\nyaw sweep at sector ws [7.6, 8.4, 8.8, 7.2], ti [0.09, 0.07, 0.06, 0.10]:");
    println!("  {:>6} {:>12} {:>12} {:>10}", "yaw", "oracle", "surrogate", "rel err");
    let mut worst: f64 = 0.0;
    for k in -6..=6 {
        let yaw = 5.0 * k as f64;
        let f = sweep_inflow(yaw);
        let truth = oracle.eval(&f);
        let est = net.estimate(&f);
        let rel = (est - truth).abs() / truth;
        worst = worst.max(rel);
        println!("  {yaw:>6.0} {truth:>12.1} {est:>12.1} {rel:>10.4}");
    }
    println!("\nworst relative error on the sweep: {worst:.4}");
}
