//! A complete miniature training run: box pool, surrogate, per-turbine
//! soft actor-critic agents, the round log, checkpoints, and reloading the
//! final policy for greedy actions.
//!
//! Sizes are shrunk so the whole loop takes seconds; the real workflow is
//! the same code driven by `windsteer train`.
//!
//! Run with `cargo run --example train_smoke`.

use std::sync::Arc;

use windsteer::config::Config;
use windsteer::env::{BoxPool, FarmEnv};
use windsteer::loads::{train_surrogate, DelOracle, SurrogateTrainConfig};
use windsteer::sac::{load_policy, log_path, train};
use windsteer::sim::generate_turbulence_box;

fn main() {
    let mut cfg = Config::default();
    cfg.inflow.box_nx = 600;
    cfg.inflow.box_ny = 8;
    cfg.inflow.box_nz = 8;
    cfg.training.total_steps = 400;
    cfg.training.n_env = 2;
    cfg.training.warmup_steps = 64;
    cfg.training.batch_size = 32;
    cfg.training.replay_capacity = 2000;
    cfg.training.reset_interval = 50;
    cfg.training.hidden_width = 16;
    cfg.training.checkpoint_every = 200;
    cfg.training.spin_up_secs = 40.0;
    cfg.validate().expect("demo configuration is valid");

    let scfg = SurrogateTrainConfig {
        n_samples: 2000,
        hidden: 24,
        max_epochs: 200,
        batch_size: 128,
        stop_frac_rmse: 0.05,
        required_frac_rmse: None,
        seed: 7,
        ..SurrogateTrainConfig::default()
    };
    let oracle = DelOracle::from_config(&cfg.farm);
    let surrogate = Arc::new(train_surrogate(&oracle, &scfg).expect("surrogate fits").0);

    let pool = BoxPool::generate(3, &cfg.inflow, 1);
    let out = tempfile::tempdir().expect("temp dir");
    println!(
        "training {} agents for {} cumulative steps across {} envs...",
        cfg.farm.n_turbines, cfg.training.total_steps, cfg.training.n_env
    );
    let summary =
        train(&cfg, Arc::clone(&surrogate), pool, 1, out.path()).expect("training completes");
    println!(
        "done: {} rounds, {} episodes, {} gradient updates per agent, {:.1} s",
        summary.rounds, summary.episodes, summary.gradient_updates_per_agent, summary.wall_secs
    );
    println!("mean shared reward over the final rounds: {:+.4}", summary.final_reward_mean);

    // The round log is a plain CSV; show its shape.
    let log = std::fs::read_to_string(log_path(out.path())).unwrap();
    let mut lines = log.lines();
    println!("\ntraining_log.csv header:\n  {}", lines.next().unwrap());
    if let Some(last) = lines.last() {
        println!("last row:\n  {last}");
    }

    // Reload the saved policy and query greedy actions on a live env.
    let policy = load_policy(out.path(), cfg.farm.n_turbines).expect("policy loads");
    let tbox = Arc::new(generate_turbulence_box(1000, &cfg.inflow));
    let env = FarmEnv::new(&cfg, surrogate, tbox, 0);
    let obs = env.observations();
    let actions: Vec<f64> = (0..env.n_agents()).map(|i| policy.act(i, &obs[i])).collect();
    println!(
        "\ngreedy yaw commands on a fresh box [deg]: {}",
        actions.iter().map(|a| format!("{a:+.2}")).collect::<Vec<_>>().join("  ")
    );
    println!("(a few hundred steps is a smoke test, not a converged controller)");
}
