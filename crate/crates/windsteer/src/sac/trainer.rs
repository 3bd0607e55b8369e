//! The training loop: vectorized experience collection, per-agent off-policy
//! updates, periodic checkpoints, and a CSV log of every round.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::agent::{actor_path, critic_path, AgentNets, Policy};
use super::replay::{ReplayBuffer, Transition};
use super::update::{actor_update, critic_update, target_update, temperature_update, AgentOptimizers};
use crate::config::Config;
use crate::env::{BoxPool, VecEnv};
use crate::error::{Error, Result};
use crate::loads::SurrogateNet;
use crate::nn::{save_network, MAGIC_MNET};
use crate::seed;

/// Outcome of one training run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrainSummary {
    pub cumulative_steps: u64,
    pub rounds: u64,
    pub episodes: u64,
    pub gradient_updates_per_agent: u64,
    /// Mean total reward over the last (up to) 100 rounds.
    pub final_reward_mean: f64,
    pub wall_secs: f64,
}

/// Directory holding the final actors (and critics) of a run.
pub fn policy_dir(out_dir: &Path) -> PathBuf {
    out_dir.join("policy")
}

/// Path of the per-round training log.
pub fn log_path(out_dir: &Path) -> PathBuf {
    out_dir.join("training_log.csv")
}

/// Trains one run (one seed) and writes `training_log.csv`, periodic
/// `checkpoints/step_*/`, and the final `policy/` under `out_dir`.
///
/// Fully deterministic for a fixed `(cfg, pool, seed)`: environment phases,
/// warmup actions, sampling noise, and replay draws all derive from `seed`.
pub fn train(
    cfg: &Config,
    surrogate: Arc<SurrogateNet>,
    pool: BoxPool,
    seed: u64,
    out_dir: &Path,
) -> Result<TrainSummary> {
    let t = &cfg.training;
    let n_agents = cfg.farm.n_turbines;
    let start = Instant::now();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut venv = VecEnv::new(cfg, surrogate, pool, seed::derive(seed, &[0xE2F]));
    let n_env = venv.n_envs();

    let alpha0 = t.fixed_temperature;
    let mut agents: Vec<AgentNets> = (0..n_agents)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[0x1417, i as u64]));
            AgentNets::new(t.hidden_width, cfg.farm.yaw_limit, alpha0, &mut rng)
        })
        .collect();
    let mut opts: Vec<AgentOptimizers> =
        agents.iter().map(|a| AgentOptimizers::new(a, t.lr)).collect();
    let mut buffers: Vec<ReplayBuffer> = (0..n_agents)
        .map(|i| ReplayBuffer::new(t.replay_capacity, seed::derive(seed, &[0xB4F, i as u64])))
        .collect();
    let mut action_rngs: Vec<ChaCha8Rng> = (0..n_agents)
        .map(|i| ChaCha8Rng::seed_from_u64(seed::derive(seed, &[0xAC7, i as u64])))
        .collect();
    let mut update_rngs: Vec<ChaCha8Rng> = (0..n_agents)
        .map(|i| ChaCha8Rng::seed_from_u64(seed::derive(seed, &[0x0BD, i as u64])))
        .collect();

    let log_file = std::fs::File::create(log_path(out_dir))
        .map_err(|e| Error::io(log_path(out_dir), e))?;
    let mut log = csv::Writer::from_writer(log_file);
    let mut header = vec![
        "step".to_string(),
        "r_total".into(),
        "r_power".into(),
        "r_penalty".into(),
        "load_delta".into(),
    ];
    for i in 0..n_agents {
        header.push(format!("alpha_{i}"));
    }
    for i in 0..n_agents {
        header.push(format!("actor_loss_{i}"));
    }
    for i in 0..n_agents {
        header.push(format!("critic_loss_{i}"));
    }
    log.write_record(&header).map_err(|e| Error::Runtime(format!("log write: {e}")))?;

    let mut cumulative: u64 = 0;
    let mut rounds: u64 = 0;
    let mut episodes: u64 = 0;
    let mut updates_done: u64 = 0;
    let mut recent_rewards: VecDeque<f64> = VecDeque::with_capacity(100);
    let mut actor_losses = vec![f64::NAN; n_agents];
    let mut critic_losses = vec![f64::NAN; n_agents];
    let progress_every = (t.total_steps / 10).max(1);
    let mut next_progress = progress_every;

    let mut obs = venv.observations();
    while cumulative < t.total_steps {
        // Collect one vectorized round.
        let warmup = cumulative < t.warmup_steps;
        let mut commands: Vec<Vec<f64>> = Vec::with_capacity(n_env);
        for ob in &obs {
            let mut per_env = Vec::with_capacity(n_agents);
            for i in 0..n_agents {
                let a = if warmup {
                    action_rngs[i].random_range(-cfg.farm.yaw_limit..cfg.farm.yaw_limit)
                } else {
                    agents[i].act_stochastic(&ob[i], &mut action_rngs[i]).0
                };
                per_env.push(a);
            }
            commands.push(per_env);
        }
        let steps = venv.step(&commands);
        let next_obs = venv.observations();

        let mut any_reset = false;
        for (e, step) in steps.iter().enumerate() {
            if !step.reward.total.is_finite() {
                return Err(Error::Runtime(format!(
                    "non-finite reward {} at step {cumulative}",
                    step.reward.total
                )));
            }
            for i in 0..n_agents {
                buffers[i].push(Transition {
                    obs: obs[e][i],
                    action: commands[e][i],
                    reward: step.reward.total,
                    next_obs: next_obs[e][i],
                });
            }
            if step.truncated {
                venv.reset_env(e);
                episodes += 1;
                any_reset = true;
            }
        }
        obs = if any_reset { venv.observations() } else { next_obs };
        cumulative += n_env as u64;
        rounds += 1;

        // Per-agent updates at the configured update-to-data ratio.
        let ready = cumulative >= t.warmup_steps
            && buffers.iter().all(|b| b.len() >= t.batch_size);
        if ready {
            for _ in 0..(n_env as u64 * t.updates_per_step as u64) {
                for i in 0..n_agents {
                    let batch = buffers[i].sample(t.batch_size);
                    let (c1, c2) =
                        critic_update(&mut agents[i], &mut opts[i], &batch, t.gamma, &mut update_rngs[i]);
                    let (al, logp) = actor_update(&mut agents[i], &mut opts[i], &batch, &mut update_rngs[i]);
                    if t.learned_temperature {
                        temperature_update(&mut agents[i], &mut opts[i], logp, t.target_entropy);
                    }
                    target_update(&mut agents[i], t.tau);
                    critic_losses[i] = 0.5 * (c1 + c2);
                    actor_losses[i] = al;
                    if !(c1.is_finite() && c2.is_finite() && al.is_finite()) {
                        dump_bad_batch(out_dir, cumulative, i, &batch)?;
                        return Err(Error::Runtime(format!(
                            "non-finite loss for agent {i} at step {cumulative} \
                             (critic {c1}/{c2}, actor {al}); batch dumped"
                        )));
                    }
                }
                updates_done += 1;
            }
        }

        // Round statistics over environments.
        let m = steps.len() as f64;
        let r_total = steps.iter().map(|s| s.reward.total).sum::<f64>() / m;
        let r_power = steps.iter().map(|s| s.reward.power).sum::<f64>() / m;
        let r_penalty = steps.iter().map(|s| s.reward.penalty).sum::<f64>() / m;
        let load_delta = steps.iter().map(|s| s.reward.load_delta).sum::<f64>() / m;
        if recent_rewards.len() == 100 {
            recent_rewards.pop_front();
        }
        recent_rewards.push_back(r_total);

        let mut row = vec![
            cumulative.to_string(),
            format!("{r_total:.6e}"),
            format!("{r_power:.6e}"),
            format!("{r_penalty:.6e}"),
            format!("{load_delta:.6e}"),
        ];
        for a in &agents {
            row.push(format!("{:.6e}", a.alpha()));
        }
        for &l in &actor_losses {
            row.push(format!("{l:.6e}"));
        }
        for &l in &critic_losses {
            row.push(format!("{l:.6e}"));
        }
        log.write_record(&row).map_err(|e| Error::Runtime(format!("log write: {e}")))?;

        if t.checkpoint_every > 0 && cumulative / t.checkpoint_every > (cumulative - n_env as u64) / t.checkpoint_every
        {
            let dir = out_dir.join(format!("checkpoints/step_{cumulative:08}"));
            save_agents(&dir, &agents)?;
            log.flush().map_err(|e| Error::io(log_path(out_dir), e))?;
        }
        if cumulative >= next_progress {
            eprintln!(
                "step {cumulative}/{}: reward {r_total:.4} (power {r_power:.4}, penalty {r_penalty:.4})",
                t.total_steps
            );
            next_progress += progress_every;
        }
    }

    save_agents(&policy_dir(out_dir), &agents)?;
    log.flush().map_err(|e| Error::io(log_path(out_dir), e))?;

    let final_reward_mean = if recent_rewards.is_empty() {
        0.0
    } else {
        recent_rewards.iter().sum::<f64>() / recent_rewards.len() as f64
    };
    Ok(TrainSummary {
        cumulative_steps: cumulative,
        rounds,
        episodes,
        gradient_updates_per_agent: updates_done,
        final_reward_mean,
        wall_secs: start.elapsed().as_secs_f64(),
    })
}

/// Writes every agent's actor and critics into `dir`.
fn save_agents(dir: &Path, agents: &[AgentNets]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, a) in agents.iter().enumerate() {
        let scale = [a.head.scale];
        save_network(&actor_path(dir, i), MAGIC_MNET, &a.actor, &scale)?;
        save_network(&critic_path(dir, i, 1), MAGIC_MNET, &a.critic1, &scale)?;
        save_network(&critic_path(dir, i, 2), MAGIC_MNET, &a.critic2, &scale)?;
    }
    Ok(())
}

/// Serializes the batch that produced a non-finite loss for post-mortems.
fn dump_bad_batch(out_dir: &Path, step: u64, agent: usize, batch: &[Transition]) -> Result<()> {
    let path = out_dir.join("nan_dump.json");
    let payload = serde_json::json!({
        "step": step,
        "agent": agent,
        "batch": batch,
    });
    std::fs::write(&path, serde_json::to_vec_pretty(&payload).expect("serializable"))
        .map_err(|e| Error::io(path, e))
}

/// Loads the final policy written by [`train`].
pub fn load_policy(out_dir: &Path, n_agents: usize) -> Result<Policy> {
    Policy::load_dir(&policy_dir(out_dir), n_agents)
}
