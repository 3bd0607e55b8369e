//! Per-agent network bundle and the frozen inference policy.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::OBS_DIM;
use crate::error::{Error, Result};
use crate::nn::{
    load_network, save_network, Activation, Mlp, SquashedGaussianHead, MAGIC_MNET,
};

/// Critic input width: observation plus the normalized action.
pub const CRITIC_IN: usize = OBS_DIM + 1;

/// Everything one agent learns: a squashed-Gaussian actor, twin critics with
/// their polyak targets, and a (possibly learned) temperature.
pub struct AgentNets {
    pub actor: Mlp,
    pub critic1: Mlp,
    pub critic2: Mlp,
    pub target1: Mlp,
    pub target2: Mlp,
    pub head: SquashedGaussianHead,
    /// Log of the entropy temperature; optimized when learning is enabled.
    pub log_alpha: f64,
}

impl AgentNets {
    /// Fresh randomly-initialized networks. `action_limit` is the yaw bound
    /// in degrees (the squashing scale); `alpha0` the initial temperature.
    pub fn new(hidden: usize, action_limit: f64, alpha0: f64, rng: &mut ChaCha8Rng) -> Self {
        let actor_dims = [OBS_DIM, hidden, hidden, 2];
        let actor_acts = [Activation::Tanh, Activation::Tanh, Activation::Linear];
        let critic_dims = [CRITIC_IN, hidden, hidden, 1];
        let critic_acts = [Activation::Relu, Activation::Relu, Activation::Linear];
        let actor = Mlp::with_init(&actor_dims, &actor_acts, rng);
        let critic1 = Mlp::with_init(&critic_dims, &critic_acts, rng);
        let critic2 = Mlp::with_init(&critic_dims, &critic_acts, rng);
        let target1 = critic1.clone();
        let target2 = critic2.clone();
        assert!(alpha0 > 0.0, "temperature must be positive");
        Self {
            actor,
            critic1,
            critic2,
            target1,
            target2,
            head: SquashedGaussianHead::symmetric(action_limit),
            log_alpha: alpha0.ln(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    /// Stochastic action (degrees) plus its log-probability.
    pub fn act_stochastic(&self, obs: &[f64; OBS_DIM], rng: &mut ChaCha8Rng) -> (f64, f64) {
        let out = self.actor.forward_one(obs);
        let eps: f64 = rng.sample(rand_distr::StandardNormal);
        let s = self.head.sample(out[0], out[1], eps);
        (s.action, s.log_prob)
    }

    /// Deterministic (mean) action, degrees.
    pub fn act_deterministic(&self, obs: &[f64; OBS_DIM]) -> f64 {
        self.head.deterministic(self.actor.forward_one(obs)[0])
    }
}

/// Frozen actors for evaluation: deterministic mean actions only.
#[derive(Debug, Clone)]
pub struct Policy {
    actors: Vec<Mlp>,
    heads: Vec<SquashedGaussianHead>,
}

impl Policy {
    /// Snapshots the current actors of a set of agents.
    pub fn from_agents(agents: &[AgentNets]) -> Self {
        Self {
            actors: agents.iter().map(|a| a.actor.clone()).collect(),
            heads: agents.iter().map(|a| a.head).collect(),
        }
    }

    /// Loads `actor_0.mnet .. actor_{n-1}.mnet` from a checkpoint directory.
    pub fn load_dir(dir: &Path, n_agents: usize) -> Result<Self> {
        let mut actors = Vec::with_capacity(n_agents);
        let mut heads = Vec::with_capacity(n_agents);
        for i in 0..n_agents {
            let path = actor_path(dir, i);
            let (net, consts) = load_network(&path, MAGIC_MNET)?;
            if net.input_dim() != OBS_DIM || net.output_dim() != 2 {
                return Err(Error::format(
                    &path,
                    format!("actor must map {OBS_DIM} observations to 2 heads, got {:?}", net.dims()),
                ));
            }
            let &[scale] = consts.as_slice() else {
                return Err(Error::format(
                    &path,
                    format!("expected one stored constant (action scale), got {}", consts.len()),
                ));
            };
            actors.push(net);
            heads.push(SquashedGaussianHead::symmetric(scale));
        }
        Ok(Self { actors, heads })
    }

    /// Writes each actor as `actor_{i}.mnet` under `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, (net, head)) in self.actors.iter().zip(&self.heads).enumerate() {
            save_network(&actor_path(dir, i), MAGIC_MNET, net, &[head.scale])?;
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.actors.len()
    }

    /// Deterministic yaw command, degrees.
    pub fn act(&self, agent: usize, obs: &[f64; OBS_DIM]) -> f64 {
        self.heads[agent].deterministic(self.actors[agent].forward_one(obs)[0])
    }

    /// Stochastic yaw command, degrees (optional evaluation sampling mode).
    pub fn act_sampled(&self, agent: usize, obs: &[f64; OBS_DIM], rng: &mut ChaCha8Rng) -> f64 {
        let out = self.actors[agent].forward_one(obs);
        let eps: f64 = rng.sample(rand_distr::StandardNormal);
        self.heads[agent].sample(out[0], out[1], eps).action
    }
}

/// Checkpoint filename for one agent's actor.
pub fn actor_path(dir: &Path, agent: usize) -> std::path::PathBuf {
    dir.join(format!("actor_{agent}.mnet"))
}

/// Checkpoint filename for one agent's critic.
pub fn critic_path(dir: &Path, agent: usize, which: usize) -> std::path::PathBuf {
    dir.join(format!("critic{which}_{agent}.mnet"))
}
