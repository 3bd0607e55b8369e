//! Soft actor-critic with one independent learner per turbine: replay
//! buffers, actor/critic bundles, gradient updates, and the training loop.

mod agent;
mod replay;
mod trainer;
mod update;

pub use agent::{actor_path, critic_path, AgentNets, Policy, CRITIC_IN};
pub use replay::{ReplayBuffer, Transition};
pub use trainer::{load_policy, log_path, policy_dir, train, TrainSummary};
pub use update::{
    actor_update, critic_update, target_update, temperature_update, AgentOptimizers,
};
