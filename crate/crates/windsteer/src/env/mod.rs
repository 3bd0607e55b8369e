//! Reinforcement-learning environment: twin-farm simulation, observations,
//! rewards, box dealing, and the vectorized stepping loop.

mod reward;
mod single;
mod vec;

pub use reward::{reward_components, RewardComponents, REWARD_FLOOR};
pub use single::{EnvStep, FarmEnv, Observation, OBS_DIM};
pub use vec::{pool_box_id, worker_threads, BoxPool, VecEnv};
