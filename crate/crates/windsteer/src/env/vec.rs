//! Box pool and the vectorized environment.
//!
//! Turbulence boxes are dealt to episodes without replacement (reshuffling
//! once the pool is exhausted), so every box is visited equally often while
//! consecutive episodes still vary. Environments are independent, so the
//! vectorized step can fan out across worker threads without changing any
//! result.

use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::single::{EnvStep, FarmEnv, OBS_DIM};
use crate::config::{Config, InflowConfig};
use crate::error::{Error, Result};
use crate::loads::SurrogateNet;
use crate::seed;
use crate::sim::{generate_turbulence_box, TurbulenceBox};

/// Worker-thread budget: the `WINDSTEER_THREADS` environment variable when
/// set (0 and 1 both mean single-threaded), otherwise the machine's
/// available parallelism.
pub fn worker_threads() -> usize {
    match std::env::var("WINDSTEER_THREADS") {
        Ok(v) => v.trim().parse::<usize>().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    }
}

/// Derives the box id for slot `index` of a pool built from `base_seed`.
/// Shared by in-memory generation and the on-disk generator so both produce
/// the same boxes.
pub fn pool_box_id(base_seed: u64, index: usize) -> u64 {
    seed::derive(base_seed, &[0xB0CE5, index as u64])
}

/// A set of turbulence boxes dealt without replacement.
pub struct BoxPool {
    boxes: Vec<Arc<TurbulenceBox>>,
    order: Vec<usize>,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl BoxPool {
    pub fn new(boxes: Vec<Arc<TurbulenceBox>>, seed: u64) -> Self {
        assert!(!boxes.is_empty(), "box pool cannot be empty");
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[0xDEA1]));
        let mut order: Vec<usize> = (0..boxes.len()).collect();
        order.shuffle(&mut rng);
        Self { boxes, order, cursor: 0, rng }
    }

    /// Generates `count` boxes in memory with ids derived from `base_seed`.
    pub fn generate(count: usize, inflow: &InflowConfig, base_seed: u64) -> Self {
        let boxes = (0..count)
            .map(|i| Arc::new(generate_turbulence_box(pool_box_id(base_seed, i), inflow)))
            .collect();
        Self::new(boxes, base_seed)
    }

    /// Loads every `*.tbox` file in `dir` (sorted by name, so the pool
    /// composition is stable across runs).
    pub fn load_dir(dir: &Path, seed: u64) -> Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "tbox"))
            .collect();
        if paths.is_empty() {
            return Err(Error::format(dir, "no .tbox files found".to_string()));
        }
        paths.sort();
        let boxes = paths
            .iter()
            .map(|p| TurbulenceBox::load(p).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(boxes, seed))
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[Arc<TurbulenceBox>] {
        &self.boxes
    }

    /// Deals the next box; reshuffles once every box has been dealt.
    pub fn deal(&mut self) -> Arc<TurbulenceBox> {
        if self.cursor == self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let b = Arc::clone(&self.boxes[self.order[self.cursor]]);
        self.cursor += 1;
        b
    }
}

/// A set of independent environments stepped together.
pub struct VecEnv {
    envs: Vec<FarmEnv>,
    pool: BoxPool,
    threads: usize,
}

impl VecEnv {
    /// Builds `cfg.training.n_env` environments, each seeded separately and
    /// started on its own box from the pool.
    pub fn new(cfg: &Config, surrogate: Arc<SurrogateNet>, mut pool: BoxPool, seed: u64) -> Self {
        let envs = (0..cfg.training.n_env)
            .map(|e| {
                FarmEnv::new(
                    cfg,
                    Arc::clone(&surrogate),
                    pool.deal(),
                    seed::derive(seed, &[0xE4F, e as u64]),
                )
            })
            .collect();
        Self { envs, pool, threads: worker_threads() }
    }

    /// Overrides the env-var-derived worker thread count (mainly for tests).
    pub fn set_worker_threads(&mut self, threads: usize) {
        self.threads = threads.max(1);
    }

    pub fn n_envs(&self) -> usize {
        self.envs.len()
    }

    /// Agents per environment.
    pub fn n_agents(&self) -> usize {
        self.envs[0].n_agents()
    }

    pub fn env(&self, i: usize) -> &FarmEnv {
        &self.envs[i]
    }

    /// Observation vectors, indexed `[env][agent]`.
    pub fn observations(&self) -> Vec<Vec<[f64; OBS_DIM]>> {
        self.envs.iter().map(|e| e.observations()).collect()
    }

    /// Steps every environment with its own command set, fanning out over
    /// worker threads when more than one is allowed. Environments are
    /// independent, so the results are identical for any thread count.
    pub fn step(&mut self, commands: &[Vec<f64>]) -> Vec<EnvStep> {
        assert_eq!(commands.len(), self.envs.len(), "one command set per environment");
        if self.threads <= 1 || self.envs.len() <= 1 {
            return self.envs.iter_mut().zip(commands).map(|(e, c)| e.step(c)).collect();
        }
        let chunk = self.envs.len().div_ceil(self.threads);
        let mut results: Vec<Option<EnvStep>> = vec![None; self.envs.len()];
        std::thread::scope(|scope| {
            let mut env_rest = self.envs.as_mut_slice();
            let mut cmd_rest = commands;
            let mut res_rest = results.as_mut_slice();
            while !env_rest.is_empty() {
                let take = chunk.min(env_rest.len());
                let (envs, er) = env_rest.split_at_mut(take);
                let (cmds, cr) = cmd_rest.split_at(take);
                let (res, rr) = res_rest.split_at_mut(take);
                env_rest = er;
                cmd_rest = cr;
                res_rest = rr;
                scope.spawn(move || {
                    for ((e, c), r) in envs.iter_mut().zip(cmds).zip(res) {
                        *r = Some(e.step(c));
                    }
                });
            }
        });
        results.into_iter().map(|r| r.expect("every env stepped")).collect()
    }

    /// Resets one environment onto the next box from the pool (after
    /// truncation).
    pub fn reset_env(&mut self, i: usize) {
        let tbox = self.pool.deal();
        self.envs[i].reset(tbox);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loads::{train_surrogate, DelOracle, SurrogateTrainConfig};
    use std::collections::HashSet;
    use std::sync::OnceLock;

    fn test_config(ti: f64) -> Config {
        let mut cfg = Config::default();
        cfg.inflow.ti = ti;
        cfg.inflow.box_nx = 600;
        cfg.inflow.box_ny = 8;
        cfg.inflow.box_nz = 8;
        cfg.training.n_env = 2;
        cfg.training.spin_up_secs = 50.0;
        cfg.validate().unwrap();
        cfg
    }

    fn tiny_surrogate() -> Arc<SurrogateNet> {
        static NET: OnceLock<Arc<SurrogateNet>> = OnceLock::new();
        Arc::clone(NET.get_or_init(|| {
            let cfg = SurrogateTrainConfig {
                n_samples: 300,
                hidden: 8,
                max_epochs: 5,
                batch_size: 64,
                lr: 2e-3,
                seed: 11,
                stop_frac_rmse: 0.0,
                required_frac_rmse: None,
            };
            let oracle = DelOracle::from_config(&Config::default().farm);
            Arc::new(train_surrogate(&oracle, &cfg).unwrap().0)
        }))
    }

    #[test]
    fn pool_deals_every_box_before_repeating() {
        let cfg = test_config(0.05);
        let mut pool = BoxPool::generate(3, &cfg.inflow, 17);
        let mut seen = Vec::new();
        for _ in 0..9 {
            seen.push(pool.deal().id);
        }
        for round in seen.chunks(3) {
            let unique: HashSet<u64> = round.iter().cloned().collect();
            assert_eq!(unique.len(), 3, "each round of deals must cover the whole pool");
        }
    }

    #[test]
    fn pool_generation_is_deterministic() {
        let cfg = test_config(0.05);
        let a = BoxPool::generate(2, &cfg.inflow, 5);
        let b = BoxPool::generate(2, &cfg.inflow, 5);
        for (x, y) in a.boxes().iter().zip(b.boxes()) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.u, y.u, "same seed must give identical boxes");
        }
    }

    #[test]
    fn vec_env_results_do_not_depend_on_thread_count() {
        let cfg = test_config(0.05);
        let mut a = VecEnv::new(&cfg, tiny_surrogate(), BoxPool::generate(2, &cfg.inflow, 3), 21);
        let mut b = VecEnv::new(&cfg, tiny_surrogate(), BoxPool::generate(2, &cfg.inflow, 3), 21);
        a.set_worker_threads(1);
        b.set_worker_threads(3);
        for k in 0..6 {
            let cmds: Vec<Vec<f64>> =
                (0..2).map(|e| vec![(k + e) as f64, -5.0, 10.0]).collect();
            let ra = a.step(&cmds);
            let rb = b.step(&cmds);
            for (x, y) in ra.iter().zip(&rb) {
                assert_eq!(x.reward.total.to_bits(), y.reward.total.to_bits());
            }
        }
        for (oa, ob) in a.observations().iter().flatten().zip(b.observations().iter().flatten()) {
            for (x, y) in oa.iter().zip(ob.iter()) {
                assert_eq!(x.to_bits(), y.to_bits(), "thread fan-out must not change results");
            }
        }
    }

    #[test]
    fn reset_env_moves_to_another_box() {
        let mut cfg = test_config(0.05);
        cfg.training.n_env = 1;
        let mut venv = VecEnv::new(&cfg, tiny_surrogate(), BoxPool::generate(2, &cfg.inflow, 9), 1);
        let first = venv.env(0).agent().sectors(0).rotor_ws;
        venv.reset_env(0);
        assert_eq!(venv.env(0).episode_step(), 0);
        // Different box and phase: a repeat of the exact speed is implausible.
        let second = venv.env(0).agent().sectors(0).rotor_ws;
        assert_ne!(first.to_bits(), second.to_bits());
    }

    #[test]
    fn worker_threads_is_at_least_one() {
        assert!(worker_threads() >= 1);
    }
}
