//! One training environment: an agent-controlled farm and a zero-yaw
//! baseline twin stepped in lockstep on the same turbulence box, so every
//! reward compares against what greedy operation would have produced under
//! bitwise-identical inflow.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::reward::{reward_components, RewardComponents};
use crate::config::Config;
use crate::loads::{estimate_del, delta_ratio, DelWindowState, SurrogateNet};
use crate::sim::{Farm, TurbulenceBox};

/// Observation width per agent.
pub const OBS_DIM: usize = 8;

/// One agent's normalized observation. Field order is the vector order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Farm-wide freestream speed / ws divisor.
    pub ws_global: f64,
    /// Farm-wide freestream direction deviation, degrees / angle divisor.
    pub wd_global: f64,
    /// Instantaneous rotor-effective speed / ws divisor.
    pub ws_local: f64,
    /// Windowed mean of `ws_local`.
    pub ws_local_mean: f64,
    /// Instantaneous local flow-direction deviation, degrees / angle divisor.
    pub wd_local: f64,
    /// Windowed mean of `wd_local`.
    pub wd_local_mean: f64,
    /// Current yaw offset, degrees / angle divisor.
    pub yaw: f64,
    /// Windowed mean yaw.
    pub yaw_mean: f64,
}

impl Observation {
    pub fn to_array(&self) -> [f64; OBS_DIM] {
        [
            self.ws_global,
            self.wd_global,
            self.ws_local,
            self.ws_local_mean,
            self.wd_local,
            self.wd_local_mean,
            self.yaw,
            self.yaw_mean,
        ]
    }
}

/// Flow-direction deviation from straight-down-the-row, degrees (positive
/// when the flow veers toward +y).
fn direction_deg(u: f64, v: f64) -> f64 {
    if u.abs() <= 1e-9 && v.abs() <= 1e-9 {
        0.0
    } else {
        v.atan2(u).to_degrees()
    }
}

/// Outcome of one control step.
#[derive(Debug, Clone, Copy)]
pub struct EnvStep {
    pub reward: RewardComponents,
    /// Episode hit its time limit; the successor state is still valid for
    /// bootstrapping.
    pub truncated: bool,
}

/// Training environment wrapping the agent farm and its baseline twin.
pub struct FarmEnv {
    cfg: Config,
    surrogate: Arc<SurrogateNet>,
    agent: Farm,
    baseline: Farm,
    rng: ChaCha8Rng,
    /// Per turbine: (rotor speed, local direction deg, yaw deg) snapshots.
    obs_rings: Vec<VecDeque<[f64; 3]>>,
    obs_cap: usize,
    power_agent: VecDeque<f64>,
    power_baseline: VecDeque<f64>,
    power_cap: usize,
    dels_agent: DelWindowState,
    dels_baseline: DelWindowState,
    steps: u64,
}

impl FarmEnv {
    /// Builds the twin farms on `tbox` and runs the initial spin-up.
    pub fn new(cfg: &Config, surrogate: Arc<SurrogateNet>, tbox: Arc<TurbulenceBox>, seed: u64) -> Self {
        let n = cfg.farm.n_turbines;
        let t = &cfg.training;
        let obs_cap = (t.obs_window_secs / t.control_dt).round().max(1.0) as usize;
        let power_cap = (t.power_window_secs / t.control_dt).round().max(1.0) as usize;
        let del_cap = (t.del_window_secs / t.control_dt).round().max(1.0) as usize;
        let mut env = Self {
            agent: Farm::new(cfg, Arc::clone(&tbox)),
            baseline: Farm::new(cfg, Arc::clone(&tbox)),
            surrogate,
            rng: ChaCha8Rng::seed_from_u64(seed),
            obs_rings: vec![VecDeque::with_capacity(obs_cap); n],
            obs_cap,
            power_agent: VecDeque::with_capacity(power_cap),
            power_baseline: VecDeque::with_capacity(power_cap),
            power_cap,
            dels_agent: DelWindowState::new(n, del_cap),
            dels_baseline: DelWindowState::new(n, del_cap),
            steps: 0,
            cfg: cfg.clone(),
        };
        env.reset(tbox);
        env
    }

    pub fn n_agents(&self) -> usize {
        self.agent.n_turbines()
    }

    /// Control steps taken since the last reset.
    pub fn episode_step(&self) -> u64 {
        self.steps
    }

    pub fn agent(&self) -> &Farm {
        &self.agent
    }

    pub fn baseline(&self) -> &Farm {
        &self.baseline
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    /// Rebinds both farms to a box at a fresh advection phase, re-spins the
    /// wakes, and clears every window.
    pub fn reset(&mut self, tbox: Arc<TurbulenceBox>) {
        // Random phase within one box period keeps episodes on the same box
        // from replaying identical inflow.
        let period_secs = tbox.period_x() / self.cfg.inflow.ws;
        let t_offset = self.rng.random_range(0.0..period_secs);
        self.agent.reset(Arc::clone(&tbox), t_offset);
        self.baseline.reset(tbox, t_offset);
        let t = &self.cfg.training;
        self.agent.spin_up(t.spin_up_secs, t.physics_dt());
        self.baseline.spin_up(t.spin_up_secs, t.physics_dt());
        for ring in &mut self.obs_rings {
            ring.clear();
        }
        self.power_agent.clear();
        self.power_baseline.clear();
        self.dels_agent.clear();
        self.dels_baseline.clear();
        self.steps = 0;
        self.push_windows();
    }

    /// Advances one control interval: applies yaw commands to the agent farm
    /// (the baseline always commands zero), runs the physics substeps on both
    /// farms, refreshes the windows, and scores the step.
    pub fn step(&mut self, commands: &[f64]) -> EnvStep {
        assert_eq!(commands.len(), self.n_agents(), "one yaw command per turbine");
        let t = &self.cfg.training;
        let (dt_c, dt_p) = (t.control_dt, t.physics_dt());
        self.agent.command_yaw(commands, dt_c);
        let zeros = vec![0.0; self.n_agents()];
        self.baseline.command_yaw(&zeros, dt_c);
        for _ in 0..t.physics_substeps {
            self.agent.step(dt_p);
            self.baseline.step(dt_p);
        }
        self.push_windows();
        self.steps += 1;
        EnvStep {
            reward: self.current_reward(),
            truncated: self.steps >= self.cfg.training.reset_interval,
        }
    }

    /// Current DEL estimates, (agent, baseline), one entry per turbine.
    pub fn del_estimates(&self) -> (Vec<f64>, Vec<f64>) {
        let del = |w: &DelWindowState| {
            (0..self.n_agents())
                .map(|i| estimate_del(w, &self.surrogate, i).expect("windows filled at reset"))
                .collect()
        };
        (del(&self.dels_agent), del(&self.dels_baseline))
    }

    /// Worst-turbine DEL ratio minus one at the current instant.
    pub fn load_delta(&self) -> f64 {
        let (a, b) = self.del_estimates();
        delta_ratio(&a, &b)
    }

    fn current_reward(&self) -> RewardComponents {
        let mean = |w: &VecDeque<f64>| w.iter().sum::<f64>() / w.len() as f64;
        reward_components(
            mean(&self.power_agent),
            mean(&self.power_baseline),
            self.load_delta(),
            self.cfg.constraint.threshold(),
            self.cfg.constraint.alpha,
        )
    }

    /// One agent's observation at the current instant.
    pub fn observe(&self, turbine: usize) -> Observation {
        let t = &self.cfg.training;
        let (ws_n, ang_n) = (t.ws_norm_divisor, t.angle_norm_divisor);
        let free = self.agent.freestream_estimate();
        let s = self.agent.sectors(turbine);
        let ring = &self.obs_rings[turbine];
        let n = ring.len().max(1) as f64;
        let mut mean = [0.0; 3];
        for e in ring {
            for k in 0..3 {
                mean[k] += e[k] / n;
            }
        }
        Observation {
            ws_global: free[0] / ws_n,
            wd_global: direction_deg(free[0], free[1]) / ang_n,
            ws_local: s.rotor_ws / ws_n,
            ws_local_mean: mean[0] / ws_n,
            wd_local: direction_deg(s.rotor_ws, s.rotor_v) / ang_n,
            wd_local_mean: mean[1] / ang_n,
            yaw: self.agent.yaw()[turbine] / ang_n,
            yaw_mean: mean[2] / ang_n,
        }
    }

    /// All agents' observation vectors.
    pub fn observations(&self) -> Vec<[f64; OBS_DIM]> {
        (0..self.n_agents()).map(|i| self.observe(i).to_array()).collect()
    }

    /// Appends the instantaneous sensor state to every window.
    fn push_windows(&mut self) {
        for i in 0..self.n_agents() {
            let s = self.agent.sectors(i);
            self.obs_rings[i].push_back([
                s.rotor_ws,
                direction_deg(s.rotor_ws, s.rotor_v),
                self.agent.yaw()[i],
            ]);
            if self.obs_rings[i].len() > self.obs_cap {
                self.obs_rings[i].pop_front();
            }
            self.dels_agent.push(i, s.sector_ws, s.sector_ti, self.agent.yaw()[i]);
            let b = self.baseline.sectors(i);
            self.dels_baseline.push(i, b.sector_ws, b.sector_ti, self.baseline.yaw()[i]);
        }
        self.power_agent.push_back(self.agent.total_power());
        self.power_baseline.push_back(self.baseline.total_power());
        if self.power_agent.len() > self.power_cap {
            self.power_agent.pop_front();
            self.power_baseline.pop_front();
        }
    }
}
