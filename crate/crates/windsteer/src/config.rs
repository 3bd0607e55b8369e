//! Run configuration: TOML sections `[farm]`, `[inflow]`, `[constraint]`,
//! `[training]`, `[paths]`.
//!
//! Every field has a default, so an empty file is a valid configuration of
//! the reference scenario: an aligned 3-turbine row at 6 rotor-diameter
//! spacing in 10 m/s, 270°, 5% turbulence-intensity inflow. Validation
//! reports offending fields by their config path (e.g.
//! `[constraint].delta_max`) so CLI errors are actionable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Turbine geometry, power/thrust model, actuation limits, wake-model and
/// structural-load coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarmConfig {
    /// Number of turbines in the aligned row.
    pub n_turbines: usize,
    /// Rotor diameter D, m.
    pub rotor_diameter: f64,
    /// Hub height, m.
    pub hub_height: f64,
    /// Streamwise spacing between adjacent turbines, in rotor diameters.
    pub spacing_diameters: f64,
    /// Explicit per-turbine (x, y) positions, m. Overrides the aligned row
    /// built from `spacing_diameters` when present.
    pub positions: Option<Vec<[f64; 2]>>,
    /// Rated electrical power, W.
    pub rated_power: f64,
    /// Power coefficient at zero yaw.
    pub cp: f64,
    /// Air density, kg/m^3.
    pub air_density: f64,
    /// Exponent p in the cos^p(yaw) power derating.
    pub power_yaw_exponent: f64,
    /// Thrust coefficient at zero yaw; Ct(yaw) = ct0 * cos^2(yaw).
    pub ct0: f64,
    /// Yaw actuation bound, degrees (actions live in [-limit, limit]).
    pub yaw_limit: f64,
    /// Maximum yaw slew rate, degrees per second.
    pub yaw_rate_limit: f64,
    /// Wake expansion rate: k = wake_k_ti * TI + wake_k0.
    pub wake_k_ti: f64,
    pub wake_k0: f64,
    /// Wake width at the rotor, as sigma/D.
    pub wake_sigma0: f64,
    /// Sign convention for lateral wake deflection under positive yaw.
    pub deflection_sign: f64,
    /// Meander low-pass time constant, s.
    pub meander_tau: f64,
    /// Blade-root flapwise DEL model coefficients (see loads module):
    /// DEL = del_c0 * U^del_e1 * (1 + del_a1*TI + del_a2*asym + del_a3*(y/30)^2 + del_a4*(y/30)).
    pub del_c0: f64,
    pub del_e1: f64,
    pub del_a1: f64,
    pub del_a2: f64,
    pub del_a3: f64,
    pub del_a4: f64,
    /// Wöhler exponent for rainflow damage-equivalent loads.
    pub wohler_m: f64,
}

impl Default for FarmConfig {
    fn default() -> Self {
        Self {
            n_turbines: 3,
            rotor_diameter: 93.0,
            hub_height: 80.0,
            spacing_diameters: 6.0,
            positions: None,
            rated_power: 2.3e6,
            cp: 0.48,
            air_density: 1.225,
            power_yaw_exponent: 1.88,
            ct0: 0.8,
            yaw_limit: 30.0,
            yaw_rate_limit: 0.25,
            wake_k_ti: 0.38,
            wake_k0: 0.004,
            wake_sigma0: 0.25,
            deflection_sign: 1.0,
            meander_tau: 30.0,
            del_c0: 120.0,
            del_e1: 1.4,
            del_a1: 8.0,
            del_a2: 3.0,
            del_a3: 0.6,
            del_a4: 0.25,
            wohler_m: 10.0,
        }
    }
}

impl FarmConfig {
    /// Turbine (x, y) positions, m: explicit list if given, otherwise an
    /// aligned row along +x at the configured spacing.
    pub fn turbine_positions(&self) -> Vec<[f64; 2]> {
        match &self.positions {
            Some(p) => p.clone(),
            None => (0..self.n_turbines)
                .map(|i| [i as f64 * self.spacing_diameters * self.rotor_diameter, 0.0])
                .collect(),
        }
    }

    /// Streamwise extent from first to last turbine, m.
    pub fn farm_extent_x(&self) -> f64 {
        let pos = self.turbine_positions();
        let min = pos.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let max = pos.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        max - min
    }
}

/// Mean inflow and turbulence-box lattice parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InflowConfig {
    /// Mean wind speed, m/s.
    pub ws: f64,
    /// Wind direction, degrees (270 = along +x).
    pub wd: f64,
    /// Turbulence intensity, fraction.
    pub ti: f64,
    /// Lattice node counts.
    pub box_nx: usize,
    pub box_ny: usize,
    pub box_nz: usize,
    /// Lattice spacings, m.
    pub box_dx: f64,
    pub box_dy: f64,
    pub box_dz: f64,
    /// Streamwise integral length scale of the synthetic spectrum, m.
    pub length_scale: f64,
    /// Transverse coherence scale of the synthetic turbulence, m.
    pub cross_scale: f64,
}

impl Default for InflowConfig {
    fn default() -> Self {
        Self {
            ws: 10.0,
            wd: 270.0,
            ti: 0.05,
            // (box_nx - 1) * box_dx = 12,276 m streamwise extent.
            box_nx: 3070,
            box_ny: 32,
            box_nz: 16,
            box_dx: 4.0,
            box_dy: 8.0,
            box_dz: 8.0,
            length_scale: 340.0,
            cross_scale: 30.0,
        }
    }
}

impl InflowConfig {
    /// Streamwise box extent (nx - 1) * dx, m.
    pub fn length_x(&self) -> f64 {
        (self.box_nx.saturating_sub(1)) as f64 * self.box_dx
    }
}

/// Load-constraint shaping for the reward.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintConfig {
    /// Permitted fractional increase of max-to-max DEL; ignored when
    /// `unconstrained` is set.
    pub delta_max: f64,
    /// Disables the constraint penalty entirely.
    pub unconstrained: bool,
    /// Penalty slope applied to constraint excess.
    pub alpha: f64,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        Self { delta_max: 0.2, unconstrained: false, alpha: 1.0 }
    }
}

impl ConstraintConfig {
    /// Effective threshold: `None` means unconstrained.
    pub fn threshold(&self) -> Option<f64> {
        if self.unconstrained {
            None
        } else {
            Some(self.delta_max)
        }
    }
}

/// Learner hyperparameters and control-loop cadence.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    /// Total environment steps, cumulative across all parallel environments.
    pub total_steps: u64,
    /// Number of parallel environments.
    pub n_env: usize,
    /// Replay minibatch size.
    pub batch_size: usize,
    /// Discount factor.
    pub gamma: f64,
    /// Polyak factor for target-network updates.
    pub tau: f64,
    /// Learning rate for actors, critics, and the temperature.
    pub lr: f64,
    /// Cumulative env steps of uniform-random actions before learning starts.
    pub warmup_steps: u64,
    /// Replay capacity in joint transitions.
    pub replay_capacity: usize,
    /// Gradient steps per agent per environment step.
    pub updates_per_step: u32,
    /// Entropy target for the learned temperature (per action dimension).
    pub target_entropy: f64,
    /// Learn the entropy temperature; when false `fixed_temperature` is used.
    pub learned_temperature: bool,
    pub fixed_temperature: f64,
    /// Forced-reset cadence, control steps per environment.
    pub reset_interval: u64,
    /// Seeds for the training sweep; `--seed` selects a single one.
    pub seeds: Vec<u64>,
    /// Hidden layer width for actor/critic networks.
    pub hidden_width: usize,
    /// Checkpoint cadence in cumulative env steps (a final checkpoint is
    /// always written).
    pub checkpoint_every: u64,
    /// Control interval, s.
    pub control_dt: f64,
    /// Physics substeps per control step.
    pub physics_substeps: u32,
    /// Simulator spin-up before the first observation of an episode, s.
    pub spin_up_secs: f64,
    /// Trailing window for the power reward, s.
    pub power_window_secs: f64,
    /// Rolling-mean window for local observations, s.
    pub obs_window_secs: f64,
    /// Sliding window feeding the DEL surrogate, s.
    pub del_window_secs: f64,
    /// Observation normalization divisors.
    pub ws_norm_divisor: f64,
    pub angle_norm_divisor: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            total_steps: 150_000,
            n_env: 15,
            batch_size: 256,
            gamma: 0.99,
            tau: 0.005,
            lr: 3e-4,
            warmup_steps: 1_000,
            replay_capacity: 100_000,
            updates_per_step: 1,
            target_entropy: -1.0,
            learned_temperature: true,
            fixed_temperature: 0.2,
            reset_interval: 1_500,
            seeds: vec![1, 2, 3, 4, 5, 6],
            hidden_width: 64,
            checkpoint_every: 25_000,
            control_dt: 10.0,
            physics_substeps: 10,
            spin_up_secs: 200.0,
            power_window_secs: 120.0,
            obs_window_secs: 120.0,
            del_window_secs: 600.0,
            ws_norm_divisor: 15.0,
            angle_norm_divisor: 30.0,
        }
    }
}

impl TrainingConfig {
    /// Physics integration step, s.
    pub fn physics_dt(&self) -> f64 {
        self.control_dt / self.physics_substeps as f64
    }
}

/// Artifact locations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Directory holding the turbulence-box pool.
    pub box_dir: PathBuf,
    /// Trained DEL surrogate checkpoint.
    pub surrogate: PathBuf,
    /// Default output directory when the CLI gives none.
    pub out_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            box_dir: PathBuf::from("boxes"),
            surrogate: PathBuf::from("surrogate.bin"),
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub farm: FarmConfig,
    pub inflow: InflowConfig,
    pub constraint: ConstraintConfig,
    pub training: TrainingConfig,
    pub paths: PathsConfig,
}

impl Config {
    /// Loads and validates a TOML configuration file.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Config = toml::from_str(&text)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every invariant the modules rely on; errors carry the config
    /// path of the offending field.
    pub fn validate(&self) -> Result<()> {
        let f = &self.farm;
        require(f.n_turbines >= 1, "[farm].n_turbines", "must be at least 1")?;
        require(f.rotor_diameter > 0.0, "[farm].rotor_diameter", "must be positive")?;
        require(f.hub_height > 0.0, "[farm].hub_height", "must be positive")?;
        require(f.spacing_diameters > 0.0, "[farm].spacing_diameters", "must be positive")?;
        require(f.rated_power > 0.0, "[farm].rated_power", "must be positive")?;
        require(f.cp > 0.0 && f.cp < 1.0, "[farm].cp", "must lie in (0, 1)")?;
        require(f.air_density > 0.0, "[farm].air_density", "must be positive")?;
        require(f.power_yaw_exponent > 0.0, "[farm].power_yaw_exponent", "must be positive")?;
        require(f.ct0 > 0.0 && f.ct0 < 1.0, "[farm].ct0", "must lie in (0, 1)")?;
        require(
            f.yaw_limit > 0.0 && f.yaw_limit <= 45.0,
            "[farm].yaw_limit",
            "must lie in (0, 45] degrees",
        )?;
        require(f.yaw_rate_limit > 0.0, "[farm].yaw_rate_limit", "must be positive")?;
        require(f.wake_sigma0 > 0.0, "[farm].wake_sigma0", "must be positive")?;
        require(
            f.deflection_sign == 1.0 || f.deflection_sign == -1.0,
            "[farm].deflection_sign",
            "must be +1 or -1",
        )?;
        require(f.meander_tau > 0.0, "[farm].meander_tau", "must be positive")?;
        require(f.del_c0 > 0.0, "[farm].del_c0", "must be positive")?;
        require(f.wohler_m > 0.0, "[farm].wohler_m", "must be positive")?;
        if let Some(p) = &f.positions {
            require(
                p.len() == f.n_turbines,
                "[farm].positions",
                "length must equal n_turbines",
            )?;
            require(
                p.windows(2).all(|w| w[0][0] < w[1][0]),
                "[farm].positions",
                "x coordinates must be strictly increasing",
            )?;
        }

        let i = &self.inflow;
        require(i.ws > 0.0, "[inflow].ws", "must be positive")?;
        require((0.0..360.0).contains(&i.wd), "[inflow].wd", "must lie in [0, 360)")?;
        require((0.0..1.0).contains(&i.ti), "[inflow].ti", "must lie in [0, 1)")?;
        require(i.box_nx >= 8, "[inflow].box_nx", "must be at least 8")?;
        require(i.box_ny >= 4, "[inflow].box_ny", "must be at least 4")?;
        require(i.box_nz >= 4, "[inflow].box_nz", "must be at least 4")?;
        require(i.box_dx > 0.0, "[inflow].box_dx", "must be positive")?;
        require(i.box_dy > 0.0, "[inflow].box_dy", "must be positive")?;
        require(i.box_dz > 0.0, "[inflow].box_dz", "must be positive")?;
        require(i.length_scale > 0.0, "[inflow].length_scale", "must be positive")?;
        require(i.cross_scale > 0.0, "[inflow].cross_scale", "must be positive")?;
        // The periodic box must comfortably contain the farm plus wake run-out;
        // temporal duration is unlimited because advection wraps.
        let needed = f.farm_extent_x() + 10.0 * f.rotor_diameter;
        if i.length_x() < needed {
            return Err(Error::config(
                "[inflow].box_nx",
                format!(
                    "box length {:.0} m is too short: farm extent plus wake run-out needs at least {:.0} m",
                    i.length_x(),
                    needed
                ),
            ));
        }

        let c = &self.constraint;
        if !c.unconstrained {
            require(c.delta_max > 0.0, "[constraint].delta_max", "must be positive")?;
        }
        require(c.alpha >= 0.0, "[constraint].alpha", "must be non-negative")?;

        let t = &self.training;
        require(t.n_env >= 1, "[training].n_env", "must be at least 1")?;
        require(t.batch_size >= 1, "[training].batch_size", "must be at least 1")?;
        require(
            t.gamma > 0.0 && t.gamma < 1.0,
            "[training].gamma",
            "must lie in (0, 1)",
        )?;
        require(t.tau > 0.0 && t.tau <= 1.0, "[training].tau", "must lie in (0, 1]")?;
        require(t.lr > 0.0, "[training].lr", "must be positive")?;
        require(
            t.warmup_steps >= t.batch_size as u64,
            "[training].warmup_steps",
            "must be at least batch_size so the first minibatch is fully random",
        )?;
        require(
            t.replay_capacity >= t.batch_size,
            "[training].replay_capacity",
            "must be at least batch_size",
        )?;
        require(t.updates_per_step >= 1, "[training].updates_per_step", "must be at least 1")?;
        require(t.fixed_temperature > 0.0, "[training].fixed_temperature", "must be positive")?;
        require(t.reset_interval >= 1, "[training].reset_interval", "must be at least 1")?;
        require(!t.seeds.is_empty(), "[training].seeds", "must list at least one seed")?;
        require(t.hidden_width >= 1, "[training].hidden_width", "must be at least 1")?;
        require(t.control_dt > 0.0, "[training].control_dt", "must be positive")?;
        require(
            t.physics_substeps >= 1,
            "[training].physics_substeps",
            "must be at least 1",
        )?;
        require(t.spin_up_secs >= 0.0, "[training].spin_up_secs", "must be non-negative")?;
        require(t.power_window_secs > 0.0, "[training].power_window_secs", "must be positive")?;
        require(t.obs_window_secs > 0.0, "[training].obs_window_secs", "must be positive")?;
        require(t.del_window_secs > 0.0, "[training].del_window_secs", "must be positive")?;
        require(t.ws_norm_divisor > 0.0, "[training].ws_norm_divisor", "must be positive")?;
        require(
            t.angle_norm_divisor > 0.0,
            "[training].angle_norm_divisor",
            "must be positive",
        )?;
        Ok(())
    }

    /// Canonical TOML serialization (used for config hashing in manifests).
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

fn require(ok: bool, field: &str, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, message))
    }
}
