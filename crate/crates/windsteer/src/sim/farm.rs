//! Dynamic multi-turbine flow simulation.
//!
//! Each turbine continuously emits wake packets that advect downstream at the
//! local mean speed (excluding the packet's own wake), carry the emission-time
//! thrust state and deflection angle, and meander laterally under low-passed
//! transverse turbulence. Rotor sensors then see the instantaneous freestream
//! minus the superposed Gaussian deficits of every strictly-upstream wake,
//! which yields finite-speed propagation of control actions: a yaw change at
//! an unwaked turbine reaches a rotor 6 diameters downstream only after
//! 6D / ws seconds.
//!
//! The wake state between two packets is interpolated from their emission
//! states, so under turbulence-free inflow with constant yaw the simulation
//! converges exactly to the static closed-form superposition of
//! [`crate::sim::wake::static_rotor_speeds`].

use std::collections::VecDeque;
use std::sync::Arc;

use crate::config::Config;
use crate::config::FarmConfig;
use crate::sim::rotor::{
    apply_yaw_command, sensor_offsets, turbine_power, SectorSamples, SENSORS_PER_SECTOR,
};
use crate::sim::turbulence::{freestream_at, TurbulenceBox};
use crate::sim::wake::WakeModel;

/// Advection speed floor, as a fraction of the mean wind speed; keeps deeply
/// waked packets moving.
const MIN_ADVECTION_FRACTION: f64 = 0.1;

/// Wake run-out beyond the last rotor before packets are discarded, in rotor
/// diameters.
const EXIT_MARGIN_DIAMETERS: f64 = 2.0;

/// One emitted wake element: the source's state frozen at emission plus the
/// packet's evolving downstream position and meander displacement.
#[derive(Debug, Clone)]
pub struct WakePacket {
    /// Emitting turbine index.
    pub source: usize,
    /// Simulation time of emission, s.
    pub emit_time: f64,
    /// Yaw offset of the source at emission, degrees.
    pub yaw_at_emit: f64,
    /// Thrust-derived deficit strength at emission (cached from yaw).
    pub strength: f64,
    /// Initial deflection angle at emission, radians (cached from yaw).
    pub theta0: f64,
    /// Meander displacement of the wake centerline, m.
    pub lateral_offset: f64,
    /// Low-pass-filtered transverse velocity driving the meander, m/s.
    v_filtered: f64,
    /// Current downstream location, m (world frame).
    pub x_position: f64,
}

/// Dynamic simulation state of one farm on one turbulence box.
pub struct Farm {
    farm_cfg: FarmConfig,
    model: WakeModel,
    positions: Vec<[f64; 2]>,
    hub: f64,
    offsets: [[[f64; 2]; SENSORS_PER_SECTOR]; 4],
    ws: f64,
    meander_tau: f64,
    exit_x: f64,
    tbox: Arc<TurbulenceBox>,
    /// Advection phase shift: the box is sampled at `t + t_offset`.
    t_offset: f64,
    t: f64,
    yaw: Vec<f64>,
    /// Per-source packet trains; front = oldest = furthest downstream.
    trains: Vec<VecDeque<WakePacket>>,
    sectors: Vec<SectorSamples>,
    power: Vec<f64>,
}

impl Farm {
    /// Builds a farm at zero yaw on the given box; sensors are sampled
    /// immediately so the state is valid before the first step.
    pub fn new(cfg: &Config, tbox: Arc<TurbulenceBox>) -> Self {
        let positions = cfg.farm.turbine_positions();
        let max_x = positions.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let n = positions.len();
        let mut farm = Self {
            model: WakeModel::from_config(&cfg.farm, cfg.inflow.ti),
            offsets: sensor_offsets(cfg.farm.rotor_diameter / 2.0),
            hub: cfg.farm.hub_height,
            ws: cfg.inflow.ws,
            meander_tau: cfg.farm.meander_tau,
            exit_x: max_x + EXIT_MARGIN_DIAMETERS * cfg.farm.rotor_diameter,
            positions,
            farm_cfg: cfg.farm.clone(),
            tbox,
            t_offset: 0.0,
            t: 0.0,
            yaw: vec![0.0; n],
            trains: (0..n).map(|_| VecDeque::new()).collect(),
            sectors: vec![SectorSamples::zeros(); n],
            power: vec![0.0; n],
        };
        farm.resample();
        farm
    }

    /// Clears all wake and yaw state and rebinds the farm to a (possibly new)
    /// box with an advection phase shift, then resamples.
    pub fn reset(&mut self, tbox: Arc<TurbulenceBox>, t_offset: f64) {
        self.tbox = tbox;
        self.t_offset = t_offset;
        self.t = 0.0;
        self.yaw.iter_mut().for_each(|y| *y = 0.0);
        self.trains.iter_mut().for_each(|tr| tr.clear());
        self.resample();
    }

    pub fn n_turbines(&self) -> usize {
        self.positions.len()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn yaw(&self) -> &[f64] {
        &self.yaw
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn sectors(&self, turbine: usize) -> &SectorSamples {
        &self.sectors[turbine]
    }

    pub fn packet_count(&self) -> usize {
        self.trains.iter().map(|t| t.len()).sum()
    }

    pub fn packets(&self, source: usize) -> impl Iterator<Item = &WakePacket> {
        self.trains[source].iter()
    }

    /// Applies one control interval of yaw commands through the rate-limited
    /// actuator. Commands are clamped into the yaw bounds.
    pub fn command_yaw(&mut self, commands: &[f64], dt_control: f64) {
        assert_eq!(commands.len(), self.yaw.len(), "one command per turbine");
        for (yaw, &cmd) in self.yaw.iter_mut().zip(commands) {
            *yaw = apply_yaw_command(
                *yaw,
                cmd,
                self.farm_cfg.yaw_rate_limit,
                self.farm_cfg.yaw_limit,
                dt_control,
            );
        }
    }

    /// Advances one physics substep: advect and meander packets, emit new
    /// packets at the current yaw state, resample all rotors, recompute power.
    pub fn step(&mut self, dt: f64) {
        let n = self.positions.len();
        let box_t = self.t + self.t_offset;

        // Phase 1 (read-only): next position / meander state per packet, all
        // computed from the pre-step state so source order cannot matter.
        let mut updates: Vec<Vec<(f64, f64, f64)>> = Vec::with_capacity(n);
        for s in 0..n {
            let mut per_train = Vec::with_capacity(self.trains[s].len());
            for p in &self.trains[s] {
                let y = self.positions[s][1] + p.lateral_offset;
                let deficit = self.deficit_at(p.x_position, y, self.hub, Some(s));
                let speed = self.ws * (1.0 - deficit).max(MIN_ADVECTION_FRACTION);
                let v_sample =
                    freestream_at(&self.tbox, self.ws, box_t, [p.x_position, y, self.hub])[1];
                let v_filtered = p.v_filtered + dt / self.meander_tau * (v_sample - p.v_filtered);
                let offset = p.lateral_offset + v_filtered * dt;
                per_train.push((p.x_position + speed * dt, v_filtered, offset));
            }
            updates.push(per_train);
        }

        // Phase 2: apply updates, keep downstream ordering (a trailing packet
        // may not overtake the one ahead), discard packets past the exit
        // plane, emit the new packet.
        self.t += dt;
        let box_t_new = self.t + self.t_offset;
        for s in 0..n {
            let train = &mut self.trains[s];
            for (p, &(x, v_f, off)) in train.iter_mut().zip(&updates[s]) {
                p.x_position = x;
                p.v_filtered = v_f;
                p.lateral_offset = off;
            }
            for i in 1..train.len() {
                let bound = train[i - 1].x_position - 1e-9;
                if train[i].x_position > bound {
                    train[i].x_position = bound;
                }
            }
            while train.front().is_some_and(|p| p.x_position > self.exit_x) {
                train.pop_front();
            }

            let (sx, sy) = (self.positions[s][0], self.positions[s][1]);
            let yaw = self.yaw[s];
            let v_at_rotor = freestream_at(&self.tbox, self.ws, box_t_new, [sx, sy, self.hub])[1];
            train.push_back(WakePacket {
                source: s,
                emit_time: self.t,
                yaw_at_emit: yaw,
                strength: self.model.strength(yaw),
                theta0: self.model.initial_deflection(yaw),
                lateral_offset: 0.0,
                v_filtered: v_at_rotor,
                x_position: sx,
            });
        }

        self.resample();
    }

    /// Runs the simulator for `secs` at substep `dt` without control changes.
    pub fn spin_up(&mut self, secs: f64, dt: f64) {
        let steps = (secs / dt).round() as usize;
        for _ in 0..steps {
            self.step(dt);
        }
    }

    /// Root-sum-square fractional deficit from every wake train strictly
    /// upstream of the query point; `exclude` skips one source (a packet must
    /// not be slowed by its own wake).
    fn deficit_at(&self, x: f64, y: f64, z: f64, exclude: Option<usize>) -> f64 {
        let mut ss = 0.0;
        for s in 0..self.positions.len() {
            if Some(s) == exclude {
                continue;
            }
            let f = self.train_deficit(s, x, y, z);
            ss += f * f;
        }
        ss.sqrt().min(1.0)
    }

    /// Fractional deficit of source `s`'s wake at a point: the emission state
    /// is interpolated between the two packets bracketing the query x, then
    /// evaluated by the closed-form wake shape at the geometric downstream
    /// distance. Ahead of the oldest packet the wake has not yet arrived, so
    /// the deficit is zero (causality).
    fn train_deficit(&self, s: usize, x: f64, y: f64, z: f64) -> f64 {
        let train = &self.trains[s];
        let sx = self.positions[s][0];
        let dx = x - sx;
        if dx <= 0.0 || train.is_empty() {
            return 0.0;
        }
        let front = train.front().expect("non-empty");
        if x > front.x_position {
            return 0.0;
        }
        // Packets are ordered by decreasing x; find the first strictly behind
        // the query point.
        let idx = train.partition_point(|p| p.x_position >= x);
        let (strength, theta0, offset) = if idx == train.len() {
            // Between the rotor plane and the newest packet: use its state.
            let p = train.back().expect("non-empty");
            (p.strength, p.theta0, p.lateral_offset)
        } else {
            let ahead = &train[idx - 1];
            let behind = &train[idx];
            let span = ahead.x_position - behind.x_position;
            let w = if span > 1e-12 { (x - behind.x_position) / span } else { 0.0 };
            (
                behind.strength + w * (ahead.strength - behind.strength),
                behind.theta0 + w * (ahead.theta0 - behind.theta0),
                behind.lateral_offset + w * (ahead.lateral_offset - behind.lateral_offset),
            )
        };
        self.model.deficit_fraction(
            strength,
            theta0,
            offset,
            dx,
            y - self.positions[s][1],
            z - self.hub,
        )
    }

    /// Recomputes all rotor sensor statistics and powers at the current time.
    fn resample(&mut self) {
        let box_t = self.t + self.t_offset;
        for j in 0..self.positions.len() {
            let (xj, yj) = (self.positions[j][0], self.positions[j][1]);
            let mut samples = [[0.0; SENSORS_PER_SECTOR]; 4];
            let mut v_sum = 0.0;
            for s in 0..4 {
                for k in 0..SENSORS_PER_SECTOR {
                    let [dy, dz] = self.offsets[s][k];
                    let point = [xj, yj + dy, self.hub + dz];
                    let free = freestream_at(&self.tbox, self.ws, box_t, point);
                    let deficit = self.deficit_at(point[0], point[1], point[2], Some(j));
                    samples[s][k] = (free[0] - self.ws * deficit).max(0.0);
                    v_sum += free[1];
                }
            }
            self.sectors[j] =
                SectorSamples::from_samples(samples, v_sum / (4 * SENSORS_PER_SECTOR) as f64);
            self.power[j] = turbine_power(self.sectors[j].rotor_ws, self.yaw[j], &self.farm_cfg);
        }
    }

    /// Instantaneous farm-wide freestream estimate (mean streamwise and
    /// transverse velocity over all rotor centers, wakes excluded); the
    /// "global conditions" observed by every agent.
    pub fn freestream_estimate(&self) -> [f64; 2] {
        let box_t = self.t + self.t_offset;
        let mut u = 0.0;
        let mut v = 0.0;
        for p in &self.positions {
            let f = freestream_at(&self.tbox, self.ws, box_t, [p[0], p[1], self.hub]);
            u += f[0];
            v += f[1];
        }
        let n = self.positions.len() as f64;
        [u / n, v / n]
    }
}
