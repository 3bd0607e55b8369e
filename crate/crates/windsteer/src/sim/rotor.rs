//! Rotor-disk sensor geometry, sector statistics, power extraction, and the
//! rate-limited yaw actuator.
//!
//! Each rotor carries 60 fixed virtual anemometers: 4 quadrant sectors
//! (left, right, top, bottom) x 15 sensors each, arranged 3 radii x 5
//! azimuths. "Left" is the +y side looking downwind. The layout is frozen:
//! radii at {0.3, 0.6, 0.9} of the rotor radius, azimuths at the sector
//! center ±{36, 18, 0} degrees.

use crate::config::FarmConfig;

/// Sector indices into all per-sector arrays.
pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;
pub const TOP: usize = 2;
pub const BOTTOM: usize = 3;

/// Sensors per sector (3 radii x 5 azimuths).
pub const SENSORS_PER_SECTOR: usize = 15;
/// Total sensors per rotor.
pub const SENSORS_PER_ROTOR: usize = 4 * SENSORS_PER_SECTOR;

/// Radial sensor positions as fractions of the rotor radius.
const RADIUS_FRACTIONS: [f64; 3] = [0.3, 0.6, 0.9];
/// Azimuth offsets from the sector center, degrees.
const AZIMUTH_OFFSETS: [f64; 5] = [-36.0, -18.0, 0.0, 18.0, 36.0];
/// Sector center azimuths, degrees from +z (top), positive toward +y.
const SECTOR_CENTERS: [f64; 4] = [90.0, 270.0, 0.0, 180.0];

/// Fixed (dy, dz) sensor offsets from the rotor center, m, grouped by sector.
pub fn sensor_offsets(rotor_radius: f64) -> [[[f64; 2]; SENSORS_PER_SECTOR]; 4] {
    let mut out = [[[0.0; 2]; SENSORS_PER_SECTOR]; 4];
    for (s, &center) in SECTOR_CENTERS.iter().enumerate() {
        let mut k = 0;
        for &rf in &RADIUS_FRACTIONS {
            for &daz in &AZIMUTH_OFFSETS {
                let az = (center + daz).to_radians();
                out[s][k] = [rotor_radius * rf * az.sin(), rotor_radius * rf * az.cos()];
                k += 1;
            }
        }
    }
    out
}

/// Per-rotor sensor statistics at one instant.
#[derive(Debug, Clone)]
pub struct SectorSamples {
    /// Pointwise streamwise speeds, m/s, grouped by sector.
    pub samples: [[f64; SENSORS_PER_SECTOR]; 4],
    /// Arithmetic mean speed per sector, m/s.
    pub sector_ws: [f64; 4],
    /// Spatial turbulence-intensity estimate per sector: std/mean of the 15
    /// sensors (0 when the mean vanishes).
    pub sector_ti: [f64; 4],
    /// Rotor-effective wind speed: mean of all 60 sensors, m/s.
    pub rotor_ws: f64,
    /// Mean transverse (v) velocity over all 60 sensors, m/s; used for local
    /// wind-direction estimates.
    pub rotor_v: f64,
}

impl SectorSamples {
    /// Builds the statistics from raw per-sector speed samples plus the mean
    /// transverse velocity.
    pub fn from_samples(samples: [[f64; SENSORS_PER_SECTOR]; 4], rotor_v: f64) -> Self {
        let mut sector_ws = [0.0; 4];
        let mut sector_ti = [0.0; 4];
        let mut total = 0.0;
        for s in 0..4 {
            let mean = samples[s].iter().sum::<f64>() / SENSORS_PER_SECTOR as f64;
            let var = samples[s].iter().map(|&v| (v - mean).powi(2)).sum::<f64>()
                / SENSORS_PER_SECTOR as f64;
            sector_ws[s] = mean;
            sector_ti[s] = if mean > 1e-12 { var.sqrt() / mean } else { 0.0 };
            total += mean;
        }
        Self { samples, sector_ws, sector_ti, rotor_ws: total / 4.0, rotor_v }
    }

    /// All-zero placeholder (pre-spin-up).
    pub fn zeros() -> Self {
        Self {
            samples: [[0.0; SENSORS_PER_SECTOR]; 4],
            sector_ws: [0.0; 4],
            sector_ti: [0.0; 4],
            rotor_ws: 0.0,
            rotor_v: 0.0,
        }
    }
}

/// Instantaneous electrical power, W: `min(rated, 1/2 rho A Cp u^3 cos^p(yaw))`.
///
/// Monotone non-increasing in |yaw| at fixed wind speed.
pub fn turbine_power(u_eff: f64, yaw_deg: f64, farm: &FarmConfig) -> f64 {
    if u_eff <= 0.0 {
        return 0.0;
    }
    let area = std::f64::consts::PI * (farm.rotor_diameter / 2.0).powi(2);
    let aero = 0.5
        * farm.air_density
        * area
        * farm.cp
        * u_eff.powi(3)
        * yaw_deg.to_radians().cos().powf(farm.power_yaw_exponent);
    aero.min(farm.rated_power)
}

/// Rate-limited, bound-clamped yaw actuation over one control interval.
///
/// The command is clamped into [-limit, limit] first (out-of-range commands
/// are not an error), then the yaw moves toward it by at most
/// `rate * dt_control` degrees.
pub fn apply_yaw_command(
    current: f64,
    command: f64,
    rate: f64,
    limit: f64,
    dt_control: f64,
) -> f64 {
    let target = command.clamp(-limit, limit);
    let max_move = rate * dt_control;
    let stepped = current + (target - current).clamp(-max_move, max_move);
    stepped.clamp(-limit, limit)
}
