//! Engineering wake model: self-similar Gaussian deficits with yaw-induced
//! deflection.
//!
//! A wake is characterized entirely by its source's state at emission —
//! thrust-derived strength and initial deflection angle — plus the downstream
//! distance:
//!
//! - thrust coefficient `Ct(yaw) = ct0 * cos^2(yaw)`
//! - deficit strength consumed by the amplitude formula: `Ct(yaw) * cos(yaw)`
//! - wake width `sigma(x)/D = k * x/D + sigma0` with `k = 0.38 TI + 0.004`
//! - centerline amplitude `a(x) = 1 - sqrt(1 - strength / (8 (sigma/D)^2))`,
//!   with the square-root argument floored (near-wake guard, see
//!   [`MIN_SQRT_ARG`])
//! - initial deflection angle `theta0 = 0.3 * Ct(yaw) * sin(yaw) * cos^2(yaw)`
//!   decaying as `theta(x) = theta0 / (1 + 2 k x/D)^2`, whose closed-form
//!   integral gives the lateral centerline displacement
//! - radial profile `exp(-r^2 / (2 sigma^2))`, fractional deficits from
//!   multiple sources combined root-sum-square and referenced to the mean
//!   inflow speed.
//!
//! The same formulas power both the dynamic packet simulator and the static
//! steady-state solver in this file; the simulator must converge to the
//! static solution under turbulence-free inflow.

use crate::config::FarmConfig;
use crate::sim::rotor::{sensor_offsets, SENSORS_PER_SECTOR};

/// Floor for the amplitude's square-root argument. The self-similar formula
/// is invalid in the near wake, where its argument can go negative (e.g. low
/// TI at a few diameters downstream); flooring at 0.04 caps the centerline
/// deficit at 80% of the mean speed.
pub const MIN_SQRT_ARG: f64 = 0.04;

/// Wake-model coefficients for one inflow condition.
#[derive(Debug, Clone, Copy)]
pub struct WakeModel {
    /// Rotor diameter, m.
    pub diameter: f64,
    /// Thrust coefficient at zero yaw.
    pub ct0: f64,
    /// Wake expansion rate (dimensionless).
    pub k: f64,
    /// Wake width at the rotor plane, as sigma/D.
    pub sigma0: f64,
    /// Lateral deflection sign convention for positive yaw.
    pub deflection_sign: f64,
}

impl WakeModel {
    /// Builds the model from farm configuration and ambient TI.
    pub fn from_config(farm: &FarmConfig, ti: f64) -> Self {
        Self {
            diameter: farm.rotor_diameter,
            ct0: farm.ct0,
            k: farm.wake_k_ti * ti + farm.wake_k0,
            sigma0: farm.wake_sigma0,
            deflection_sign: farm.deflection_sign,
        }
    }

    /// Thrust coefficient at a yaw offset, `ct0 * cos^2(yaw)`.
    pub fn thrust_coefficient(&self, yaw_deg: f64) -> f64 {
        let c = yaw_deg.to_radians().cos();
        self.ct0 * c * c
    }

    /// Deficit strength carried by a wake emitted at this yaw:
    /// `Ct(yaw) * cos(yaw)`.
    pub fn strength(&self, yaw_deg: f64) -> f64 {
        self.thrust_coefficient(yaw_deg) * yaw_deg.to_radians().cos()
    }

    /// Wake width sigma/D at downstream distance `dx` m.
    pub fn sigma_over_d(&self, dx: f64) -> f64 {
        self.k * dx / self.diameter + self.sigma0
    }

    /// Centerline fractional deficit at downstream distance `dx`.
    pub fn amplitude(&self, strength: f64, dx: f64) -> f64 {
        let s = self.sigma_over_d(dx);
        let arg = 1.0 - strength / (8.0 * s * s);
        1.0 - arg.max(MIN_SQRT_ARG).sqrt()
    }

    /// Initial deflection angle, radians (signed by yaw; the configured sign
    /// convention is applied in [`WakeModel::lateral_deflection`]).
    pub fn initial_deflection(&self, yaw_deg: f64) -> f64 {
        let g = yaw_deg.to_radians();
        0.3 * self.thrust_coefficient(yaw_deg) * g.sin() * g.cos() * g.cos()
    }

    /// Lateral centerline displacement at downstream distance `dx`, m:
    /// the closed-form integral of `theta0 / (1 + 2 k x/D)^2`.
    pub fn lateral_deflection(&self, theta0: f64, dx: f64) -> f64 {
        let scaled = 2.0 * self.k * dx / self.diameter;
        let y = if scaled.abs() < 1e-9 {
            // k -> 0 limit: straight propagation at theta0.
            theta0 * dx
        } else {
            theta0 * self.diameter / (2.0 * self.k) * (1.0 - 1.0 / (1.0 + scaled))
        };
        self.deflection_sign * y
    }

    /// Fractional deficit of one wake at a point `dx` m downstream of its
    /// source, offset `(dy, dz)` m from the deflected, meander-shifted wake
    /// center.
    ///
    /// `dy` is measured from the source rotor center; `center_offset` is the
    /// wake centerline's lateral displacement (deflection plus meander).
    pub fn deficit_fraction(
        &self,
        strength: f64,
        theta0: f64,
        meander: f64,
        dx: f64,
        dy: f64,
        dz: f64,
    ) -> f64 {
        if dx <= 0.0 {
            return 0.0;
        }
        let a = self.amplitude(strength, dx);
        let center = self.lateral_deflection(theta0, dx) + meander;
        let sigma = self.sigma_over_d(dx) * self.diameter;
        let r2 = (dy - center).powi(2) + dz * dz;
        a * (-r2 / (2.0 * sigma * sigma)).exp()
    }
}

/// Combines fractional deficits from several sources: root-sum-square,
/// capped at 1 (the flow cannot reverse).
pub fn combine_deficits(fractions: &[f64]) -> f64 {
    let ss: f64 = fractions.iter().map(|f| f * f).sum();
    ss.sqrt().min(1.0)
}

/// Closed-form steady-state rotor-effective wind speeds under turbulence-free
/// inflow: every upstream wake evaluated directly at the standard 60 sensor
/// points of each rotor, root-sum-square superposed. This is the convergence
/// target for the dynamic packet simulator and the physics behind the
/// static-yaw grid search.
pub fn static_rotor_speeds(
    model: &WakeModel,
    positions: &[[f64; 2]],
    yaws_deg: &[f64],
    ws: f64,
) -> Vec<f64> {
    assert_eq!(positions.len(), yaws_deg.len(), "one yaw per turbine");
    let offsets = sensor_offsets(model.diameter / 2.0);
    let n = positions.len();
    let sources: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|i| {
            (
                positions[i][0],
                positions[i][1],
                model.strength(yaws_deg[i]),
                model.initial_deflection(yaws_deg[i]),
            )
        })
        .collect();

    (0..n)
        .map(|j| {
            let mut total = 0.0;
            let mut count = 0usize;
            for sector in &offsets {
                for &[dy, dz] in sector.iter().take(SENSORS_PER_SECTOR) {
                    let py = positions[j][1] + dy;
                    let mut fracs = Vec::with_capacity(n);
                    for &(sx, sy, strength, theta0) in &sources {
                        let dx = positions[j][0] - sx;
                        if dx > 0.0 {
                            fracs.push(model.deficit_fraction(
                                strength,
                                theta0,
                                0.0,
                                dx,
                                py - sy,
                                dz,
                            ));
                        }
                    }
                    total += ws * (1.0 - combine_deficits(&fracs));
                    count += 1;
                }
            }
            total / count as f64
        })
        .collect()
}
