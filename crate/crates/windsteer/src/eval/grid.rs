//! Brute-force static-yaw optimizer: exhaustively evaluates steady farm
//! power over a yaw grid under laminar inflow. Serves as the ground-truth
//! ceiling that learned policies are measured against.

use serde::{Deserialize, Serialize};

use crate::config::FarmConfig;
use crate::sim::{static_rotor_speeds, turbine_power, WakeModel};

/// Exhaustive steady-power scan over upstream yaw combinations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSearchResult {
    /// Grid spacing, degrees.
    pub step_deg: f64,
    /// Swept angles for each steered turbine (the last turbine stays at 0).
    pub axis: Vec<f64>,
    /// Every evaluated yaw vector, full farm length.
    pub yaws: Vec<Vec<f64>>,
    /// Steady farm power per yaw vector, W.
    pub farm_power: Vec<f64>,
    /// Farm power with all yaws at zero, W.
    pub baseline_power: f64,
    /// Yaw vector with the highest farm power.
    pub best_yaws: Vec<f64>,
    /// Farm power of `best_yaws`, W.
    pub best_power: f64,
    /// Fractional power gain of the optimum over zero yaw.
    pub gain: f64,
}

/// Farm power with every rotor's effective speed from the steady wake
/// superposition (laminar inflow, ti = 0).
fn steady_farm_power(model: &WakeModel, farm: &FarmConfig, positions: &[[f64; 2]], yaws: &[f64], ws: f64) -> f64 {
    static_rotor_speeds(model, positions, yaws, ws)
        .iter()
        .zip(yaws)
        .map(|(&u, &y)| turbine_power(u, y, farm))
        .sum()
}

/// Sweeps all turbines except the most downstream one over a symmetric yaw
/// grid (0, ±step, ±2·step, … up to the yaw limit) and returns every
/// evaluated combination plus the argmax.
///
/// Cost grows as axis^(n-1); the default three-turbine row at 5° spacing is
/// 169 steady solves. Deterministic: combinations are enumerated in
/// ascending order and ties keep the first maximum.
pub fn grid_search_oracle(farm: &FarmConfig, ws: f64, step_deg: f64) -> GridSearchResult {
    assert!(step_deg > 0.0, "grid step must be positive, got {step_deg}");
    assert!(farm.n_turbines >= 1, "grid search needs at least one turbine");
    let n = farm.n_turbines;
    let positions = farm.turbine_positions();
    let model = WakeModel::from_config(farm, 0.0);

    let half = (farm.yaw_limit / step_deg).floor() as i64;
    let axis: Vec<f64> = (-half..=half).map(|k| k as f64 * step_deg).collect();

    let swept = n - 1;
    let combos = axis.len().pow(swept as u32);
    let mut yaws_list = Vec::with_capacity(combos);
    let mut power_list = Vec::with_capacity(combos);
    let baseline_power = steady_farm_power(&model, farm, &positions, &vec![0.0; n], ws);
    let mut best = (vec![0.0; n], baseline_power);

    let mut counter = vec![0usize; swept.max(1)];
    for _ in 0..combos {
        let mut yaws = vec![0.0; n];
        for d in 0..swept {
            yaws[d] = axis[counter[d]];
        }
        let power = steady_farm_power(&model, farm, &positions, &yaws, ws);
        if power > best.1 {
            best = (yaws.clone(), power);
        }
        yaws_list.push(yaws);
        power_list.push(power);
        // Odometer increment, last swept turbine fastest.
        for d in (0..swept).rev() {
            counter[d] += 1;
            if counter[d] < axis.len() {
                break;
            }
            counter[d] = 0;
        }
    }

    let gain = best.1 / baseline_power - 1.0;
    assert!(gain >= 0.0, "zero yaw is in the grid, so the optimum cannot lose to it");
    GridSearchResult {
        step_deg,
        axis,
        yaws: yaws_list,
        farm_power: power_list,
        baseline_power,
        best_yaws: best.0,
        best_power: best.1,
        gain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_yaw_entry_reproduces_the_baseline_exactly() {
        let farm = FarmConfig::default();
        let r = grid_search_oracle(&farm, 10.0, 15.0);
        let zero_idx = r
            .yaws
            .iter()
            .position(|y| y.iter().all(|&v| v == 0.0))
            .expect("zero vector must be in the grid");
        assert_eq!(
            r.farm_power[zero_idx].to_bits(),
            r.baseline_power.to_bits(),
            "all-zero combination is the baseline"
        );
    }

    #[test]
    fn optimum_steers_the_upstream_turbine_away_from_zero() {
        let farm = FarmConfig::default();
        let r = grid_search_oracle(&farm, 10.0, 5.0);
        assert_eq!(r.axis.len(), 13, "default limit and 5 degree step give 13 angles");
        assert_eq!(r.yaws.len(), 169);
        assert!(r.gain > 0.0, "steering gain must be strictly positive, got {}", r.gain);
        assert!(r.best_yaws[0] != 0.0, "upstream turbine must steer, got {:?}", r.best_yaws);
        assert_eq!(r.best_yaws[2], 0.0, "downstream turbine is never swept");
    }

    #[test]
    fn flipping_the_deflection_convention_mirrors_the_optimum() {
        let mut farm = FarmConfig::default();
        let plus = grid_search_oracle(&farm, 10.0, 10.0);
        farm.deflection_sign = -1.0;
        let minus = grid_search_oracle(&farm, 10.0, 10.0);
        let mirrored: Vec<f64> = plus.best_yaws.iter().map(|y| -y).collect();
        assert_eq!(minus.best_yaws, mirrored, "pure power model is mirror symmetric");
        assert!((minus.gain - plus.gain).abs() < 1e-12);
    }

    #[test]
    fn single_turbine_grid_degenerates_to_the_baseline() {
        let mut farm = FarmConfig::default();
        farm.n_turbines = 1;
        let r = grid_search_oracle(&farm, 10.0, 5.0);
        assert_eq!(r.yaws.len(), 1, "nothing to sweep");
        assert_eq!(r.gain, 0.0);
        assert_eq!(r.best_yaws, vec![0.0]);
    }
}
