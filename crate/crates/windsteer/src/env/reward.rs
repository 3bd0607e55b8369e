//! Reward shaping: power gain against the lockstep baseline plus a one-sided
//! load-constraint penalty.

/// Lower bound on the total reward; caps the damage a pathological load
/// excursion can do to the critic targets.
pub const REWARD_FLOOR: f64 = -10.0;

/// One step's reward, split into its parts (all agents share the same farm
/// -level signal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardComponents {
    /// Windowed farm power ratio minus one.
    pub power: f64,
    /// One-sided constraint penalty (zero or negative).
    pub penalty: f64,
    /// `max(power + penalty, REWARD_FLOOR)`.
    pub total: f64,
    /// Worst-turbine DEL ratio minus one (logged even when unconstrained).
    pub load_delta: f64,
}

/// Combines the windowed power means and the load metric into a reward.
///
/// `threshold` is the allowed load increase (`None` disables the penalty);
/// the penalty is `alpha * (threshold - load_delta)` — strictly negative —
/// only while `load_delta` exceeds the threshold.
pub fn reward_components(
    mean_power_agent: f64,
    mean_power_baseline: f64,
    load_delta: f64,
    threshold: Option<f64>,
    alpha: f64,
) -> RewardComponents {
    let power = if mean_power_baseline > 0.0 {
        mean_power_agent / mean_power_baseline - 1.0
    } else {
        0.0
    };
    let penalty = match threshold {
        Some(limit) if load_delta > limit => alpha * (limit - load_delta),
        _ => 0.0,
    };
    RewardComponents {
        power,
        penalty,
        total: (power + penalty).max(REWARD_FLOOR),
        load_delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_term_is_ratio_minus_one() {
        let r = reward_components(1.05e6, 1.0e6, 0.0, Some(0.2), 1.0);
        assert!((r.power - 0.05).abs() < 1e-12);
        assert_eq!(r.penalty, 0.0);
        assert!((r.total - 0.05).abs() < 1e-12);
    }

    #[test]
    fn penalty_is_one_sided_at_the_threshold() {
        // At or below the threshold: no penalty.
        assert_eq!(reward_components(1.0, 1.0, 0.2, Some(0.2), 1.0).penalty, 0.0);
        assert_eq!(reward_components(1.0, 1.0, -0.5, Some(0.2), 1.0).penalty, 0.0);
        // Above: alpha * (threshold - delta), i.e. negative and linear.
        let r = reward_components(1.0, 1.0, 0.35, Some(0.2), 2.0);
        assert!((r.penalty - 2.0 * (0.2 - 0.35)).abs() < 1e-12);
        assert!((r.total - r.penalty).abs() < 1e-12, "power term is zero here");
    }

    #[test]
    fn unconstrained_mode_never_penalizes() {
        let r = reward_components(0.9, 1.0, 5.0, None, 1.0);
        assert_eq!(r.penalty, 0.0);
        assert!((r.total - (-0.1)).abs() < 1e-12);
        assert_eq!(r.load_delta, 5.0, "delta is still reported for logging");
    }

    #[test]
    fn total_is_floored() {
        let r = reward_components(1.0, 1.0, 100.0, Some(0.2), 1.0);
        assert!(r.penalty < REWARD_FLOOR);
        assert_eq!(r.total, REWARD_FLOOR);
    }

    #[test]
    fn degenerate_baseline_power_is_neutral() {
        assert_eq!(reward_components(1.0, 0.0, 0.0, None, 1.0).power, 0.0);
    }
}
