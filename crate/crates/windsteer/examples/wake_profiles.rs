//! Steady wake anatomy: thrust vs yaw, deficit decay and width growth
//! downstream, lateral deflection under yaw, and the farm-level power
//! tradeoff that makes wake steering worthwhile.
//!
//! Run with `cargo run --example wake_profiles`.

use windsteer::config::FarmConfig;
use windsteer::sim::{static_rotor_speeds, turbine_power, WakeModel};

fn main() {
    let farm = FarmConfig::default();
    let ws = 8.0;
    let ti = 0.06;
    let model = WakeModel::from_config(&farm, ti);
    let d = farm.rotor_diameter;

    println!("thrust coefficient under yaw (Ct0 = {}):", farm.ct0);
    println!("  {:>8} {:>8}", "yaw", "Ct");
    for yaw in [0.0, 10.0, 20.0, 30.0] {
        println!("  {yaw:>8.0} {:>8.4}", model.thrust_coefficient(yaw));
    }

    println!("\ncenterline deficit and wake width vs downstream distance:");
    println!(
        "  {:>6} {:>16} {:>16} {:>10}",
        "x/D", "deficit (yaw 0)", "deficit (yaw 25)", "sigma/D"
    );
    let s0 = model.strength(0.0);
    let s25 = model.strength(25.0);
    for xd in [2.0, 4.0, 6.0, 8.0, 10.0] {
        let dx = xd * d;
        println!(
            "  {xd:>6.0} {:>16.4} {:>16.4} {:>10.4}",
            model.amplitude(s0, dx),
            model.amplitude(s25, dx),
            model.sigma_over_d(dx)
        );
    }

    println!("\nlateral wake-center deflection of a 25-degree yawed rotor:");
    let theta0 = model.initial_deflection(25.0);
    println!("  initial skew angle: {:.2} deg", theta0.to_degrees());
    println!("  {:>6} {:>14}", "x/D", "offset / D");
    for xd in [2.0, 4.0, 6.0, 8.0, 10.0] {
        let dy = model.lateral_deflection(theta0, xd * d);
        println!("  {xd:>6.0} {:>14.3}", dy / d);
    }

    // The farm-level tradeoff: steering the upstream turbines loses a
    // little power locally (cos^p) but displaces their wakes off the
    // downstream rotors, gaining more than it costs.
    let positions = farm.turbine_positions();
    let greedy = vec![0.0; farm.n_turbines];
    let steered = {
        let mut y = vec![0.0; farm.n_turbines];
        for (i, v) in y.iter_mut().enumerate() {
            // Simple schedule: strong steering upstream, none at the back.
            let remaining = farm.n_turbines - 1 - i;
            *v = 25.0_f64.min(12.5 * remaining as f64);
        }
        y
    };

    for (label, yaws) in [("greedy (all zero)", &greedy), ("steered", &steered)] {
        let speeds = static_rotor_speeds(&model, &positions, yaws, ws);
        let powers: Vec<f64> = speeds
            .iter()
            .zip(yaws)
            .map(|(&u, &yaw)| turbine_power(u, yaw, &farm))
            .collect();
        let total: f64 = powers.iter().sum();
        println!("\n{label}: yaws {yaws:?}");
        println!(
            "  rotor speeds [m/s]: {}",
            speeds.iter().map(|u| format!("{u:.3}")).collect::<Vec<_>>().join("  ")
        );
        println!(
            "  power [MW]:         {}   farm {:.4} MW",
            powers.iter().map(|p| format!("{:.4}", p / 1e6)).collect::<Vec<_>>().join("  "),
            total / 1e6
        );
    }

    let p_greedy: f64 = static_rotor_speeds(&model, &positions, &greedy, ws)
        .iter()
        .zip(&greedy)
        .map(|(&u, &yaw)| turbine_power(u, yaw, &farm))
        .sum();
    let p_steered: f64 = static_rotor_speeds(&model, &positions, &steered, ws)
        .iter()
        .zip(&steered)
        .map(|(&u, &yaw)| turbine_power(u, yaw, &farm))
        .sum();
    println!("\nsteering gain: {:+.2}%", 100.0 * (p_steered / p_greedy - 1.0));
}
