//! Rainflow counting from first principles: turning points, closed cycles,
//! the residual, and the damage-equivalent load (DEL) they imply — first on
//! a tiny hand-checkable signal, then on a noisy synthetic load series.
//!
//! Run with `cargo run --example rainflow_demo`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use windsteer::loads::{rainflow_cycles, rainflow_del, turning_points};

fn main() {
    // A classic textbook sequence: the inner reversal 1 -> 4 closes a full
    // cycle; the outer sweep remains as half cycles.
    let series = [0.0, 5.0, 1.0, 4.0, 0.0];
    println!("signal: {series:?}");
    println!("turning points: {:?}", turning_points(&series));
    println!("cycles (range x count):");
    for c in rainflow_cycles(&series) {
        println!("  {:>5.1} x {:.1}", c.range, c.count);
    }

    // DEL = (sum count * range^m / n_ref)^(1/m): the amplitude of a single
    // sinusoid that, repeated n_ref times, does the same fatigue damage.
    let m = 10.0;
    let del = rainflow_del(&series, m, 1.0);
    println!("DEL (Wohler m = {m}, n_ref = 1): {del:.3}");
    println!("note: the largest range dominates at high m — {del:.3} vs max range 5.0\n");

    // A longer stochastic series: mean load with two sinusoids and noise.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let long: Vec<f64> = (0..600)
        .map(|k| {
            let t = k as f64;
            2000.0
                + 300.0 * (t * 0.11).sin()
                + 120.0 * (t * 0.83).sin()
                + rng.random_range(-40.0..40.0)
        })
        .collect();
    let cycles = rainflow_cycles(&long);
    let n_full: f64 = cycles.iter().map(|c| c.count).sum();
    let biggest = cycles.iter().map(|c| c.range).fold(0.0, f64::max);
    println!("synthetic series: {} samples -> {} turning points", long.len(), turning_points(&long).len());
    println!("  {:.1} equivalent full cycles, largest range {:.1}", n_full, biggest);
    for m in [3.0, 10.0] {
        println!("  DEL at m = {:>4}: {:>8.1}", m, rainflow_del(&long, m, long.len() as f64));
    }
    println!("higher Wohler exponents weight the rare large cycles more heavily.");
}
