//! Rainflow cycle counting and damage-equivalent loads.
//!
//! Four-point extraction: a candidate range closes a full cycle when it is
//! bracketed by two larger (or equal) neighbouring ranges; whatever remains
//! on the stack at the end of the series is counted as half cycles (the
//! residual). The DEL collapses the counted spectrum to a single equivalent
//! range at `n_ref` cycles under a Wöhler exponent `m`:
//! DEL = (Σ nᵢ·Sᵢ^m / n_ref)^(1/m).

/// One extracted cycle: `count` is 1.0 for a full cycle, 0.5 for a residual
/// half cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub range: f64,
    pub count: f64,
}

/// Reduces a series to its turning points: endpoints plus strict local
/// extrema, with flat segments collapsed.
pub fn turning_points(series: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::new();
    for &v in series {
        match pts.len() {
            0 => pts.push(v),
            1 => {
                if v != pts[0] {
                    pts.push(v);
                }
            }
            n => {
                if v == pts[n - 1] {
                    continue;
                }
                let prev_up = pts[n - 1] > pts[n - 2];
                let next_up = v > pts[n - 1];
                if prev_up == next_up {
                    // Continuing in the same direction: extend, don't turn.
                    pts[n - 1] = v;
                } else {
                    pts.push(v);
                }
            }
        }
    }
    pts
}

/// Extracts rainflow cycles (full + residual halves) from a load series.
pub fn rainflow_cycles(series: &[f64]) -> Vec<Cycle> {
    let pts = turning_points(series);
    let mut cycles = Vec::new();
    let mut stack: Vec<f64> = Vec::with_capacity(pts.len().min(64));
    for &p in &pts {
        stack.push(p);
        while stack.len() >= 4 {
            let n = stack.len();
            let r1 = (stack[n - 3] - stack[n - 4]).abs();
            let r2 = (stack[n - 2] - stack[n - 3]).abs();
            let r3 = (stack[n - 1] - stack[n - 2]).abs();
            if r2 <= r1 && r2 <= r3 {
                // Inner range is bracketed: close it as a full cycle and
                // splice its two points out of the stack.
                cycles.push(Cycle { range: r2, count: 1.0 });
                stack.remove(n - 2);
                stack.remove(n - 3);
            } else {
                break;
            }
        }
    }
    // Residual: successive ranges count as half cycles.
    for w in stack.windows(2) {
        cycles.push(Cycle { range: (w[1] - w[0]).abs(), count: 0.5 });
    }
    cycles
}

/// Damage-equivalent load of a series at `n_ref` reference cycles with
/// Wöhler exponent `wohler_m`. A constant (or empty) series has DEL 0.
pub fn rainflow_del(series: &[f64], wohler_m: f64, n_ref: f64) -> f64 {
    assert!(wohler_m > 0.0, "Wöhler exponent must be positive");
    assert!(n_ref > 0.0, "reference cycle count must be positive");
    let damage: f64 = rainflow_cycles(series)
        .iter()
        .map(|c| c.count * c.range.powf(wohler_m))
        .sum();
    (damage / n_ref).powf(1.0 / wohler_m)
}
