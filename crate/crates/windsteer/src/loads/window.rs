//! Sliding feature windows for DEL estimation.
//!
//! Each turbine keeps a fixed-capacity ring of per-control-step sensor
//! snapshots (sector speeds, sector TIs, yaw). The DEL features are the
//! arithmetic means over whatever the ring currently holds, so estimates are
//! available from the first sample and converge to full-window means as the
//! ring fills.

use std::collections::VecDeque;

use super::DelFeatures;

#[derive(Debug, Clone, Copy)]
struct Snapshot {
    sector_ws: [f64; 4],
    sector_ti: [f64; 4],
    yaw: f64,
}

/// Per-turbine rings of recent sensor snapshots.
#[derive(Debug, Clone)]
pub struct DelWindowState {
    capacity: usize,
    rings: Vec<VecDeque<Snapshot>>,
}

impl DelWindowState {
    /// `capacity` is the window length in control steps (e.g. 600 s / 10 s = 60).
    pub fn new(n_turbines: usize, capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        Self { capacity, rings: vec![VecDeque::with_capacity(capacity); n_turbines] }
    }

    pub fn n_turbines(&self) -> usize {
        self.rings.len()
    }

    /// Number of snapshots currently held for `turbine`.
    pub fn len(&self, turbine: usize) -> usize {
        self.rings[turbine].len()
    }

    pub fn is_empty(&self, turbine: usize) -> bool {
        self.rings[turbine].is_empty()
    }

    /// Appends one control-step snapshot, evicting the oldest when full.
    pub fn push(&mut self, turbine: usize, sector_ws: [f64; 4], sector_ti: [f64; 4], yaw: f64) {
        let ring = &mut self.rings[turbine];
        if ring.len() == self.capacity {
            ring.pop_front();
        }
        ring.push_back(Snapshot { sector_ws, sector_ti, yaw });
    }

    /// Window-mean features, or `None` while the ring is still empty.
    pub fn features(&self, turbine: usize) -> Option<DelFeatures> {
        let ring = &self.rings[turbine];
        if ring.is_empty() {
            return None;
        }
        let n = ring.len() as f64;
        let mut ws = [0.0; 4];
        let mut ti = [0.0; 4];
        let mut yaw = 0.0;
        for s in ring {
            for k in 0..4 {
                ws[k] += s.sector_ws[k];
                ti[k] += s.sector_ti[k];
            }
            yaw += s.yaw;
        }
        Some(DelFeatures {
            sector_ws: ws.map(|v| v / n),
            sector_ti: ti.map(|v| v / n),
            yaw: yaw / n,
        })
    }

    /// Drops all snapshots (episode reset).
    pub fn clear(&mut self) {
        for ring in &mut self.rings {
            ring.clear();
        }
    }
}

/// Farm load metric: ratio of worst-turbine DELs minus one.
///
/// Positive when the agent's most loaded turbine exceeds the baseline's most
/// loaded turbine; the two maxima may sit on different turbines.
pub fn delta_ratio(agent_dels: &[f64], baseline_dels: &[f64]) -> f64 {
    assert_eq!(
        agent_dels.len(),
        baseline_dels.len(),
        "agent and baseline DEL slices must cover the same turbines"
    );
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let base = max(baseline_dels);
    if base <= 0.0 {
        return 0.0;
    }
    max(agent_dels) / base - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn push_uniform(w: &mut DelWindowState, turbine: usize, ws: f64, ti: f64, yaw: f64) {
        w.push(turbine, [ws; 4], [ti; 4], yaw);
    }

    #[test]
    fn partial_window_means_available_from_first_sample() {
        let mut w = DelWindowState::new(1, 60);
        assert!(w.features(0).is_none());
        push_uniform(&mut w, 0, 10.0, 0.05, 5.0);
        let f = w.features(0).expect("one sample suffices");
        assert_eq!(f.sector_ws, [10.0; 4]);
        assert_eq!(f.yaw, 5.0);
        push_uniform(&mut w, 0, 12.0, 0.07, 15.0);
        let f = w.features(0).expect("two samples");
        assert_eq!(f.sector_ws, [11.0; 4]);
        assert_eq!(f.yaw, 10.0);
    }

    #[test]
    fn eviction_keeps_only_the_last_capacity_entries() {
        let mut w = DelWindowState::new(1, 4);
        for i in 0..10 {
            push_uniform(&mut w, 0, i as f64, 0.0, 0.0);
        }
        assert_eq!(w.len(0), 4);
        // Last four entries are 6,7,8,9 → mean 7.5.
        let f = w.features(0).unwrap();
        assert!((f.sector_ws[0] - 7.5).abs() < 1e-12);
    }

    #[test]
    fn features_independent_of_ring_alignment() {
        // Same trailing history must give identical features regardless of
        // what was pushed (and evicted) before it.
        let mut fresh = DelWindowState::new(1, 16);
        let mut stale = DelWindowState::new(1, 16);
        for i in 0..37 {
            push_uniform(&mut stale, 0, 99.0 + i as f64, 0.9, -20.0);
        }
        for i in 0..16 {
            let (ws, ti, yaw) = (5.0 + 0.3 * i as f64, 0.01 * i as f64, i as f64 - 8.0);
            push_uniform(&mut fresh, 0, ws, ti, yaw);
            push_uniform(&mut stale, 0, ws, ti, yaw);
        }
        assert_eq!(fresh.features(0), stale.features(0));
    }

    #[test]
    fn turbines_are_independent() {
        let mut w = DelWindowState::new(3, 8);
        push_uniform(&mut w, 1, 10.0, 0.1, 3.0);
        assert!(w.features(0).is_none());
        assert!(w.features(2).is_none());
        assert_eq!(w.features(1).unwrap().yaw, 3.0);
    }

    #[test]
    fn clear_resets_all_rings() {
        let mut w = DelWindowState::new(2, 8);
        push_uniform(&mut w, 0, 10.0, 0.1, 0.0);
        push_uniform(&mut w, 1, 10.0, 0.1, 0.0);
        w.clear();
        assert!(w.is_empty(0) && w.is_empty(1));
    }

    #[test]
    fn delta_ratio_identities() {
        assert_eq!(delta_ratio(&[100.0, 200.0], &[150.0, 200.0]), 0.0);
        // 10% worse on the worst turbine, regardless of which turbine it is.
        let d = delta_ratio(&[220.0, 100.0], &[150.0, 200.0]);
        assert!((d - 0.1).abs() < 1e-12, "got {d}");
        // Agent below baseline gives a negative ratio.
        assert!(delta_ratio(&[100.0, 120.0], &[150.0, 200.0]) < 0.0);
        // Degenerate all-zero baseline is defined as zero.
        assert_eq!(delta_ratio(&[1.0], &[0.0]), 0.0);
    }
}
