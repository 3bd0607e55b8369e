//! Deterministic policy evaluation: a long rollout against the lockstep
//! baseline twin, with all headline metrics computed over a late analysis
//! region so spin-up transients never contaminate them.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{histogram_counts, histogram_edges, quantile, spearman};
use crate::config::Config;
use crate::env::FarmEnv;
use crate::error::{Error, Result};
use crate::loads::{rainflow_del, DelFeatures, SurrogateNet};
use crate::sac::Policy;
use crate::seed;
use crate::sim::TurbulenceBox;

/// Number of uniform DEL histogram bins per report.
pub const HIST_BINS: usize = 40;

/// Wöhler exponent for the rainflow cross-check pseudo-load series.
pub const CROSS_CHECK_WOHLER_M: f64 = 10.0;

/// How yaw commands are produced during evaluation.
#[derive(Debug, Clone)]
pub enum YawController {
    /// Greedy baseline behavior: zero yaw everywhere.
    Zero,
    /// Fixed target angles (degrees), e.g. a grid-search optimum.
    Static(Vec<f64>),
    /// Trained actors queried for their mean action (the default protocol).
    Learned(Policy),
    /// Trained actors with sampling noise left on (diagnostic mode).
    LearnedSampled(Policy),
}

impl YawController {
    fn label(&self) -> &'static str {
        match self {
            YawController::Zero => "zero",
            YawController::Static(_) => "static",
            YawController::Learned(_) => "policy",
            YawController::LearnedSampled(_) => "policy-sampled",
        }
    }
}

/// Rollout length and analysis-region parameters.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Total simulated control time after spin-up, seconds.
    pub duration_secs: f64,
    /// Metrics use only samples with t strictly greater than this, seconds.
    pub analysis_start_secs: f64,
    /// Drives the inflow phase draw (and sampling noise, if enabled).
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { duration_secs: 3000.0, analysis_start_secs: 1000.0, seed: 0 }
    }
}

/// Per-turbine DEL histograms on one shared binning.
///
/// Edges span the pooled min/max over both controllers and all turbines
/// within the analysis region, so every histogram in a report is comparable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelHistograms {
    /// `HIST_BINS + 1` ascending bin edges, kN·m.
    pub edges: Vec<f64>,
    /// Counts per turbine for the controlled farm.
    pub agent: Vec<Vec<u64>>,
    /// Counts per turbine for the zero-yaw twin.
    pub baseline: Vec<Vec<u64>>,
}

/// Everything one evaluation produces: headline metrics over the analysis
/// region plus the full per-step series they were computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Identity of the turbulence box the rollout ran on.
    pub box_id: u64,
    /// Active load-increase limit, if any.
    pub delta_max: Option<f64>,
    pub n_turbines: usize,
    pub control_dt: f64,
    pub analysis_start_secs: f64,
    pub duration_secs: f64,
    pub seed: u64,
    pub controller: String,
    /// Mean farm power, controlled over baseline, analysis region.
    pub power_ratio: f64,
    /// Worst controlled DEL over worst baseline DEL (turbines x steps).
    pub max_to_max_del_ratio: f64,
    /// Share of analysis steps whose load increase exceeds the limit.
    pub violation_fraction: f64,
    /// 5th/95th percentiles of the baseline worst-turbine DEL trace.
    pub del_limit_band: (f64, f64),
    /// Per-turbine Spearman correlation between windowed surrogate DELs and
    /// rainflow DELs of the pseudo-load series; None if either is constant.
    pub rank_correlation: Vec<Option<f64>>,
    /// Sample times, seconds since the end of spin-up.
    pub t: Vec<f64>,
    /// Per-turbine series, indexed `[turbine][step]`.
    pub yaw: Vec<Vec<f64>>,
    pub power_agent: Vec<Vec<f64>>,
    pub power_baseline: Vec<Vec<f64>>,
    pub del_agent: Vec<Vec<f64>>,
    pub del_baseline: Vec<Vec<f64>>,
    /// Rainflow cross-check DELs; zero until a full window of pseudo-load
    /// samples lies inside the analysis region.
    pub rainflow_del: Vec<Vec<f64>>,
    /// Shared-reward component series.
    pub r_power: Vec<f64>,
    pub r_constraint: Vec<f64>,
    pub r_total: Vec<f64>,
    /// Load-increase ratio series (worst turbine over worst baseline - 1).
    pub delta: Vec<f64>,
    pub histogram: DelHistograms,
}

impl EvalReport {
    /// Indices of samples inside the analysis region.
    pub fn analysis_indices(&self) -> Vec<usize> {
        (0..self.t.len()).filter(|&k| self.t[k] > self.analysis_start_secs).collect()
    }
}

/// Raw per-step recordings, assembled into a report once the rollout ends.
struct RawTrace {
    t: Vec<f64>,
    yaw: Vec<Vec<f64>>,
    power_agent: Vec<Vec<f64>>,
    power_baseline: Vec<Vec<f64>>,
    del_agent: Vec<Vec<f64>>,
    del_baseline: Vec<Vec<f64>>,
    pseudo_load: Vec<Vec<f64>>,
    r_power: Vec<f64>,
    r_constraint: Vec<f64>,
    r_total: Vec<f64>,
    delta: Vec<f64>,
}

impl RawTrace {
    fn with_capacity(n_turbines: usize, n_steps: usize) -> Self {
        let series = || vec![Vec::with_capacity(n_steps); n_turbines];
        Self {
            t: Vec::with_capacity(n_steps),
            yaw: series(),
            power_agent: series(),
            power_baseline: series(),
            del_agent: series(),
            del_baseline: series(),
            pseudo_load: series(),
            r_power: Vec::with_capacity(n_steps),
            r_constraint: Vec::with_capacity(n_steps),
            r_total: Vec::with_capacity(n_steps),
            delta: Vec::with_capacity(n_steps),
        }
    }
}

/// Scalar context carried from the rollout into report assembly.
struct ReportParams {
    box_id: u64,
    delta_max: Option<f64>,
    n_turbines: usize,
    control_dt: f64,
    analysis_start_secs: f64,
    duration_secs: f64,
    seed: u64,
    controller: String,
    rainflow_window: usize,
}

/// Runs one deterministic evaluation rollout.
///
/// The controlled farm and its zero-yaw twin share `tbox`; the twin is what
/// every ratio in the report is measured against. Forced training resets do
/// not apply — the rollout runs uninterrupted for `opts.duration_secs`.
pub fn evaluate(
    cfg: &Config,
    surrogate: Arc<SurrogateNet>,
    tbox: Arc<TurbulenceBox>,
    controller: &YawController,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let n = cfg.farm.n_turbines;
    match controller {
        YawController::Static(y) if y.len() != n => {
            return Err(Error::config(
                "controller",
                format!("static controller has {} angles for {n} turbines", y.len()),
            ));
        }
        YawController::Learned(p) | YawController::LearnedSampled(p) if p.n_agents() != n => {
            return Err(Error::config(
                "controller",
                format!("policy has {} actors for {n} turbines", p.n_agents()),
            ));
        }
        _ => {}
    }

    let dt = cfg.training.control_dt;
    let n_steps = (opts.duration_secs / dt).round() as usize;
    let rainflow_window = (cfg.training.del_window_secs / dt).round().max(1.0) as usize;
    let mut env = FarmEnv::new(cfg, Arc::clone(&surrogate), Arc::clone(&tbox), seed::derive(opts.seed, &[0xE7A1]));
    let mut noise = ChaCha8Rng::seed_from_u64(seed::derive(opts.seed, &[0x5A3D]));

    let mut trace = RawTrace::with_capacity(n, n_steps);
    for k in 0..n_steps {
        let obs = env.observations();
        let commands: Vec<f64> = match controller {
            YawController::Zero => vec![0.0; n],
            YawController::Static(y) => y.clone(),
            YawController::Learned(p) => (0..n).map(|i| p.act(i, &obs[i])).collect(),
            YawController::LearnedSampled(p) => {
                (0..n).map(|i| p.act_sampled(i, &obs[i], &mut noise)).collect()
            }
        };
        let step = env.step(&commands);
        let (da, db) = env.del_estimates();
        for i in 0..n {
            trace.yaw[i].push(env.agent().yaw()[i]);
            trace.power_agent[i].push(env.agent().power()[i]);
            trace.power_baseline[i].push(env.baseline().power()[i]);
            trace.del_agent[i].push(da[i]);
            trace.del_baseline[i].push(db[i]);
            // Pseudo-load reconstruction: alternate the sign of half the
            // instantaneous surrogate estimate each control step, so every
            // synthetic full cycle's range equals that estimate. Windowed
            // rainflow counting then recovers a high-order mean of the same
            // quantity the sliding-window estimate averages.
            let s = env.agent().sectors(i);
            let instant = DelFeatures {
                sector_ws: s.sector_ws,
                sector_ti: s.sector_ti,
                yaw: env.agent().yaw()[i],
            };
            let sign = if k % 2 == 0 { 0.5 } else { -0.5 };
            trace.pseudo_load[i].push(sign * surrogate.estimate(&instant));
        }
        trace.t.push((k + 1) as f64 * dt);
        trace.r_power.push(step.reward.power);
        trace.r_constraint.push(step.reward.penalty);
        trace.r_total.push(step.reward.total);
        trace.delta.push(step.reward.load_delta);
    }

    Ok(assemble_report(
        trace,
        ReportParams {
            box_id: tbox.id,
            delta_max: cfg.constraint.threshold(),
            n_turbines: n,
            control_dt: dt,
            analysis_start_secs: opts.analysis_start_secs,
            duration_secs: opts.duration_secs,
            seed: opts.seed,
            controller: controller.label().to_string(),
            rainflow_window,
        },
    ))
}

/// Reduces a raw trace to a report. Every metric reads only samples with
/// t > analysis_start, so earlier data (spin-up transients, different
/// warm-up noise) cannot move any reported number.
fn assemble_report(trace: RawTrace, p: ReportParams) -> EvalReport {
    let mask: Vec<usize> =
        (0..trace.t.len()).filter(|&k| trace.t[k] > p.analysis_start_secs).collect();
    let n = p.n_turbines;

    let mut power_a = 0.0;
    let mut power_b = 0.0;
    for &k in &mask {
        for i in 0..n {
            power_a += trace.power_agent[i][k];
            power_b += trace.power_baseline[i][k];
        }
    }
    let power_ratio = if power_b > 0.0 { power_a / power_b } else { 0.0 };

    let masked_max = |series: &[Vec<f64>]| {
        let mut m = f64::NEG_INFINITY;
        for &k in &mask {
            for s in series {
                m = m.max(s[k]);
            }
        }
        m
    };
    let a_max = masked_max(&trace.del_agent);
    let b_max = masked_max(&trace.del_baseline);
    let max_to_max_del_ratio = if b_max > 0.0 { a_max / b_max } else { 0.0 };

    let violation_fraction = match (p.delta_max, mask.len()) {
        (Some(limit), len) if len > 0 => {
            mask.iter().filter(|&&k| trace.delta[k] > limit).count() as f64 / len as f64
        }
        _ => 0.0,
    };

    let worst_baseline: Vec<f64> = mask
        .iter()
        .map(|&k| (0..n).map(|i| trace.del_baseline[i][k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let del_limit_band = (quantile(&worst_baseline, 0.05), quantile(&worst_baseline, 0.95));

    // Rainflow cross-check: windows drawn entirely from analysis-region
    // pseudo-load samples, paired with the surrogate DEL at the window end.
    let first_full = mask.first().map(|&k0| k0 + p.rainflow_window - 1);
    let mut rainflow = vec![vec![0.0; trace.t.len()]; n];
    let mut rank_correlation = Vec::with_capacity(n);
    for i in 0..n {
        let mut pairs_surrogate = Vec::new();
        let mut pairs_rainflow = Vec::new();
        if let Some(start) = first_full {
            for &k in mask.iter().filter(|&&k| k >= start) {
                let window = &trace.pseudo_load[i][k + 1 - p.rainflow_window..=k];
                let del = rainflow_del(window, CROSS_CHECK_WOHLER_M, p.rainflow_window as f64);
                rainflow[i][k] = del;
                pairs_surrogate.push(trace.del_agent[i][k]);
                pairs_rainflow.push(del);
            }
        }
        rank_correlation.push(spearman(&pairs_surrogate, &pairs_rainflow));
    }

    let mut pooled = Vec::with_capacity(2 * n * mask.len());
    for &k in &mask {
        for i in 0..n {
            pooled.push(trace.del_agent[i][k]);
            pooled.push(trace.del_baseline[i][k]);
        }
    }
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if pooled.is_empty() { (0.0, 1.0) } else { (lo, hi) };
    let masked_series = |s: &Vec<f64>| mask.iter().map(|&k| s[k]).collect::<Vec<f64>>();
    let histogram = DelHistograms {
        edges: histogram_edges(lo, hi, HIST_BINS),
        agent: trace
            .del_agent
            .iter()
            .map(|s| histogram_counts(&masked_series(s), lo, hi, HIST_BINS))
            .collect(),
        baseline: trace
            .del_baseline
            .iter()
            .map(|s| histogram_counts(&masked_series(s), lo, hi, HIST_BINS))
            .collect(),
    };

    EvalReport {
        box_id: p.box_id,
        delta_max: p.delta_max,
        n_turbines: n,
        control_dt: p.control_dt,
        analysis_start_secs: p.analysis_start_secs,
        duration_secs: p.duration_secs,
        seed: p.seed,
        controller: p.controller,
        power_ratio,
        max_to_max_del_ratio,
        violation_fraction,
        del_limit_band,
        rank_correlation,
        t: trace.t,
        yaw: trace.yaw,
        power_agent: trace.power_agent,
        power_baseline: trace.power_baseline,
        del_agent: trace.del_agent,
        del_baseline: trace.del_baseline,
        rainflow_del: rainflow,
        r_power: trace.r_power,
        r_constraint: trace.r_constraint,
        r_total: trace.r_total,
        delta: trace.delta,
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::grid::grid_search_oracle;
    use crate::loads::{train_surrogate, DelOracle, SurrogateTrainConfig};
    use crate::sim::generate_turbulence_box;
    use std::sync::OnceLock;

    fn eval_surrogate() -> Arc<SurrogateNet> {
        static NET: OnceLock<Arc<SurrogateNet>> = OnceLock::new();
        Arc::clone(NET.get_or_init(|| {
            let cfg = SurrogateTrainConfig {
                n_samples: 2000,
                hidden: 24,
                max_epochs: 300,
                batch_size: 128,
                lr: 1e-3,
                seed: 7,
                stop_frac_rmse: 0.05,
                required_frac_rmse: None,
            };
            let oracle = DelOracle::from_config(&Config::default().farm);
            Arc::new(train_surrogate(&oracle, &cfg).unwrap().0)
        }))
    }

    fn small_config(ti: f64) -> Config {
        let mut cfg = Config::default();
        cfg.inflow.ti = ti;
        cfg.inflow.box_nx = 600;
        cfg.inflow.box_ny = 8;
        cfg.inflow.box_nz = 8;
        cfg.validate().unwrap();
        cfg
    }

    fn short_opts(duration: f64, analysis: f64) -> EvalOptions {
        EvalOptions { duration_secs: duration, analysis_start_secs: analysis, seed: 3 }
    }

    #[test]
    fn zero_yaw_controller_reproduces_the_baseline_exactly() {
        let cfg = small_config(0.05);
        let tbox = Arc::new(generate_turbulence_box(90, &cfg.inflow));
        let report = evaluate(
            &cfg,
            eval_surrogate(),
            tbox,
            &YawController::Zero,
            &short_opts(900.0, 300.0),
        )
        .unwrap();
        assert_eq!(report.power_ratio, 1.0, "twin farms see identical inflow");
        assert_eq!(report.max_to_max_del_ratio, 1.0);
        assert_eq!(report.violation_fraction, 0.0);
        for i in 0..report.n_turbines {
            assert_eq!(report.del_agent[i], report.del_baseline[i]);
            assert_eq!(report.histogram.agent[i], report.histogram.baseline[i]);
        }
    }

    #[test]
    fn static_replay_of_the_grid_optimum_matches_its_predicted_gain() {
        let cfg = small_config(0.0);
        let grid = grid_search_oracle(&cfg.farm, cfg.inflow.ws, 15.0);
        assert!(grid.gain > 0.0, "steering must pay off in a laminar aligned row");
        let tbox = Arc::new(generate_turbulence_box(91, &cfg.inflow));
        let report = evaluate(
            &cfg,
            eval_surrogate(),
            tbox,
            &YawController::Static(grid.best_yaws.clone()),
            &short_opts(1500.0, 1000.0),
        )
        .unwrap();
        assert!(
            (report.power_ratio - (1.0 + grid.gain)).abs() < 1e-6,
            "dynamic rollout ratio {} vs static prediction {}",
            report.power_ratio,
            1.0 + grid.gain
        );
    }

    #[test]
    fn baseline_series_do_not_depend_on_the_evaluated_controller() {
        let cfg = small_config(0.05);
        let tbox = Arc::new(generate_turbulence_box(92, &cfg.inflow));
        let opts = short_opts(600.0, 200.0);
        let zero = evaluate(&cfg, eval_surrogate(), Arc::clone(&tbox), &YawController::Zero, &opts)
            .unwrap();
        let steered = evaluate(
            &cfg,
            eval_surrogate(),
            tbox,
            &YawController::Static(vec![20.0, 10.0, 0.0]),
            &opts,
        )
        .unwrap();
        assert_eq!(zero.power_baseline, steered.power_baseline);
        assert_eq!(zero.del_baseline, steered.del_baseline);
        assert_ne!(zero.power_agent, steered.power_agent, "agent traces must differ");
    }

    #[test]
    fn reports_are_bitwise_reproducible() {
        let cfg = small_config(0.05);
        let tbox = Arc::new(generate_turbulence_box(93, &cfg.inflow));
        let opts = short_opts(600.0, 200.0);
        let ctrl = YawController::Static(vec![15.0, 5.0, 0.0]);
        let a = evaluate(&cfg, eval_surrogate(), Arc::clone(&tbox), &ctrl, &opts).unwrap();
        let b = evaluate(&cfg, eval_surrogate(), tbox, &ctrl, &opts).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "identical inputs must serialize identically"
        );
    }

    #[test]
    fn surrogate_and_rainflow_del_rankings_agree() {
        // Needs a streamwise period longer than the DEL window (600 s), so
        // windowed features genuinely vary from one window to the next.
        let mut cfg = small_config(0.05);
        cfg.inflow.box_nx = 3000;
        let tbox = Arc::new(generate_turbulence_box(94, &cfg.inflow));
        let report = evaluate(
            &cfg,
            eval_surrogate(),
            tbox,
            &YawController::Zero,
            &EvalOptions::default(),
        )
        .unwrap();
        for (i, r) in report.rank_correlation.iter().enumerate() {
            let r = r.expect("turbulent inflow varies both series");
            assert!(r > 0.7, "turbine {i}: rank correlation {r} too weak");
        }
    }

    #[test]
    fn metrics_ignore_everything_before_the_analysis_region() {
        let n = 2;
        let steps = 50;
        let dt = 10.0;
        let analysis = 250.0; // first masked sample at t = 260
        let series = |f: &dyn Fn(usize) -> f64| (0..steps).map(f).collect::<Vec<f64>>();
        let base = |shift: f64| {
            let per = |off: f64| {
                (0..n)
                    .map(|i| {
                        series(&|k| {
                            let t = (k + 1) as f64 * dt;
                            let v = 100.0 + i as f64 + (t / 70.0).sin() * 5.0 + off;
                            if t <= analysis {
                                v + shift // corrupt only pre-analysis samples
                            } else {
                                v
                            }
                        })
                    })
                    .collect::<Vec<_>>()
            };
            RawTrace {
                t: series(&|k| (k + 1) as f64 * dt),
                yaw: per(0.0),
                power_agent: per(1000.0),
                power_baseline: per(900.0),
                del_agent: per(10.0),
                del_baseline: per(5.0),
                pseudo_load: per(20.0),
                r_power: series(&|k| 0.01 * (k as f64 / 9.0).cos()),
                r_constraint: series(&|_| 0.0),
                r_total: series(&|k| 0.01 * (k as f64 / 9.0).cos()),
                delta: series(&|k| 0.001 * k as f64),
            }
        };
        let params = || ReportParams {
            box_id: 1,
            delta_max: Some(0.2),
            n_turbines: n,
            control_dt: dt,
            analysis_start_secs: analysis,
            duration_secs: steps as f64 * dt,
            seed: 0,
            controller: "zero".into(),
            rainflow_window: 6,
        };
        let clean = assemble_report(base(0.0), params());
        let corrupted = assemble_report(base(37.5), params());
        assert_eq!(clean.power_ratio, corrupted.power_ratio);
        assert_eq!(clean.max_to_max_del_ratio, corrupted.max_to_max_del_ratio);
        assert_eq!(clean.violation_fraction, corrupted.violation_fraction);
        assert_eq!(clean.del_limit_band, corrupted.del_limit_band);
        assert_eq!(clean.histogram, corrupted.histogram);
        assert_eq!(clean.rank_correlation, corrupted.rank_correlation);
        assert_ne!(clean.del_agent, corrupted.del_agent, "series themselves differ");
    }

    #[test]
    fn mismatched_controller_arity_is_rejected() {
        let cfg = small_config(0.0);
        let tbox = Arc::new(generate_turbulence_box(95, &cfg.inflow));
        let err = evaluate(
            &cfg,
            eval_surrogate(),
            tbox,
            &YawController::Static(vec![0.0; 5]),
            &EvalOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2, "arity mismatch is a configuration error");
    }
}
