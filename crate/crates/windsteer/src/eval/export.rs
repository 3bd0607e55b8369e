//! Report serialization: per-step time series and histograms as CSV for
//! plotting tools, scalar metrics as JSON. Every file is bit-stable — no
//! timestamps, no map iteration, floats printed in shortest round-trip form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::rollout::EvalReport;
use crate::error::{Error, Result};

/// Scalar slice of a report, the schema consumed by comparisons and CI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub box_id: u64,
    pub delta_max: Option<f64>,
    pub controller: String,
    pub seed: u64,
    pub n_turbines: usize,
    pub control_dt: f64,
    pub duration_secs: f64,
    pub analysis_start_secs: f64,
    pub power_ratio: f64,
    pub max_to_max_del_ratio: f64,
    pub violation_fraction: f64,
    pub del_limit_band: (f64, f64),
    pub rank_correlation: Vec<Option<f64>>,
}

impl EvalSummary {
    pub fn of(report: &EvalReport) -> Self {
        Self {
            box_id: report.box_id,
            delta_max: report.delta_max,
            controller: report.controller.clone(),
            seed: report.seed,
            n_turbines: report.n_turbines,
            control_dt: report.control_dt,
            duration_secs: report.duration_secs,
            analysis_start_secs: report.analysis_start_secs,
            power_ratio: report.power_ratio,
            max_to_max_del_ratio: report.max_to_max_del_ratio,
            violation_fraction: report.violation_fraction,
            del_limit_band: report.del_limit_band,
            rank_correlation: report.rank_correlation.clone(),
        }
    }
}

/// Writes `timeseries.csv`, `histograms.csv`, `summary.json`, and the full
/// `report.json` into `dir` (created if missing).
pub fn export_results(report: &EvalReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_timeseries(report, &dir.join("timeseries.csv"))?;
    write_histograms(report, &dir.join("histograms.csv"))?;
    write_json(&EvalSummary::of(report), &dir.join("summary.json"))?;
    write_json(report, &dir.join("report.json"))
}

/// Reads back a full report, accepting either the export directory or the
/// `report.json` path itself.
pub fn load_report(path: &Path) -> Result<EvalReport> {
    let file = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let bytes = std::fs::read(&file).map_err(|e| Error::io(&file, e))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Error::format(&file, format!("not a valid report: {e}")))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Runtime(format!("serialize {}: {e}", path.display())))?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_timeseries(report: &EvalReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Runtime(format!("{e}")))?;
    let n = report.n_turbines;
    let mut header = vec!["t".to_string()];
    let group = |name: &str| (0..n).map(|i| format!("{name}_{i}")).collect::<Vec<_>>();
    header.extend(group("yaw"));
    header.extend(group("power_agent"));
    header.extend(group("power_baseline"));
    header.extend(group("del_agent"));
    header.extend(group("del_baseline"));
    header.extend(["r_power".into(), "r_constraint".into(), "r_total".into(), "delta".into()]);
    w.write_record(&header).map_err(|e| Error::Runtime(format!("{e}")))?;

    for k in 0..report.t.len() {
        let mut row = vec![report.t[k].to_string()];
        for series in [
            &report.yaw,
            &report.power_agent,
            &report.power_baseline,
            &report.del_agent,
            &report.del_baseline,
        ] {
            row.extend(series.iter().map(|s| s[k].to_string()));
        }
        row.push(report.r_power[k].to_string());
        row.push(report.r_constraint[k].to_string());
        row.push(report.r_total[k].to_string());
        row.push(report.delta[k].to_string());
        w.write_record(&row).map_err(|e| Error::Runtime(format!("{e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_histograms(report: &EvalReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Runtime(format!("{e}")))?;
    let n = report.n_turbines;
    let mut header = vec!["bin_lo".to_string(), "bin_hi".to_string()];
    for i in 0..n {
        header.push(format!("agent_{i}"));
        header.push(format!("baseline_{i}"));
    }
    w.write_record(&header).map_err(|e| Error::Runtime(format!("{e}")))?;
    let h = &report.histogram;
    for b in 0..h.edges.len().saturating_sub(1) {
        let mut row = vec![h.edges[b].to_string(), h.edges[b + 1].to_string()];
        for i in 0..n {
            row.push(h.agent[i][b].to_string());
            row.push(h.baseline[i][b].to_string());
        }
        w.write_record(&row).map_err(|e| Error::Runtime(format!("{e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::rollout::{DelHistograms, HIST_BINS};
    use crate::eval::metrics::{histogram_counts, histogram_edges};

    /// Small synthetic report with internally consistent metrics.
    fn sample_report() -> EvalReport {
        let n = 2;
        let steps = 30;
        let dt = 10.0;
        let analysis = 100.0;
        let t: Vec<f64> = (0..steps).map(|k| (k + 1) as f64 * dt).collect();
        let series = |base: f64, i: usize| {
            (0..steps)
                .map(|k| base + i as f64 * 3.0 + ((k * 7 + i * 5) % 11) as f64 * 0.25)
                .collect::<Vec<f64>>()
        };
        let per = |base: f64| (0..n).map(|i| series(base, i)).collect::<Vec<_>>();
        let (power_agent, power_baseline) = (per(1500.0), per(1450.0));
        let (del_agent, del_baseline) = (per(40.0), per(38.0));
        let mask: Vec<usize> = (0..steps).filter(|&k| t[k] > analysis).collect();

        let mut pa = 0.0;
        let mut pb = 0.0;
        for &k in &mask {
            for i in 0..n {
                pa += power_agent[i][k];
                pb += power_baseline[i][k];
            }
        }
        let masked_max = |s: &Vec<Vec<f64>>| {
            mask.iter()
                .flat_map(|&k| s.iter().map(move |x| x[k]))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let mut pooled = Vec::new();
        for &k in &mask {
            for i in 0..n {
                pooled.push(del_agent[i][k]);
                pooled.push(del_baseline[i][k]);
            }
        }
        let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let masked = |s: &Vec<f64>| mask.iter().map(|&k| s[k]).collect::<Vec<f64>>();
        let histogram = DelHistograms {
            edges: histogram_edges(lo, hi, HIST_BINS),
            agent: del_agent.iter().map(|s| histogram_counts(&masked(s), lo, hi, HIST_BINS)).collect(),
            baseline: del_baseline
                .iter()
                .map(|s| histogram_counts(&masked(s), lo, hi, HIST_BINS))
                .collect(),
        };

        EvalReport {
            box_id: 61,
            delta_max: Some(0.2),
            n_turbines: n,
            control_dt: dt,
            analysis_start_secs: analysis,
            duration_secs: steps as f64 * dt,
            seed: 4,
            controller: "policy".into(),
            power_ratio: pa / pb,
            max_to_max_del_ratio: masked_max(&del_agent) / masked_max(&del_baseline),
            violation_fraction: 0.0,
            del_limit_band: (39.0, 43.0),
            rank_correlation: vec![Some(0.85), None],
            t,
            yaw: per(5.0),
            power_agent,
            power_baseline,
            del_agent,
            del_baseline,
            rainflow_del: per(0.0),
            r_power: vec![0.01; steps],
            r_constraint: vec![0.0; steps],
            r_total: vec![0.01; steps],
            delta: vec![0.05; steps],
            histogram,
        }
    }

    /// Parses the written CSV back into named f64 columns.
    fn read_columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
        let mut r = csv::Reader::from_path(path).unwrap();
        let header: Vec<String> =
            r.headers().unwrap().iter().map(|s| s.to_string()).collect();
        let mut cols = vec![Vec::new(); header.len()];
        for rec in r.records() {
            for (c, field) in rec.unwrap().iter().enumerate() {
                cols[c].push(field.parse::<f64>().unwrap());
            }
        }
        (header, cols)
    }

    #[test]
    fn reingested_time_series_reproduces_the_summary_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let report = sample_report();
        export_results(&report, dir.path()).unwrap();
        let (header, cols) = read_columns(&dir.path().join("timeseries.csv"));
        let col = |name: &str| &cols[header.iter().position(|h| h == name).unwrap()];

        let n = report.n_turbines;
        let t = col("t");
        let mut pa = 0.0;
        let mut pb = 0.0;
        let mut a_max = f64::NEG_INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        for k in 0..t.len() {
            if t[k] <= report.analysis_start_secs {
                continue;
            }
            for i in 0..n {
                pa += col(&format!("power_agent_{i}"))[k];
                pb += col(&format!("power_baseline_{i}"))[k];
                a_max = a_max.max(col(&format!("del_agent_{i}"))[k]);
                b_max = b_max.max(col(&format!("del_baseline_{i}"))[k]);
            }
        }
        assert_eq!(pa / pb, report.power_ratio, "round-trip must be exact, not approximate");
        assert_eq!(a_max / b_max, report.max_to_max_del_ratio);
    }

    #[test]
    fn histogram_counts_sum_to_the_analysis_step_count() {
        let dir = tempfile::tempdir().unwrap();
        let report = sample_report();
        export_results(&report, dir.path()).unwrap();
        let expected = report.analysis_indices().len() as f64;
        let (header, cols) = read_columns(&dir.path().join("histograms.csv"));
        assert_eq!(cols[0].len(), HIST_BINS);
        for (h, c) in header.iter().zip(&cols) {
            if h.starts_with("agent") || h.starts_with("baseline") {
                assert_eq!(c.iter().sum::<f64>(), expected, "column {h}");
            }
        }
    }

    #[test]
    fn summary_json_round_trips_through_its_schema() {
        let dir = tempfile::tempdir().unwrap();
        let report = sample_report();
        export_results(&report, dir.path()).unwrap();
        let bytes = std::fs::read(dir.path().join("summary.json")).unwrap();
        let summary: EvalSummary = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(summary, EvalSummary::of(&report));
        let reloaded = load_report(dir.path()).unwrap();
        assert_eq!(reloaded, report, "full report survives the round trip");
    }

    #[test]
    fn exports_are_byte_identical_across_runs() {
        let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let report = sample_report();
        export_results(&report, da.path()).unwrap();
        export_results(&report, db.path()).unwrap();
        for name in ["timeseries.csv", "histograms.csv", "summary.json", "report.json"] {
            let a = std::fs::read(da.path().join(name)).unwrap();
            let b = std::fs::read(db.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} must not embed run-dependent bytes");
        }
    }

    #[test]
    fn missing_report_file_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_report(dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
