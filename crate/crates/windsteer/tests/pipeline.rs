//! End-to-end exercises of the `windsteer` binary: the full workflow from
//! turbulence generation through training, evaluation, the grid-search
//! oracle, and cross-constraint comparison, plus the exit-code contract
//! for the common failure modes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use windsteer::cli::RunManifest;
use windsteer::env::pool_box_id;
use windsteer::eval::{ComparisonSummary, EvalReport};
use windsteer::loads::SurrogateNet;
use windsteer::sim::TurbulenceBox;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_windsteer")
}

/// Runs the binary, asserting the expected exit code; returns the output.
fn run(args: &[&str], expect_code: i32) -> Output {
    let output = Command::new(bin()).args(args).output().expect("binary launches");
    let code = output.status.code().expect("process not killed by signal");
    assert_eq!(
        code,
        expect_code,
        "`windsteer {}` exited {} (expected {})\n--- stdout ---\n{}\n--- stderr ---\n{}",
        args.join(" "),
        code,
        expect_code,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr),
    );
    output
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Writes a downsized but valid configuration into `dir` and returns its
/// path. Small boxes, a two-environment trainer, and narrow networks keep
/// the whole workflow fast while leaving every stage functional.
fn write_config(dir: &Path) -> PathBuf {
    let path = dir.join("farm.toml");
    let text = format!(
        r#"
[inflow]
box_nx = 600
box_ny = 8
box_nz = 8

[constraint]
delta_max = 0.2

[training]
total_steps = 600
n_env = 2
batch_size = 32
warmup_steps = 64
replay_capacity = 2000
reset_interval = 40
seeds = [1]
hidden_width = 16
checkpoint_every = 300
spin_up_secs = 50.0

[paths]
box_dir = "{box_dir}"
surrogate = "{surrogate}"
out_dir = "{out_dir}"
"#,
        box_dir = dir.join("boxes").display(),
        surrogate = dir.join("surrogate.dsur").display(),
        out_dir = dir.join("out").display(),
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn read_manifest(path: &Path) -> RunManifest {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("manifest {} must exist: {e}", path.display()));
    serde_json::from_str(&text).expect("manifest parses")
}

fn read_report(dir: &Path) -> EvalReport {
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    serde_json::from_str(&text).expect("report parses")
}

#[test]
fn full_workflow_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let config = write_config(dir);
    let cfg = config.to_str().unwrap();

    // --- gen-turbulence ------------------------------------------------
    run(&["gen-turbulence", "--config", cfg, "--count", "4"], 0);
    let boxes = dir.join("boxes");
    for i in 0..4 {
        let path = boxes.join(format!("box_{i:03}.tbox"));
        let header = TurbulenceBox::load_header(&path).expect("generated box loads");
        assert_eq!(header.id, pool_box_id(1, i), "ids must derive from the base seed");
        assert_eq!((header.nx, header.ny, header.nz), (600, 8, 8));
    }
    let gen_manifest = read_manifest(&boxes.join("manifest.json"));
    assert_eq!(gen_manifest.tool_version, env!("CARGO_PKG_VERSION"));
    assert!(gen_manifest.box_pool_hash.is_some(), "generator must fingerprint its pool");

    // --- train-surrogate ------------------------------------------------
    let surrogate_path = dir.join("surrogate.dsur");
    run(
        &[
            "train-surrogate",
            "--config",
            cfg,
            "--seed",
            "7",
            "--samples",
            "2500",
            "--epochs",
            "400",
            "--hidden",
            "24",
            "--batch-size",
            "128",
            "--rmse-gate",
            "0.08",
        ],
        0,
    );
    SurrogateNet::load(&surrogate_path).expect("saved surrogate loads");
    read_manifest(&dir.join("surrogate.manifest.json"));

    // --- train ------------------------------------------------------------
    let train_out = dir.join("out");
    let output = run(&["train", "--config", cfg], 0);
    assert!(
        stdout_of(&output).contains("seed 1:"),
        "per-seed summary line expected on stdout"
    );
    let seed_dir = train_out.join("seed_1");
    let log = std::fs::read_to_string(seed_dir.join("training_log.csv")).unwrap();
    assert_eq!(
        log.lines().count(),
        301,
        "600 cumulative steps across 2 envs is 300 rounds plus a header"
    );
    for i in 0..3 {
        assert!(seed_dir.join("policy").join(format!("actor_{i}.mnet")).exists());
    }
    assert!(seed_dir.join("checkpoints").join("step_00000300").is_dir());
    assert!(seed_dir.join("checkpoints").join("step_00000600").is_dir());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(seed_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["cumulative_steps"], 600);
    let train_manifest = read_manifest(&train_out.join("manifest.json"));
    assert_eq!(train_manifest.seeds, vec![1]);
    assert_eq!(
        train_manifest.box_pool_hash, gen_manifest.box_pool_hash,
        "trainer must train on the generated pool"
    );

    // --- evaluate: zero-yaw baseline sanity -----------------------------
    let eval_zero = dir.join("eval_zero");
    run(
        &[
            "evaluate",
            "--config",
            cfg,
            "--zero-yaw",
            "--duration",
            "800",
            "--analysis-start",
            "300",
            "--out",
            eval_zero.to_str().unwrap(),
        ],
        0,
    );
    let zero_report = read_report(&eval_zero);
    assert_eq!(zero_report.controller, "zero");
    assert_eq!(zero_report.power_ratio, 1.0, "zero yaw must reproduce the baseline exactly");
    assert_eq!(zero_report.violation_fraction, 0.0);
    assert_eq!(zero_report.box_id, pool_box_id(1, 1000), "default held-out index is 1000");
    assert!(eval_zero.join("timeseries.csv").exists());
    assert!(eval_zero.join("histograms.csv").exists());
    assert!(eval_zero.join("summary.json").exists());
    read_manifest(&eval_zero.join("manifest.json"));

    // --- evaluate: trained policy at two constraint levels --------------
    let eval_tight = dir.join("eval_tight");
    run(
        &[
            "evaluate",
            "--config",
            cfg,
            "--checkpoint",
            seed_dir.to_str().unwrap(),
            "--delta-max",
            "0.2",
            "--duration",
            "800",
            "--analysis-start",
            "300",
            "--out",
            eval_tight.to_str().unwrap(),
        ],
        0,
    );
    let eval_free = dir.join("eval_free");
    run(
        &[
            "evaluate",
            "--config",
            cfg,
            "--checkpoint",
            seed_dir.to_str().unwrap(),
            "--unconstrained",
            "--duration",
            "800",
            "--analysis-start",
            "300",
            "--out",
            eval_free.to_str().unwrap(),
        ],
        0,
    );
    let tight = read_report(&eval_tight);
    assert_eq!(tight.controller, "policy");
    assert_eq!(tight.delta_max, Some(0.2));
    assert_eq!(read_report(&eval_free).delta_max, None);

    // --- evaluate: held-out discipline -----------------------------------
    let refused = run(
        &["evaluate", "--config", cfg, "--zero-yaw", "--box-id", "2"],
        2,
    );
    assert!(
        stderr_of(&refused).contains("training pool"),
        "refusal must name the clash: {}",
        stderr_of(&refused)
    );
    let eval_override = dir.join("eval_override");
    run(
        &[
            "evaluate",
            "--config",
            cfg,
            "--zero-yaw",
            "--box-id",
            "2",
            "--allow-training-box",
            "--duration",
            "400",
            "--analysis-start",
            "150",
            "--out",
            eval_override.to_str().unwrap(),
        ],
        0,
    );
    assert_eq!(read_report(&eval_override).box_id, pool_box_id(1, 2));

    // --- evaluate: controller arity is a config error --------------------
    let arity = run(
        &["evaluate", "--config", cfg, "--static-yaws", "10,0", "--out",
          dir.join("eval_arity").to_str().unwrap()],
        2,
    );
    assert!(stderr_of(&arity).contains("controller"));

    // --- grid-search ------------------------------------------------------
    let grid_csv = dir.join("grid").join("grid.csv");
    let output =
        run(&["grid-search", "--config", cfg, "--step", "15", "--out", grid_csv.to_str().unwrap()], 0);
    assert!(stdout_of(&output).contains("best yaws"));
    let grid_summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("grid").join("grid.summary.json")).unwrap(),
    )
    .unwrap();
    let axis_len = grid_summary["axis"].as_array().unwrap().len();
    assert_eq!(axis_len, 5, "step 15 within a 30-degree limit gives {{0, ±15, ±30}}");
    let csv = std::fs::read_to_string(&grid_csv).unwrap();
    assert_eq!(
        csv.lines().count(),
        axis_len * axis_len + 1,
        "two swept turbines enumerate the full lattice, plus a header"
    );
    assert_eq!(csv.lines().next().unwrap(), "yaw_0,yaw_1,yaw_2,farm_power");
    assert!(grid_summary["gain"].as_f64().unwrap() > 0.0);
    read_manifest(&dir.join("grid").join("grid.manifest.json"));

    // --- compare ----------------------------------------------------------
    let cmp_out = dir.join("cmp").join("summary.json");
    let output = run(
        &[
            "compare",
            "--reports",
            eval_tight.to_str().unwrap(),
            eval_free.to_str().unwrap(),
            "--out",
            cmp_out.to_str().unwrap(),
        ],
        0,
    );
    let table = stdout_of(&output);
    assert!(table.contains("unconstrained dominates"), "verdict missing:\n{table}");
    let summary: ComparisonSummary =
        serde_json::from_str(&std::fs::read_to_string(&cmp_out).unwrap()).unwrap();
    assert_eq!(summary.rows.len(), 2);
    assert_eq!(summary.rows[0].delta_max, Some(0.2), "tightest level sorts first");
    assert_eq!(summary.rows[1].delta_max, None, "unconstrained sorts last");
    assert_eq!(summary.box_id, pool_box_id(1, 1000));
    read_manifest(&dir.join("cmp").join("summary.manifest.json"));
}

#[test]
fn help_exits_cleanly_and_names_every_subcommand() {
    let output = run(&["--help"], 0);
    let text = stdout_of(&output);
    for name in
        ["gen-turbulence", "train-surrogate", "train", "evaluate", "grid-search", "compare"]
    {
        assert!(text.contains(name), "--help must list {name}:\n{text}");
    }
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    run(&[], 2);
}

#[test]
fn invalid_constraint_is_rejected_with_its_field_name() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let output =
        run(&["train", "--config", config.to_str().unwrap(), "--delta-max", "-0.1"], 2);
    assert!(
        stderr_of(&output).contains("[constraint].delta_max"),
        "error must name the offending field: {}",
        stderr_of(&output)
    );
}

#[test]
fn training_without_a_surrogate_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let config = write_config(dir);
    // A pool exists but no surrogate has been trained.
    std::fs::create_dir_all(dir.join("boxes")).unwrap();
    run(
        &["gen-turbulence", "--config", config.to_str().unwrap(), "--count", "1"],
        0,
    );
    let output = run(&["train", "--config", config.to_str().unwrap()], 3);
    assert!(stderr_of(&output).contains("error"), "{}", stderr_of(&output));
}

#[test]
fn empty_box_pools_are_rejected() {
    let output = run(&["gen-turbulence", "--count", "0"], 2);
    assert!(stderr_of(&output).contains("--count"));
}

#[test]
fn missing_comparison_reports_are_io_errors() {
    run(&["compare", "--reports", "/nonexistent/report.json"], 3);
}
