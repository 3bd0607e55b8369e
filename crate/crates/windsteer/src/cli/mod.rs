//! The `windsteer` binary: six subcommands covering the full workflow —
//! turbulence-pool generation, surrogate fitting, agent training, held-out
//! evaluation, the static grid-search oracle, and cross-constraint
//! comparison.
//!
//! Every command accepts `--config <FILE>` (TOML; built-in defaults when
//! omitted) plus flag overrides for the handful of values worth changing
//! per run, and writes a [`RunManifest`] next to its outputs. Exit codes:
//! 0 success, 1 runtime failure, 2 configuration error, 3 I/O or artifact
//! format error.

mod manifest;

pub use manifest::{pool_header_hash, sha256_hex, RunManifest};

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::config::Config;
use crate::env::{pool_box_id, BoxPool};
use crate::error::{Error, Result};
use crate::eval::{
    compare_constraint_levels, evaluate, export_results, grid_search_oracle, load_report,
    EvalOptions, EvalReport, YawController,
};
use crate::loads::{train_surrogate, DelOracle, SurrogateNet, SurrogateTrainConfig};
use crate::sac::{self, Policy};
use crate::sim::{generate_turbulence_box, TurbulenceBox};

#[derive(Debug, Parser)]
#[command(
    name = "windsteer",
    version,
    about = "Load-constrained wind farm flow control: wake simulation, DEL \
             surrogates, multi-agent soft actor-critic, and evaluation."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a pool of synthetic turbulence boxes.
    GenTurbulence(GenTurbulenceArgs),
    /// Fit the neural DEL surrogate against the analytic load model.
    TrainSurrogate(TrainSurrogateArgs),
    /// Train per-turbine yaw agents with soft actor-critic.
    Train(TrainArgs),
    /// Roll out a controller against the zero-yaw baseline and export metrics.
    Evaluate(EvaluateArgs),
    /// Exhaustive steady-state yaw sweep (laminar oracle, no learning).
    GridSearch(GridSearchArgs),
    /// Tabulate evaluation reports across constraint levels.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct GenTurbulenceArgs {
    /// Configuration file (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Number of boxes to generate.
    #[arg(long, default_value_t = 60)]
    count: usize,
    /// Output directory (defaults to [paths].box_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Base seed the box ids derive from.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Override [inflow].ws (m/s).
    #[arg(long)]
    ws: Option<f64>,
    /// Override [inflow].ti (fraction).
    #[arg(long)]
    ti: Option<f64>,
}

#[derive(Debug, Args)]
struct TrainSurrogateArgs {
    /// Configuration file (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output checkpoint path (defaults to [paths].surrogate).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Sampling/initialization seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Override the Latin-hypercube sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the epoch cap.
    #[arg(long)]
    epochs: Option<usize>,
    /// Override the hidden-layer width.
    #[arg(long)]
    hidden: Option<usize>,
    /// Override the minibatch size.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Override the held-out fractional-RMSE acceptance gate.
    #[arg(long, value_name = "FRACTION")]
    rmse_gate: Option<f64>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Configuration file (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override [constraint].delta_max (fractional DEL increase limit).
    #[arg(long, conflicts_with = "unconstrained", allow_negative_numbers = true)]
    delta_max: Option<f64>,
    /// Drop the load constraint entirely.
    #[arg(long)]
    unconstrained: bool,
    /// Train one seed instead of every [training].seeds entry.
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory; each seed trains into <out>/seed_<s>/ (defaults to
    /// [paths].out_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override [training].total_steps.
    #[arg(long)]
    total_steps: Option<u64>,
    /// Override [training].n_env.
    #[arg(long)]
    n_env: Option<usize>,
    /// Override [paths].box_dir.
    #[arg(long, value_name = "DIR")]
    box_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(
    ArgGroup::new("controller")
        .required(true)
        .args(["checkpoint", "static_yaws", "zero_yaw"])
))]
struct EvaluateArgs {
    /// Configuration file (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Policy directory (actor_<i>.mnet files, or a training output
    /// directory containing policy/).
    #[arg(long, value_name = "DIR")]
    checkpoint: Option<PathBuf>,
    /// Fixed yaw angles in degrees, comma-separated (e.g. 20,-12,0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "DEG,...")]
    static_yaws: Option<Vec<f64>>,
    /// Evaluate the greedy zero-yaw baseline against itself.
    #[arg(long)]
    zero_yaw: bool,
    /// Keep the policy's sampling noise on instead of using mean actions.
    #[arg(long)]
    sample: bool,
    /// Held-out box index; the box id derives from --box-seed, so indexes
    /// past the training pool size stay disjoint from it.
    #[arg(long, default_value_t = 1000)]
    box_id: usize,
    /// Base seed the held-out box id derives from (matches gen-turbulence
    /// --seed).
    #[arg(long, default_value_t = 1)]
    box_seed: u64,
    /// Evaluate an explicit .tbox file instead of a derived box.
    #[arg(long, value_name = "FILE", conflicts_with = "box_id")]
    box_file: Option<PathBuf>,
    /// Evaluate on a box even if it appears in the training pool.
    #[arg(long)]
    allow_training_box: bool,
    /// Override [constraint].delta_max for the report's violation metric.
    #[arg(long, conflicts_with = "unconstrained", allow_negative_numbers = true)]
    delta_max: Option<f64>,
    /// Treat the run as unconstrained.
    #[arg(long)]
    unconstrained: bool,
    /// Environment seed (and sampling-noise seed with --sample).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rollout length, seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Metrics ignore everything at or before this time, seconds.
    #[arg(long)]
    analysis_start: Option<f64>,
    /// Report directory (defaults to [paths].out_dir/eval).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridSearchArgs {
    /// Configuration file (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Yaw lattice spacing, degrees.
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    /// Override [inflow].ws (m/s).
    #[arg(long)]
    ws: Option<f64>,
    /// Output CSV of every combination (defaults to [paths].out_dir/grid.csv);
    /// a manifest and a best-vector summary are written alongside.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Evaluation report paths (report.json files or their directories).
    #[arg(long, num_args = 1.., required = true, value_name = "PATH")]
    reports: Vec<PathBuf>,
    /// Write the comparison summary JSON here as well as to stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Parses argv, runs the selected command, and maps errors to exit codes.
/// Errors print as a single machine-parsable stderr line.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("windsteer: error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenTurbulence(a) => cmd_gen_turbulence(a),
        Command::TrainSurrogate(a) => cmd_train_surrogate(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::GridSearch(a) => cmd_grid_search(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

/// Loads `--config` or falls back to built-in defaults.
fn load_config(path: &Option<PathBuf>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `value` as pretty JSON with a trailing newline.
fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Runtime(format!("{e}")))?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn cmd_gen_turbulence(a: GenTurbulenceArgs) -> Result<()> {
    let mut cfg = load_config(&a.config)?;
    if let Some(ws) = a.ws {
        cfg.inflow.ws = ws;
    }
    if let Some(ti) = a.ti {
        cfg.inflow.ti = ti;
    }
    cfg.validate()?;
    if a.count == 0 {
        return Err(Error::config("--count", "must generate at least one box"));
    }

    let out = a.out.unwrap_or_else(|| cfg.paths.box_dir.clone());
    create_dir(&out)?;
    for i in 0..a.count {
        let id = pool_box_id(a.seed, i);
        let tbox = generate_turbulence_box(id, &cfg.inflow);
        let path = out.join(format!("box_{i:03}.tbox"));
        tbox.save(&path)?;
        println!("wrote {} (id {:#018x}, sigma_u {:.4} m/s)", path.display(), id, tbox.sigma_u);
    }

    // Written after generation so the manifest can fingerprint the pool it
    // just produced (a box's realized std is only known once generated).
    RunManifest::new(Some(&cfg), vec![a.seed], pool_header_hash(&out)?)
        .write(&out.join("manifest.json"))?;
    println!("generated {} boxes in {}", a.count, out.display());
    Ok(())
}

fn cmd_train_surrogate(a: TrainSurrogateArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    cfg.validate()?;
    let mut tcfg = SurrogateTrainConfig { seed: a.seed, ..SurrogateTrainConfig::default() };
    if let Some(n) = a.samples {
        tcfg.n_samples = n;
    }
    if let Some(n) = a.epochs {
        tcfg.max_epochs = n;
    }
    if let Some(n) = a.hidden {
        tcfg.hidden = n;
    }
    if let Some(n) = a.batch_size {
        tcfg.batch_size = n;
    }
    if let Some(gate) = a.rmse_gate {
        if !(gate > 0.0) {
            return Err(Error::config("--rmse-gate", "must be positive"));
        }
        tcfg.required_frac_rmse = Some(gate);
    }

    let out = a.out.unwrap_or_else(|| cfg.paths.surrogate.clone());
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    RunManifest::new(Some(&cfg), vec![a.seed], None)
        .write(&out.with_extension("manifest.json"))?;

    let oracle = DelOracle::from_config(&cfg.farm);
    let (net, report) = train_surrogate(&oracle, &tcfg)?;
    net.save(&out)?;
    println!(
        "surrogate: held-out fractional RMSE {:.4}, audit max relative error {:.4}, \
         {} epochs on {} samples",
        report.held_out_frac_rmse, report.audit_max_rel_err, report.epochs_run, report.n_train
    );
    println!("saved {}", out.display());
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let mut cfg = load_config(&a.config)?;
    if let Some(d) = a.delta_max {
        cfg.constraint.delta_max = d;
        cfg.constraint.unconstrained = false;
    }
    if a.unconstrained {
        cfg.constraint.unconstrained = true;
    }
    if let Some(n) = a.total_steps {
        cfg.training.total_steps = n;
    }
    if let Some(n) = a.n_env {
        cfg.training.n_env = n;
    }
    if let Some(dir) = a.box_dir {
        cfg.paths.box_dir = dir;
    }
    cfg.validate()?;

    let seeds: Vec<u64> = match a.seed {
        Some(s) => vec![s],
        None => cfg.training.seeds.clone(),
    };
    let out = a.out.unwrap_or_else(|| cfg.paths.out_dir.clone());
    create_dir(&out)?;
    RunManifest::new(Some(&cfg), seeds.clone(), pool_header_hash(&cfg.paths.box_dir)?)
        .write(&out.join("manifest.json"))?;

    let surrogate = Arc::new(SurrogateNet::load(&cfg.paths.surrogate)?);
    // Boxes load once; each seed gets its own deal order over the same pool.
    let boxes = BoxPool::load_dir(&cfg.paths.box_dir, seeds[0])?.boxes().to_vec();
    println!(
        "training {} seed(s) on a {}-box pool, {} cumulative steps each",
        seeds.len(),
        boxes.len(),
        cfg.training.total_steps
    );
    for &s in &seeds {
        let pool = BoxPool::new(boxes.clone(), s);
        let seed_dir = out.join(format!("seed_{s}"));
        create_dir(&seed_dir)?;
        let summary = sac::train(&cfg, Arc::clone(&surrogate), pool, s, &seed_dir)?;
        write_json(&summary, &seed_dir.join("summary.json"))?;
        println!(
            "seed {s}: {} rounds, {} episodes, {} gradient updates/agent, \
             final mean reward {:.4}, {:.1}s",
            summary.rounds,
            summary.episodes,
            summary.gradient_updates_per_agent,
            summary.final_reward_mean,
            summary.wall_secs
        );
    }
    println!("run artifacts in {}", out.display());
    Ok(())
}

/// Ids of every box in the training pool directory; empty if the directory
/// does not exist yet.
fn training_pool_ids(dir: &Path) -> Result<Vec<u64>> {
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(dir, e)),
    };
    let mut ids = Vec::new();
    for entry in entries.filter_map(|e| e.ok()) {
        let path = entry.path();
        if path.extension().is_some_and(|ext| ext == "tbox") {
            ids.push(TurbulenceBox::load_header(&path)?.id);
        }
    }
    Ok(ids)
}

/// Accepts either a policy directory or a training output directory that
/// contains one under `policy/`.
fn resolve_policy_dir(dir: &Path) -> PathBuf {
    if !dir.join("actor_0.mnet").exists() && dir.join("policy").join("actor_0.mnet").exists() {
        dir.join("policy")
    } else {
        dir.to_path_buf()
    }
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    if a.sample && a.checkpoint.is_none() {
        return Err(Error::config("--sample", "sampling mode needs --checkpoint"));
    }
    let mut cfg = load_config(&a.config)?;
    if let Some(d) = a.delta_max {
        cfg.constraint.delta_max = d;
        cfg.constraint.unconstrained = false;
    }
    if a.unconstrained {
        cfg.constraint.unconstrained = true;
    }
    cfg.validate()?;

    let controller = if let Some(dir) = &a.checkpoint {
        let policy = Policy::load_dir(&resolve_policy_dir(dir), cfg.farm.n_turbines)?;
        if a.sample {
            YawController::LearnedSampled(policy)
        } else {
            YawController::Learned(policy)
        }
    } else if let Some(yaws) = &a.static_yaws {
        YawController::Static(yaws.clone())
    } else {
        YawController::Zero
    };

    let tbox = match &a.box_file {
        Some(path) => Arc::new(TurbulenceBox::load(path)?),
        None => {
            let id = pool_box_id(a.box_seed, a.box_id);
            Arc::new(generate_turbulence_box(id, &cfg.inflow))
        }
    };
    if !a.allow_training_box && training_pool_ids(&cfg.paths.box_dir)?.contains(&tbox.id) {
        return Err(Error::config(
            "--box-id",
            format!(
                "box {:#018x} belongs to the training pool in {}; evaluation needs a held-out \
                 box (pass --allow-training-box to override)",
                tbox.id,
                cfg.paths.box_dir.display()
            ),
        ));
    }

    let mut opts = EvalOptions { seed: a.seed, ..EvalOptions::default() };
    if let Some(d) = a.duration {
        opts.duration_secs = d;
    }
    if let Some(t) = a.analysis_start {
        opts.analysis_start_secs = t;
    }

    let out = a.out.unwrap_or_else(|| cfg.paths.out_dir.join("eval"));
    create_dir(&out)?;
    RunManifest::new(Some(&cfg), vec![a.seed], pool_header_hash(&cfg.paths.box_dir)?)
        .write(&out.join("manifest.json"))?;

    let surrogate = Arc::new(SurrogateNet::load(&cfg.paths.surrogate)?);
    let report = evaluate(&cfg, surrogate, tbox, &controller, &opts)?;
    export_results(&report, &out)?;
    print_eval_headline(&report);
    println!("outputs in {}", out.display());
    Ok(())
}

fn print_eval_headline(report: &EvalReport) {
    println!("controller          {}", report.controller);
    println!("box id              {:#018x}", report.box_id);
    match report.delta_max {
        Some(d) => println!("constraint          delta_max = {d}"),
        None => println!("constraint          unconstrained"),
    }
    println!("power ratio         {:.6}", report.power_ratio);
    println!("max-to-max DEL      {:.6}", report.max_to_max_del_ratio);
    println!("violation fraction  {:.4}", report.violation_fraction);
}

fn cmd_grid_search(a: GridSearchArgs) -> Result<()> {
    let mut cfg = load_config(&a.config)?;
    if let Some(ws) = a.ws {
        cfg.inflow.ws = ws;
    }
    cfg.validate()?;
    if !(a.step > 0.0) {
        return Err(Error::config("--step", "grid spacing must be positive"));
    }

    let out = a.out.unwrap_or_else(|| cfg.paths.out_dir.join("grid.csv"));
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    RunManifest::new(Some(&cfg), vec![], None).write(&out.with_extension("manifest.json"))?;

    let result = grid_search_oracle(&cfg.farm, cfg.inflow.ws, a.step);

    let mut text = String::new();
    for i in 0..cfg.farm.n_turbines {
        text.push_str(&format!("yaw_{i},"));
    }
    text.push_str("farm_power\n");
    for (yaws, power) in result.yaws.iter().zip(&result.farm_power) {
        for y in yaws {
            text.push_str(&format!("{y},"));
        }
        text.push_str(&format!("{power}\n"));
    }
    std::fs::write(&out, text).map_err(|e| Error::io(&out, e))?;

    let summary = serde_json::json!({
        "step_deg": result.step_deg,
        "axis": result.axis,
        "baseline_power": result.baseline_power,
        "best_yaws": result.best_yaws,
        "best_power": result.best_power,
        "gain": result.gain,
    });
    let summary_path = out.with_extension("summary.json");
    write_json(&summary, &summary_path)?;

    println!("evaluated {} yaw combinations (step {} deg)", result.yaws.len(), result.step_deg);
    println!(
        "baseline {:.1} W, best {:.1} W, gain {:.4}%",
        result.baseline_power,
        result.best_power,
        100.0 * result.gain
    );
    let best: Vec<String> = result.best_yaws.iter().map(|y| format!("{y}")).collect();
    println!("best yaws [deg]: {}", best.join(", "));
    println!("combinations in {}, summary in {}", out.display(), summary_path.display());
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let reports: Vec<EvalReport> =
        a.reports.iter().map(|p| load_report(p)).collect::<Result<_>>()?;
    let summary = compare_constraint_levels(&reports)?;

    println!("box id {:#018x}", summary.box_id);
    println!(
        "{:<14} {:<16} {:>12} {:>15} {:>11}",
        "delta_max", "controller", "power_ratio", "max_del_ratio", "violations"
    );
    for row in &summary.rows {
        let delta = match row.delta_max {
            Some(d) => format!("{d}"),
            None => "unconstrained".to_string(),
        };
        println!(
            "{:<14} {:<16} {:>12.6} {:>15.6} {:>11.4}",
            delta, row.controller, row.power_ratio, row.max_to_max_del_ratio,
            row.violation_fraction
        );
    }
    let verdict = |v: Option<bool>| match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a (fewer than two comparable rows)",
    };
    println!("unconstrained dominates: {}", verdict(summary.unconstrained_dominates));
    println!("relaxation monotonic:    {}", verdict(summary.relaxation_monotonic));

    if let Some(out) = &a.out {
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            create_dir(parent)?;
        }
        write_json(&summary, out)?;
        let mut seeds: Vec<u64> = reports.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        RunManifest::new(None, seeds, None).write(&out.with_extension("manifest.json"))?;
        println!("summary in {}", out.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_definitions_are_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn gen_turbulence_defaults_match_the_documented_pool() {
        let cli =
            Cli::try_parse_from(["windsteer", "gen-turbulence"]).expect("bare command parses");
        let Command::GenTurbulence(a) = cli.command else {
            panic!("wrong subcommand parsed");
        };
        assert_eq!(a.count, 60, "default pool size");
        assert_eq!(a.seed, 1, "default base seed");
        assert!(a.out.is_none() && a.ws.is_none() && a.ti.is_none());
    }

    #[test]
    fn evaluate_requires_exactly_one_controller() {
        assert!(
            Cli::try_parse_from(["windsteer", "evaluate"]).is_err(),
            "no controller must be rejected"
        );
        assert!(
            Cli::try_parse_from([
                "windsteer",
                "evaluate",
                "--checkpoint",
                "runs/seed_1",
                "--zero-yaw"
            ])
            .is_err(),
            "two controllers must be rejected"
        );
        let cli = Cli::try_parse_from(["windsteer", "evaluate", "--zero-yaw"]).unwrap();
        let Command::Evaluate(a) = cli.command else {
            panic!("wrong subcommand parsed");
        };
        assert!(a.zero_yaw);
        assert_eq!(a.box_id, 1000, "default held-out index sits past any pool");
        assert_eq!(a.seed, 0);
    }

    #[test]
    fn static_yaws_parse_with_negative_entries() {
        let cli =
            Cli::try_parse_from(["windsteer", "evaluate", "--static-yaws", "20,-12.5,0"]).unwrap();
        let Command::Evaluate(a) = cli.command else {
            panic!("wrong subcommand parsed");
        };
        assert_eq!(a.static_yaws, Some(vec![20.0, -12.5, 0.0]));
    }

    #[test]
    fn sampling_mode_requires_a_checkpoint() {
        let cli = Cli::try_parse_from(["windsteer", "evaluate", "--zero-yaw", "--sample"])
            .expect("flag combination parses; validation happens at dispatch");
        let Command::Evaluate(a) = cli.command else {
            panic!("wrong subcommand parsed");
        };
        let err = cmd_evaluate(a).unwrap_err();
        assert_eq!(err.exit_code(), 2, "--sample without --checkpoint is a config error");
    }

    #[test]
    fn train_rejects_contradictory_constraint_flags() {
        assert!(Cli::try_parse_from([
            "windsteer",
            "train",
            "--delta-max",
            "0.2",
            "--unconstrained"
        ])
        .is_err());
    }

    #[test]
    fn policy_directories_resolve_through_the_training_layout() {
        let dir = tempfile::tempdir().unwrap();
        let run = dir.path().join("seed_1");
        std::fs::create_dir_all(run.join("policy")).unwrap();
        std::fs::write(run.join("policy").join("actor_0.mnet"), b"x").unwrap();
        assert_eq!(resolve_policy_dir(&run), run.join("policy"));
        assert_eq!(resolve_policy_dir(&run.join("policy")), run.join("policy"));
        let bare = dir.path().join("elsewhere");
        assert_eq!(resolve_policy_dir(&bare), bare, "unknown layouts pass through unchanged");
    }
}
