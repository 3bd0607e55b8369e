//! Learned DEL surrogate.
//!
//! A small MLP (9 → hidden → hidden → 1, softplus head) trained to reproduce
//! the analytic DEL model over the feature region the simulator visits.
//! Inputs are affinely normalized, the output is scaled by a stored constant,
//! and the softplus head keeps every estimate strictly positive. Training
//! minimizes *relative* squared error so small-DEL regions are fit as
//! carefully as large ones.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DelFeatures, DelOracle};
use crate::error::{Error, Result};
use crate::nn::{load_network, save_network, Activation, Adam, Matrix, Mlp};
use crate::seed;

/// Magic tag for DEL surrogate checkpoints.
pub const MAGIC_DSUR: &[u8; 4] = b"DSUR";

const N_FEATURES: usize = 9;
/// Stored constants: 9 input offsets, 9 input scales, 1 output scale.
const N_CONSTS: usize = 2 * N_FEATURES + 1;

/// Trained surrogate plus its normalization constants.
#[derive(Debug, Clone)]
pub struct SurrogateNet {
    net: Mlp,
    input_offset: [f64; N_FEATURES],
    input_scale: [f64; N_FEATURES],
    output_scale: f64,
}

impl SurrogateNet {
    /// Estimated DEL for one feature vector; strictly positive by
    /// construction (softplus head times a positive scale).
    pub fn estimate(&self, f: &DelFeatures) -> f64 {
        let x = self.normalize(&f.to_array());
        self.net.forward_one(&x)[0] * self.output_scale
    }

    fn normalize(&self, raw: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut x = [0.0; N_FEATURES];
        for i in 0..N_FEATURES {
            x[i] = (raw[i] - self.input_offset[i]) * self.input_scale[i];
        }
        x
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut consts = Vec::with_capacity(N_CONSTS);
        consts.extend_from_slice(&self.input_offset);
        consts.extend_from_slice(&self.input_scale);
        consts.push(self.output_scale);
        save_network(path, MAGIC_DSUR, &self.net, &consts)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (net, consts) = load_network(path, MAGIC_DSUR)?;
        if net.input_dim() != N_FEATURES || net.output_dim() != 1 {
            return Err(Error::format(
                path,
                format!("surrogate must map {N_FEATURES} features to 1 output, got {:?}", net.dims()),
            ));
        }
        if consts.len() != N_CONSTS {
            return Err(Error::format(
                path,
                format!("expected {N_CONSTS} normalization constants, got {}", consts.len()),
            ));
        }
        let mut input_offset = [0.0; N_FEATURES];
        let mut input_scale = [0.0; N_FEATURES];
        input_offset.copy_from_slice(&consts[..N_FEATURES]);
        input_scale.copy_from_slice(&consts[N_FEATURES..2 * N_FEATURES]);
        Ok(Self { net, input_offset, input_scale, output_scale: consts[N_CONSTS - 1] })
    }
}

/// Surrogate training settings.
#[derive(Debug, Clone)]
pub struct SurrogateTrainConfig {
    /// Latin-hypercube sample count (split 90/10 into train/held-out).
    pub n_samples: usize,
    pub hidden: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// Stop training once the held-out fractional RMSE drops below this.
    pub stop_frac_rmse: f64,
    /// Fail with a training error if the final held-out fractional RMSE
    /// (RMSE divided by the held-out mean DEL) exceeds this. `None` disables
    /// the gate.
    pub required_frac_rmse: Option<f64>,
}

impl Default for SurrogateTrainConfig {
    fn default() -> Self {
        Self {
            n_samples: 20_000,
            hidden: 64,
            max_epochs: 400,
            batch_size: 256,
            lr: 1e-3,
            seed: 1,
            stop_frac_rmse: 0.012,
            required_frac_rmse: Some(0.02),
        }
    }
}

/// Fit quality summary returned alongside the trained net.
#[derive(Debug, Clone, Copy)]
pub struct SurrogateReport {
    /// Held-out RMSE divided by the held-out mean DEL.
    pub held_out_frac_rmse: f64,
    /// Worst relative error over a fresh audit sample.
    pub audit_max_rel_err: f64,
    pub epochs_run: usize,
    pub n_train: usize,
    pub n_held_out: usize,
}

/// Sampling ranges for the latent factors behind a feature vector. The
/// ranges deliberately overshoot normal operating conditions so the
/// surrogate stays accurate on the excursions a simulator produces.
const RANGE_WS: (f64, f64) = (4.0, 16.0);
const RANGE_TI: (f64, f64) = (0.0, 0.30);
const RANGE_YAW: (f64, f64) = (-30.0, 30.0);
const RANGE_ASYM: (f64, f64) = (-0.5, 0.5);
const RANGE_WS_JITTER: (f64, f64) = (-0.15, 0.15);
const RANGE_TI_JITTER: (f64, f64) = (-0.25, 0.25);

const LATENT_RANGES: [(f64, f64); 9] = [
    RANGE_WS,
    RANGE_TI,
    RANGE_YAW,
    RANGE_ASYM,
    RANGE_WS_JITTER,
    RANGE_WS_JITTER,
    RANGE_TI_JITTER,
    RANGE_TI_JITTER,
    RANGE_TI_JITTER,
];

/// Latin-hypercube sample: each dimension is stratified into `n` equal bins
/// with exactly one point per bin, bins paired by independent shuffles.
fn latin_hypercube<R: Rng>(n: usize, ranges: &[(f64, f64)], rng: &mut R) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; ranges.len()]; n];
    for (d, &(lo, hi)) in ranges.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random_range(0.0..1.0);
            out[i][d] = lo + (s as f64 + u) / n as f64 * (hi - lo);
        }
    }
    out
}

/// Maps a latent sample (base speed, base TI, yaw, left/right asymmetry,
/// top/bottom speed jitter, per-sector TI jitter) to a feature vector.
fn latent_to_features(z: &[f64]) -> DelFeatures {
    let (u, ti, yaw, asym) = (z[0], z[1], z[2], z[3]);
    DelFeatures {
        sector_ws: [
            u * (1.0 + asym / 2.0),
            u * (1.0 - asym / 2.0),
            u * (1.0 + z[4]),
            u * (1.0 + z[5]),
        ],
        sector_ti: [
            (ti * (1.0 + z[6])).max(0.0),
            (ti * (1.0 + z[7])).max(0.0),
            (ti * (1.0 + z[8])).max(0.0),
            ti,
        ],
        yaw,
    }
}

fn sample_features<R: Rng>(n: usize, rng: &mut R) -> Vec<DelFeatures> {
    latin_hypercube(n, &LATENT_RANGES, rng).iter().map(|z| latent_to_features(z)).collect()
}

/// Trains a surrogate against the analytic model. Deterministic for a fixed
/// config (sampling, initialization, and batch order all derive from
/// `cfg.seed`).
pub fn train_surrogate(
    oracle: &DelOracle,
    cfg: &SurrogateTrainConfig,
) -> Result<(SurrogateNet, SurrogateReport)> {
    assert!(cfg.n_samples >= 20, "need enough samples for a train/held-out split");
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, &[0x5D_5A_70]));

    let features = sample_features(cfg.n_samples, &mut rng);
    let targets: Vec<f64> = features.iter().map(|f| oracle.eval(f)).collect();

    // Data-driven input normalization to roughly [-1, 1].
    let mut lo = [f64::INFINITY; N_FEATURES];
    let mut hi = [f64::NEG_INFINITY; N_FEATURES];
    for f in &features {
        for (i, v) in f.to_array().iter().enumerate() {
            lo[i] = lo[i].min(*v);
            hi[i] = hi[i].max(*v);
        }
    }
    let mut input_offset = [0.0; N_FEATURES];
    let mut input_scale = [0.0; N_FEATURES];
    for i in 0..N_FEATURES {
        input_offset[i] = 0.5 * (lo[i] + hi[i]);
        input_scale[i] = 2.0 / (hi[i] - lo[i]).max(1e-9);
    }

    // 90/10 split on shuffled indices.
    let mut order: Vec<usize> = (0..cfg.n_samples).collect();
    order.shuffle(&mut rng);
    let n_held = (cfg.n_samples / 10).max(1);
    let (held_idx, train_idx) = order.split_at(n_held);

    let output_scale =
        train_idx.iter().map(|&i| targets[i]).sum::<f64>() / train_idx.len() as f64;
    assert!(output_scale > 0.0, "mean training DEL must be positive");

    let normalize = |f: &DelFeatures| {
        let raw = f.to_array();
        let mut x = [0.0; N_FEATURES];
        for i in 0..N_FEATURES {
            x[i] = (raw[i] - input_offset[i]) * input_scale[i];
        }
        x
    };
    let rows = |idx: &[usize]| {
        Matrix::from_rows(idx.len(), N_FEATURES, |r| normalize(&features[idx[r]]).to_vec())
    };
    let held_inputs = rows(held_idx);
    let held_targets: Vec<f64> = held_idx.iter().map(|&i| targets[i]).collect();
    let held_mean = held_targets.iter().sum::<f64>() / held_targets.len() as f64;

    let mut net = Mlp::with_init(
        &[N_FEATURES, cfg.hidden, cfg.hidden, 1],
        &[Activation::Tanh, Activation::Tanh, Activation::Softplus],
        &mut rng,
    );
    let mut opt = Adam::new(net.num_params(), cfg.lr);

    let frac_rmse = |net: &Mlp| -> f64 {
        let pred = net.forward(&held_inputs);
        let mse = held_targets
            .iter()
            .enumerate()
            .map(|(r, &y)| {
                let e = pred.get(r, 0) * output_scale - y;
                e * e
            })
            .sum::<f64>()
            / held_targets.len() as f64;
        mse.sqrt() / held_mean
    };

    let mut shuffled: Vec<usize> = train_idx.to_vec();
    let mut best = (f64::INFINITY, net.params().to_vec());
    let mut epochs_run = 0;
    for epoch in 0..cfg.max_epochs {
        epochs_run = epoch + 1;
        shuffled.shuffle(&mut rng);
        for chunk in shuffled.chunks(cfg.batch_size) {
            let input = rows(chunk);
            let tape = net.forward_tape(&input);
            let out = tape.output();
            // Relative squared error: L = mean(((pred*s - y) / y)^2).
            let mut upstream = Matrix::zeros(chunk.len(), 1);
            for (r, &i) in chunk.iter().enumerate() {
                let y = targets[i];
                let pred = out.get(r, 0) * output_scale;
                upstream.row_mut(r)[0] =
                    2.0 * (pred - y) / (y * y) * output_scale / chunk.len() as f64;
            }
            let (grads, _) = net.backward(&tape, &upstream, false);
            opt.step(net.params_mut(), &grads);
        }
        let score = frac_rmse(&net);
        if score < best.0 {
            best = (score, net.params().to_vec());
        }
        if score <= cfg.stop_frac_rmse {
            break;
        }
    }
    net.params_mut().copy_from_slice(&best.1);
    let held_out_frac_rmse = best.0;

    if let Some(gate) = cfg.required_frac_rmse {
        if held_out_frac_rmse > gate {
            return Err(Error::Training(format!(
                "held-out fractional RMSE {held_out_frac_rmse:.4} exceeds {gate:.4} after {epochs_run} epochs"
            )));
        }
    }

    let surrogate = SurrogateNet { net, input_offset, input_scale, output_scale };

    // Fresh audit draw (independent of the training stream).
    let mut audit_rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, &[0xA0D17]));
    let audit = sample_features(1000.min(cfg.n_samples), &mut audit_rng);
    let audit_max_rel_err = audit
        .iter()
        .map(|f| {
            let y = oracle.eval(f);
            (surrogate.estimate(f) - y).abs() / y
        })
        .fold(0.0, f64::max);

    Ok((
        surrogate,
        SurrogateReport {
            held_out_frac_rmse,
            audit_max_rel_err,
            epochs_run,
            n_train: train_idx.len(),
            n_held_out: held_idx.len(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FarmConfig;

    fn small_cfg() -> SurrogateTrainConfig {
        SurrogateTrainConfig {
            n_samples: 2000,
            hidden: 24,
            max_epochs: 300,
            batch_size: 128,
            lr: 2e-3,
            seed: 7,
            stop_frac_rmse: 0.05,
            required_frac_rmse: None,
        }
    }

    fn oracle() -> DelOracle {
        DelOracle::from_config(&FarmConfig::default())
    }

    #[test]
    fn small_training_run_fits_the_oracle() {
        let (net, report) = train_surrogate(&oracle(), &small_cfg()).unwrap();
        assert!(
            report.held_out_frac_rmse < 0.10,
            "tiny surrogate should reach 10%: got {}",
            report.held_out_frac_rmse
        );
        // Spot-check a nominal point.
        let f = DelFeatures { sector_ws: [10.0; 4], sector_ti: [0.05; 4], yaw: 0.0 };
        let (est, truth) = (net.estimate(&f), oracle().eval(&f));
        assert!(
            (est - truth).abs() / truth < 0.2,
            "nominal estimate {est} too far from {truth}"
        );
    }

    #[test]
    fn training_is_deterministic_for_a_seed() {
        let cfg = SurrogateTrainConfig {
            n_samples: 300,
            hidden: 8,
            max_epochs: 10,
            stop_frac_rmse: 0.0,
            ..small_cfg()
        };
        let (a, ra) = train_surrogate(&oracle(), &cfg).unwrap();
        let (b, rb) = train_surrogate(&oracle(), &cfg).unwrap();
        assert_eq!(ra.epochs_run, rb.epochs_run);
        for (x, y) in a.net.params().iter().zip(b.net.params()) {
            assert_eq!(x.to_bits(), y.to_bits(), "same seed must give identical weights");
        }
        assert_eq!(a.output_scale.to_bits(), b.output_scale.to_bits());
    }

    #[test]
    fn estimates_stay_positive_everywhere() {
        let cfg = SurrogateTrainConfig {
            n_samples: 300,
            hidden: 8,
            max_epochs: 3,
            stop_frac_rmse: 0.0,
            ..small_cfg()
        };
        let (net, _) = train_surrogate(&oracle(), &cfg).unwrap();
        // Include points far outside the training ranges.
        for ws in [0.0, 2.0, 10.0, 30.0] {
            for yaw in [-60.0, 0.0, 60.0] {
                let f = DelFeatures { sector_ws: [ws; 4], sector_ti: [0.5; 4], yaw };
                let est = net.estimate(&f);
                assert!(est > 0.0 && est.is_finite(), "estimate {est} at ws={ws} yaw={yaw}");
            }
        }
    }

    #[test]
    fn checkpoint_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("surrogate.bin");
        let cfg = SurrogateTrainConfig {
            n_samples: 300,
            hidden: 8,
            max_epochs: 3,
            stop_frac_rmse: 0.0,
            ..small_cfg()
        };
        let (net, _) = train_surrogate(&oracle(), &cfg).unwrap();
        net.save(&path).unwrap();
        let loaded = SurrogateNet::load(&path).unwrap();
        for (a, b) in loaded.net.params().iter().zip(net.net.params()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let f = DelFeatures { sector_ws: [8.0, 11.0, 9.5, 10.5], sector_ti: [0.08; 4], yaw: 12.0 };
        assert_eq!(loaded.estimate(&f).to_bits(), net.estimate(&f).to_bits());
    }

    #[test]
    fn mismatched_checkpoint_kind_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.bin");
        let net = Mlp::zeros(&[9, 4, 1], &[Activation::Tanh, Activation::Softplus]);
        save_network(&path, crate::nn::MAGIC_MNET, &net, &[]).unwrap();
        let err = SurrogateNet::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("magic"), "unexpected error: {err}");
    }

    #[test]
    fn latin_hypercube_is_stratified_per_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 64;
        let ranges = [(0.0, 1.0), (-2.0, 2.0), (10.0, 20.0)];
        let pts = latin_hypercube(n, &ranges, &mut rng);
        for (d, &(lo, hi)) in ranges.iter().enumerate() {
            let mut counts = vec![0usize; n];
            for p in &pts {
                assert!(p[d] >= lo && p[d] < hi, "sample out of range");
                let s = ((p[d] - lo) / (hi - lo) * n as f64).floor() as usize;
                counts[s.min(n - 1)] += 1;
            }
            assert!(
                counts.iter().all(|&c| c == 1),
                "dimension {d} not stratified: one point per bin expected"
            );
        }
    }
}
