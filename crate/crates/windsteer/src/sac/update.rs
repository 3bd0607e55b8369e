//! Gradient updates: twin-critic regression to entropy-regularized
//! bootstrapped targets, policy ascent through frozen critics, temperature
//! control, and polyak target tracking.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::agent::{AgentNets, CRITIC_IN};
use super::replay::Transition;
use crate::env::OBS_DIM;
use crate::nn::{Adam, Matrix, Mlp};

/// Optimizer state for one agent's networks.
pub struct AgentOptimizers {
    pub actor: Adam,
    pub critic1: Adam,
    pub critic2: Adam,
    pub alpha: Adam,
}

impl AgentOptimizers {
    pub fn new(nets: &AgentNets, lr: f64) -> Self {
        Self {
            actor: Adam::new(nets.actor.num_params(), lr),
            critic1: Adam::new(nets.critic1.num_params(), lr),
            critic2: Adam::new(nets.critic2.num_params(), lr),
            alpha: Adam::new(1, lr),
        }
    }
}

/// Stacks observations and normalized actions into a critic input batch.
fn critic_input(obs: &[[f64; OBS_DIM]], actions: &[f64], scale: f64) -> Matrix {
    let mut input = Matrix::zeros(obs.len(), CRITIC_IN);
    for r in 0..obs.len() {
        let row = input.row_mut(r);
        row[..OBS_DIM].copy_from_slice(&obs[r]);
        row[OBS_DIM] = actions[r] / scale;
    }
    input
}

/// One twin-critic regression step toward
/// `y = r + gamma * (min_k Q'_k(s', a') - alpha * log pi(a'|s'))` with `a'`
/// freshly drawn from the current policy. Returns both MSE losses.
pub fn critic_update(
    nets: &mut AgentNets,
    opt: &mut AgentOptimizers,
    batch: &[Transition],
    gamma: f64,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let b = batch.len();
    let alpha = nets.alpha();
    let scale = nets.head.scale;

    let next_obs_rows: Vec<[f64; OBS_DIM]> = batch.iter().map(|t| t.next_obs).collect();
    let next_obs = Matrix::from_rows(b, OBS_DIM, |r| next_obs_rows[r].to_vec());
    let actor_out = nets.actor.forward(&next_obs);
    let mut next_actions = vec![0.0; b];
    let mut next_logps = vec![0.0; b];
    for r in 0..b {
        let eps: f64 = rng.sample(rand_distr::StandardNormal);
        let s = nets.head.sample(actor_out.get(r, 0), actor_out.get(r, 1), eps);
        next_actions[r] = s.action;
        next_logps[r] = s.log_prob;
    }
    let next_in = critic_input(&next_obs_rows, &next_actions, scale);
    let q1p = nets.target1.forward(&next_in);
    let q2p = nets.target2.forward(&next_in);
    let targets: Vec<f64> = (0..b)
        .map(|r| {
            let qmin = q1p.get(r, 0).min(q2p.get(r, 0));
            batch[r].reward + gamma * (qmin - alpha * next_logps[r])
        })
        .collect();

    let obs_rows: Vec<[f64; OBS_DIM]> = batch.iter().map(|t| t.obs).collect();
    let actions: Vec<f64> = batch.iter().map(|t| t.action).collect();
    let input = critic_input(&obs_rows, &actions, scale);

    let run = |critic: &mut Mlp, copt: &mut Adam| -> f64 {
        let tape = critic.forward_tape(&input);
        let mut loss = 0.0;
        let mut upstream = Matrix::zeros(b, 1);
        for r in 0..b {
            let e = tape.output().get(r, 0) - targets[r];
            loss += e * e;
            upstream.row_mut(r)[0] = 2.0 * e / b as f64;
        }
        let (grads, _) = critic.backward(&tape, &upstream, false);
        copt.step(critic.params_mut(), &grads);
        loss / b as f64
    };
    let l1 = run(&mut nets.critic1, &mut opt.critic1);
    let l2 = run(&mut nets.critic2, &mut opt.critic2);
    (l1, l2)
}

/// One policy step: minimize `E[alpha * log pi(a|s) - min_k Q_k(s, a)]` over
/// the actor parameters with the critics frozen (only their input gradients
/// flow back). Returns the loss and the batch mean log-probability.
pub fn actor_update(
    nets: &mut AgentNets,
    opt: &mut AgentOptimizers,
    batch: &[Transition],
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let b = batch.len();
    let alpha = nets.alpha();
    let scale = nets.head.scale;

    let obs_rows: Vec<[f64; OBS_DIM]> = batch.iter().map(|t| t.obs).collect();
    let obs = Matrix::from_rows(b, OBS_DIM, |r| obs_rows[r].to_vec());
    let actor_tape = nets.actor.forward_tape(&obs);
    let actor_out = actor_tape.output().clone();

    let mut eps_draws = vec![0.0; b];
    let mut actions = vec![0.0; b];
    let mut logps = vec![0.0; b];
    for r in 0..b {
        let eps: f64 = rng.sample(rand_distr::StandardNormal);
        let s = nets.head.sample(actor_out.get(r, 0), actor_out.get(r, 1), eps);
        eps_draws[r] = eps;
        actions[r] = s.action;
        logps[r] = s.log_prob;
    }
    let critic_in = critic_input(&obs_rows, &actions, scale);
    let t1 = nets.critic1.forward_tape(&critic_in);
    let t2 = nets.critic2.forward_tape(&critic_in);

    let mut up1 = Matrix::zeros(b, 1);
    let mut up2 = Matrix::zeros(b, 1);
    let mut loss = 0.0;
    let mut mean_logp = 0.0;
    for r in 0..b {
        let (v1, v2) = (t1.output().get(r, 0), t2.output().get(r, 0));
        loss += alpha * logps[r] - v1.min(v2);
        mean_logp += logps[r];
        // The min picks which critic the action gradient flows through.
        if v1 <= v2 {
            up1.row_mut(r)[0] = -1.0 / b as f64;
        } else {
            up2.row_mut(r)[0] = -1.0 / b as f64;
        }
    }
    loss /= b as f64;
    mean_logp /= b as f64;

    // Input gradients only; critic parameter gradients are discarded.
    let (_, g1) = nets.critic1.backward(&t1, &up1, true);
    let (_, g2) = nets.critic2.backward(&t2, &up2, true);
    let (g1, g2) = (g1.expect("input grads requested"), g2.expect("input grads requested"));

    let mut upstream = Matrix::zeros(b, 2);
    for r in 0..b {
        // Exactly one of the two rows carried upstream, so the sum is the
        // min-critic's gradient. The critic sees action/scale.
        let d_action = (g1.get(r, OBS_DIM) + g2.get(r, OBS_DIM)) / scale;
        let d_logp = alpha / b as f64;
        let hg = nets.head.backward(
            actor_out.get(r, 0),
            actor_out.get(r, 1),
            eps_draws[r],
            d_action,
            d_logp,
        );
        upstream.row_mut(r)[0] = hg.d_mu;
        upstream.row_mut(r)[1] = hg.d_log_std_raw;
    }
    let (grads, _) = nets.actor.backward(&actor_tape, &upstream, false);
    opt.actor.step(nets.actor.params_mut(), &grads);
    (loss, mean_logp)
}

/// One temperature step on `J = alpha * (-mean_logp - target_entropy)`,
/// optimized in log space: entropy above target shrinks alpha, below grows
/// it. Returns the loss.
pub fn temperature_update(
    nets: &mut AgentNets,
    opt: &mut AgentOptimizers,
    mean_logp: f64,
    target_entropy: f64,
) -> f64 {
    let alpha = nets.alpha();
    let c = -mean_logp - target_entropy;
    let mut params = [nets.log_alpha];
    opt.alpha.step(&mut params, &[alpha * c]);
    nets.log_alpha = params[0];
    alpha * c
}

/// Polyak-averages both target critics toward the online critics.
pub fn target_update(nets: &mut AgentNets, tau: f64) {
    nets.target1.polyak_from(&nets.critic1, tau);
    nets.target2.polyak_from(&nets.critic2, tau);
}
