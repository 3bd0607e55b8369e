//! Squashed-Gaussian policy head for bounded continuous actions.
//!
//! An actor network emits `(mu, log_std_raw)` per action dimension. The head
//! soft-clamps the log standard deviation, draws a reparameterized Gaussian
//! sample, squashes it through `tanh`, and rescales into the action interval.
//! Log-probabilities include the tanh change-of-variables correction in a
//! numerically stable form, so they stay finite even deep in the saturated
//! tails.

use super::softplus;

const LN_2PI: f64 = 1.8378770664093453;

/// Maps an unbounded Gaussian sample into `offset ± scale`.
#[derive(Debug, Clone, Copy)]
pub struct SquashedGaussianHead {
    /// Half-width of the action interval.
    pub scale: f64,
    /// Center of the action interval.
    pub offset: f64,
    /// Soft clamp range for the log standard deviation.
    pub log_std_min: f64,
    pub log_std_max: f64,
}

/// One sampled action with everything needed for gradients and bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct ActionSample {
    /// Final action in `[offset - scale, offset + scale]`.
    pub action: f64,
    /// Log-density of `action` under the squashed distribution.
    pub log_prob: f64,
    /// Pre-squash Gaussian sample `u = mu + sigma * eps`.
    pub pre_tanh: f64,
    /// Effective (clamped) log standard deviation.
    pub log_std: f64,
}

/// Gradients of a scalar loss with respect to the raw head inputs.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeadGrad {
    pub d_mu: f64,
    pub d_log_std_raw: f64,
}

impl SquashedGaussianHead {
    /// Head producing actions in `[-limit, limit]` with the conventional
    /// log-std clamp `[-5, 2]`.
    pub fn symmetric(limit: f64) -> Self {
        Self { scale: limit, offset: 0.0, log_std_min: -5.0, log_std_max: 2.0 }
    }

    /// Soft clamp: `min + (max - min) * (tanh(raw) + 1) / 2`.
    #[inline]
    pub fn effective_log_std(&self, raw: f64) -> f64 {
        self.log_std_min + 0.5 * (self.log_std_max - self.log_std_min) * (raw.tanh() + 1.0)
    }

    /// Stable `ln(1 - tanh(u)^2) = ln 4 - 2u - 2 softplus(-2u)`.
    #[inline]
    fn ln_one_minus_tanh_sq(u: f64) -> f64 {
        4.0f64.ln() - 2.0 * u - 2.0 * softplus(-2.0 * u)
    }

    /// Reparameterized sample from standard-normal noise `eps`.
    pub fn sample(&self, mu: f64, log_std_raw: f64, eps: f64) -> ActionSample {
        let log_std = self.effective_log_std(log_std_raw);
        let sigma = log_std.exp();
        let u = mu + sigma * eps;
        let t = u.tanh();
        // Gaussian log-density of u plus the tanh/scale Jacobian correction.
        let log_prob = -0.5 * eps * eps
            - log_std
            - 0.5 * LN_2PI
            - self.scale.ln()
            - Self::ln_one_minus_tanh_sq(u);
        ActionSample { action: self.offset + self.scale * t, log_prob, pre_tanh: u, log_std }
    }

    /// Mode of the squashed distribution (used for deterministic evaluation).
    pub fn deterministic(&self, mu: f64) -> f64 {
        self.offset + self.scale * mu.tanh()
    }

    /// Log-density of an arbitrary in-range action.
    pub fn log_prob_of(&self, mu: f64, log_std_raw: f64, action: f64) -> f64 {
        let log_std = self.effective_log_std(log_std_raw);
        let sigma = log_std.exp();
        let t = ((action - self.offset) / self.scale).clamp(-1.0 + 1e-12, 1.0 - 1e-12);
        let u = t.atanh();
        let z = (u - mu) / sigma;
        -0.5 * z * z - log_std - 0.5 * LN_2PI - self.scale.ln() - Self::ln_one_minus_tanh_sq(u)
    }

    /// Exact gradients through [`SquashedGaussianHead::sample`].
    ///
    /// Given upstream `dL/d(action)` and `dL/d(log_prob)` for the sample drawn
    /// with noise `eps`, returns `dL/d(mu)` and `dL/d(log_std_raw)` via the
    /// reparameterization path.
    pub fn backward(
        &self,
        mu: f64,
        log_std_raw: f64,
        eps: f64,
        d_action: f64,
        d_log_prob: f64,
    ) -> HeadGrad {
        let log_std = self.effective_log_std(log_std_raw);
        let sigma = log_std.exp();
        let u = mu + sigma * eps;
        let t = u.tanh();
        let sech2 = 1.0 - t * t;

        // d(action)/du = scale * (1 - tanh(u)^2); d(log_prob)/du = 2 tanh(u).
        let da_dmu = self.scale * sech2;
        let dlp_dmu = 2.0 * t;
        // u depends on log_std through sigma * eps; log_prob also has the
        // explicit -log_std term.
        let du_dls = sigma * eps;
        let da_dls = da_dmu * du_dls;
        let dlp_dls = -1.0 + dlp_dmu * du_dls;

        // Soft clamp chain rule: d(log_std)/d(raw).
        let tr = log_std_raw.tanh();
        let dls_draw = 0.5 * (self.log_std_max - self.log_std_min) * (1.0 - tr * tr);

        HeadGrad {
            d_mu: d_action * da_dmu + d_log_prob * dlp_dmu,
            d_log_std_raw: (d_action * da_dls + d_log_prob * dlp_dls) * dls_draw,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn head() -> SquashedGaussianHead {
        SquashedGaussianHead { scale: 30.0, offset: 0.0, log_std_min: -5.0, log_std_max: 2.0 }
    }

    #[test]
    fn actions_stay_in_bounds_and_log_probs_stay_finite() {
        let h = head();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let mu = rng.random_range(-50.0..50.0);
            let raw = rng.random_range(-20.0..20.0);
            let eps: f64 = rng.sample(StandardNormal);
            let s = h.sample(mu, raw, eps);
            assert!(s.action.abs() <= 30.0, "action {} out of bounds", s.action);
            assert!(s.log_prob.is_finite(), "log_prob not finite at mu={mu} raw={raw} eps={eps}");
        }
    }

    #[test]
    fn log_std_respects_soft_clamp() {
        let h = head();
        assert!((h.effective_log_std(-1e9) - (-5.0)).abs() < 1e-9);
        assert!((h.effective_log_std(1e9) - 2.0).abs() < 1e-9);
        assert!((h.effective_log_std(0.0) - (-1.5)).abs() < 1e-12);
    }

    #[test]
    fn sampled_log_prob_agrees_with_density_at_action() {
        let h = head();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mu = rng.random_range(-2.0..2.0);
            let raw = rng.random_range(-1.0..1.0);
            let eps: f64 = rng.sample(StandardNormal);
            let s = h.sample(mu, raw, eps);
            let lp = h.log_prob_of(mu, raw, s.action);
            assert!(
                (s.log_prob - lp).abs() < 1e-6,
                "sample log_prob {} vs density {}",
                s.log_prob,
                lp
            );
        }
    }

    #[test]
    fn density_integrates_to_one_over_action_range() {
        // Trapezoid quadrature of exp(log_prob_of) over the action interval.
        let h = head();
        let (mu, raw) = (0.4, -0.3);
        let n = 20_000;
        let a0 = -30.0 + 1e-9;
        let a1 = 30.0 - 1e-9;
        let dx = (a1 - a0) / n as f64;
        let mut total = 0.0;
        for i in 0..=n {
            let a = a0 + i as f64 * dx;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            total += w * h.log_prob_of(mu, raw, a).exp() * dx;
        }
        assert!((total - 1.0).abs() < 1e-3, "density integrates to {total}");
    }

    #[test]
    fn backward_matches_finite_differences() {
        let h = head();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // Scalar loss L = 2*action + 3*log_prob exercises both upstream paths.
        let loss = |mu: f64, raw: f64, eps: f64| {
            let s = h.sample(mu, raw, eps);
            2.0 * s.action + 3.0 * s.log_prob
        };
        for _ in 0..100 {
            let mu = rng.random_range(-2.0..2.0);
            let raw = rng.random_range(-1.5..1.5);
            let eps: f64 = rng.sample(StandardNormal);
            let g = h.backward(mu, raw, eps, 2.0, 3.0);
            let d = 1e-6;
            let num_mu = (loss(mu + d, raw, eps) - loss(mu - d, raw, eps)) / (2.0 * d);
            let num_raw = (loss(mu, raw + d, eps) - loss(mu, raw - d, eps)) / (2.0 * d);
            assert!(
                (g.d_mu - num_mu).abs() < 1e-4 * num_mu.abs().max(1.0),
                "d_mu {} vs numeric {}",
                g.d_mu,
                num_mu
            );
            assert!(
                (g.d_log_std_raw - num_raw).abs() < 1e-4 * num_raw.abs().max(1.0),
                "d_log_std_raw {} vs numeric {}",
                g.d_log_std_raw,
                num_raw
            );
        }
    }

    #[test]
    fn deterministic_action_is_distribution_mode_direction() {
        let h = head();
        assert!((h.deterministic(0.0)).abs() < 1e-12);
        assert!(h.deterministic(10.0) > 29.9);
        assert!(h.deterministic(-10.0) < -29.9);
    }
}
