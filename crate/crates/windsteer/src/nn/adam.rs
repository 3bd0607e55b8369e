//! Adaptive moment estimation optimizer over flat parameter slices.

/// Adam optimizer state for one parameter vector.
///
/// Standard bias-corrected first/second moment updates; operates on plain
/// slices so it pairs with any flat-storage network.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    /// Optimizer for `n` parameters with the given learning rate and the
    /// conventional defaults `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8`.
    pub fn new(n: usize, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: vec![0.0; n], v: vec![0.0; n] }
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr
    }

    /// Applies one update step in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.m.len(), "parameter count mismatch");
        assert_eq!(grads.len(), self.m.len(), "gradient count mismatch");
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        // With fresh moments the bias-corrected update is lr * g / (|g| + eps),
        // i.e. a signed step of ~lr regardless of gradient magnitude.
        let mut opt = Adam::new(2, 0.01);
        let mut p = [1.0, -2.0];
        opt.step(&mut p, &[1000.0, -0.003]);
        assert!((p[0] - (1.0 - 0.01)).abs() < 1e-6, "got {}", p[0]);
        assert!((p[1] - (-2.0 + 0.01)).abs() < 1e-6, "got {}", p[1]);
    }

    #[test]
    fn converges_on_quadratic_bowl() {
        let mut opt = Adam::new(3, 0.05);
        let target = [0.3, -1.4, 2.2];
        let mut p = [5.0, 5.0, -5.0];
        for _ in 0..2000 {
            let g: Vec<f64> = p.iter().zip(&target).map(|(x, t)| 2.0 * (x - t)).collect();
            opt.step(&mut p, &g);
        }
        for (x, t) in p.iter().zip(&target) {
            assert!((x - t).abs() < 1e-3, "did not converge: {x} vs {t}");
        }
    }
}
