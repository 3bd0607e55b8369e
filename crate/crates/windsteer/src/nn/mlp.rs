//! Fully-connected network with exact reverse-mode differentiation.
//!
//! Parameters for all layers live in one flat `Vec<f64>` (per layer: weight
//! matrix `[out x in]` row-major, then bias `[out]`). Gradients come back in
//! the identical layout, so optimizers and checkpoint code never need to know
//! the network structure.

use rand::Rng;

use super::Matrix;

/// Elementwise nonlinearity applied after a layer's affine map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// Identity (typical output layer).
    Linear,
    /// Hyperbolic tangent.
    Tanh,
    /// Rectified linear unit.
    Relu,
    /// `ln(1 + exp(x))`; smooth and strictly positive.
    Softplus,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Linear => x,
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Softplus => super::softplus(x),
        }
    }

    /// Derivative expressed through the *output* value `a = apply(x)`.
    ///
    /// Every supported activation admits this form, which lets the backward
    /// pass keep only post-activation values.
    #[inline]
    fn deriv_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            // a = ln(1+e^x)  =>  sigmoid(x) = 1 - e^{-a}
            Activation::Softplus => 1.0 - (-a).exp(),
        }
    }

    /// Stable byte tag for serialization.
    pub fn tag(self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::Tanh => 1,
            Activation::Relu => 2,
            Activation::Softplus => 3,
        }
    }

    /// Inverse of [`Activation::tag`].
    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Relu),
            3 => Some(Activation::Softplus),
            _ => None,
        }
    }
}

/// Multilayer perceptron with flat parameter storage.
#[derive(Debug, Clone)]
pub struct Mlp {
    /// Layer widths, input first: `[in, h1, .., out]`.
    dims: Vec<usize>,
    /// One activation per layer (`dims.len() - 1` entries).
    acts: Vec<Activation>,
    /// Flat parameters; see module docs for layout.
    params: Vec<f64>,
    /// Start offset of each layer's weight block in `params`.
    offsets: Vec<usize>,
}

/// Saved forward-pass state needed by [`Mlp::backward`]: the input batch and
/// every layer's post-activation batch.
pub struct Tape {
    /// `activations[0]` is the input; `activations[l+1]` is layer `l` output.
    activations: Vec<Matrix>,
}

impl Tape {
    /// Network output for this pass (last layer's activations).
    pub fn output(&self) -> &Matrix {
        self.activations.last().expect("tape holds at least the input")
    }
}

impl Mlp {
    /// Builds a network with all parameters zero.
    ///
    /// `dims` has the input width first; `acts` must have one entry per layer.
    pub fn zeros(dims: &[usize], acts: &[Activation]) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        assert_eq!(acts.len(), dims.len() - 1, "one activation per layer");
        let mut offsets = Vec::with_capacity(acts.len());
        let mut total = 0usize;
        for l in 0..acts.len() {
            offsets.push(total);
            total += dims[l + 1] * dims[l] + dims[l + 1];
        }
        Self {
            dims: dims.to_vec(),
            acts: acts.to_vec(),
            params: vec![0.0; total],
            offsets,
        }
    }

    /// Builds a network with uniform `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`
    /// weights and biases (the common dense-layer default).
    pub fn with_init<R: Rng>(dims: &[usize], acts: &[Activation], rng: &mut R) -> Self {
        let mut net = Self::zeros(dims, acts);
        for l in 0..net.acts.len() {
            let bound = 1.0 / (net.dims[l] as f64).sqrt();
            let (w, b) = net.layer_ranges(l);
            for i in w.chain(b) {
                net.params[i] = rng.random_range(-bound..bound);
            }
        }
        net
    }

    fn layer_ranges(&self, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let start = self.offsets[l];
        let n_w = self.dims[l + 1] * self.dims[l];
        let n_b = self.dims[l + 1];
        (start..start + n_w, start + n_w..start + n_w + n_b)
    }

    /// Layer widths, input first.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Per-layer activations.
    pub fn activations(&self) -> &[Activation] {
        &self.acts
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Copies parameters from another identically-shaped network.
    pub fn copy_params_from(&mut self, other: &Mlp) {
        assert_eq!(self.dims, other.dims, "network shapes differ");
        self.params.copy_from_slice(&other.params);
    }

    /// In-place polyak update: `p <- (1 - tau) * p + tau * src`.
    pub fn polyak_from(&mut self, src: &Mlp, tau: f64) {
        assert_eq!(self.dims, src.dims, "network shapes differ");
        for (p, s) in self.params.iter_mut().zip(&src.params) {
            *p += tau * (*s - *p);
        }
    }

    /// Forward pass over a batch; rows are samples.
    pub fn forward(&self, input: &Matrix) -> Matrix {
        self.forward_tape(input).activations.pop().unwrap()
    }

    /// Convenience single-sample forward.
    pub fn forward_one(&self, input: &[f64]) -> Vec<f64> {
        self.forward(&Matrix::from_row(input)).data
    }

    /// Forward pass that records everything [`Mlp::backward`] needs.
    pub fn forward_tape(&self, input: &Matrix) -> Tape {
        assert_eq!(
            input.cols,
            self.input_dim(),
            "input width {} does not match network input {}",
            input.cols,
            self.input_dim()
        );
        let batch = input.rows;
        let mut activations = Vec::with_capacity(self.acts.len() + 1);
        activations.push(input.clone());
        for l in 0..self.acts.len() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let w_start = self.offsets[l];
            let b_start = w_start + n_out * n_in;
            let x = &activations[l];
            let mut y = Matrix::zeros(batch, n_out);
            for r in 0..batch {
                let xr = x.row(r);
                let yr = y.row_mut(r);
                for o in 0..n_out {
                    let wrow = &self.params[w_start + o * n_in..w_start + (o + 1) * n_in];
                    let mut acc = self.params[b_start + o];
                    for i in 0..n_in {
                        acc += wrow[i] * xr[i];
                    }
                    yr[o] = self.acts[l].apply(acc);
                }
            }
            activations.push(y);
        }
        Tape { activations }
    }

    /// Reverse pass.
    ///
    /// `upstream` is `dL/d(output)` with the same shape as the forward output
    /// (summed over the batch, i.e. the caller bakes any `1/B` factor into
    /// `upstream`). Returns the flat parameter gradient and, when
    /// `want_input_grad` is set, `dL/d(input)`.
    pub fn backward(
        &self,
        tape: &Tape,
        upstream: &Matrix,
        want_input_grad: bool,
    ) -> (Vec<f64>, Option<Matrix>) {
        let out = tape.output();
        assert_eq!(upstream.rows, out.rows, "upstream batch mismatch");
        assert_eq!(upstream.cols, out.cols, "upstream width mismatch");
        let batch = upstream.rows;
        let mut grads = vec![0.0; self.params.len()];
        let mut delta = upstream.clone();

        for l in (0..self.acts.len()).rev() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let w_start = self.offsets[l];
            let b_start = w_start + n_out * n_in;
            let a_out = &tape.activations[l + 1];
            let a_in = &tape.activations[l];

            // dL/dz = dL/da * act'(z), with act' recovered from the output.
            for r in 0..batch {
                let ar = a_out.row(r);
                let dr = delta.row_mut(r);
                for o in 0..n_out {
                    dr[o] *= self.acts[l].deriv_from_output(ar[o]);
                }
            }

            // Parameter gradients: dW[o][i] = sum_b dz[b][o] * x[b][i].
            for r in 0..batch {
                let dr = delta.row(r);
                let xr = a_in.row(r);
                for o in 0..n_out {
                    let dz = dr[o];
                    if dz == 0.0 {
                        continue;
                    }
                    let wg = &mut grads[w_start + o * n_in..w_start + (o + 1) * n_in];
                    for i in 0..n_in {
                        wg[i] += dz * xr[i];
                    }
                }
            }
            for r in 0..batch {
                let dr = delta.row(r);
                for o in 0..n_out {
                    grads[b_start + o] += dr[o];
                }
            }

            // Propagate to the layer input unless this is the first layer and
            // the caller does not need input gradients.
            if l == 0 && !want_input_grad {
                delta = Matrix::zeros(0, 0);
                break;
            }
            let mut next = Matrix::zeros(batch, n_in);
            for r in 0..batch {
                let dr = delta.row(r);
                let nr = next.row_mut(r);
                for o in 0..n_out {
                    let dz = dr[o];
                    if dz == 0.0 {
                        continue;
                    }
                    let wrow = &self.params[w_start + o * n_in..w_start + (o + 1) * n_in];
                    for i in 0..n_in {
                        nr[i] += dz * wrow[i];
                    }
                }
            }
            delta = next;
        }

        let input_grad = if want_input_grad { Some(delta) } else { None };
        (grads, input_grad)
    }
}
