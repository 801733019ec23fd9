//! Two-layer perceptron (affine, LeakyReLU, affine) with hand-derived
//! gradients.
//!
//! All potential functions in the project — the discriminator potentials and
//! the mutual-information statistic — are instances of this one shape, so
//! there is no general autodiff graph: forward caches what backward needs and
//! backward returns parameter gradients summed over the batch plus the input
//! gradient.

use crate::error::{KgaError, Result};
use crate::kernels::matrix::DenseMatrix;
use rand::Rng;

pub const DEFAULT_HIDDEN_DIM: usize = 2048;
pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct MlpParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    /// hidden_dim x input_dim
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    /// output_dim x hidden_dim
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
    /// LeakyReLU negative slope.
    pub leak: f64,
}

/// Activations recorded by [`MlpParams::forward`] for the matching backward
/// pass.
#[derive(Debug, Clone)]
pub struct MlpCache {
    input: DenseMatrix,
    /// Pre-activation of the hidden layer, batch x hidden.
    pre1: DenseMatrix,
    /// Post-activation of the hidden layer, batch x hidden.
    hidden: DenseMatrix,
}

/// Parameter gradients; same shapes as the parameters, summed over the batch.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
}

impl MlpGrads {
    pub fn zeros_like(p: &MlpParams) -> Self {
        MlpGrads {
            w1: DenseMatrix::zeros(p.hidden_dim, p.input_dim),
            b1: vec![0.0; p.hidden_dim],
            w2: DenseMatrix::zeros(p.output_dim, p.hidden_dim),
            b2: vec![0.0; p.output_dim],
        }
    }

    pub fn add_scaled(&mut self, other: &MlpGrads, s: f64) -> Result<()> {
        self.w1.add_scaled(&other.w1, s)?;
        self.w2.add_scaled(&other.w2, s)?;
        for (a, &b) in self.b1.iter_mut().zip(other.b1.iter()) {
            *a += s * b;
        }
        for (a, &b) in self.b2.iter_mut().zip(other.b2.iter()) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(self.w1.data());
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(self.w2.data());
        out.extend_from_slice(&self.b2);
        out
    }
}

impl MlpParams {
    /// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer.
    pub fn init<R: Rng>(
        input_dim: usize,
        hidden_dim: usize,
        output_dim: usize,
        leak: f64,
        rng: &mut R,
    ) -> Self {
        let bound1 = 1.0 / (input_dim as f64).sqrt();
        let bound2 = 1.0 / (hidden_dim as f64).sqrt();
        MlpParams {
            input_dim,
            hidden_dim,
            output_dim,
            w1: DenseMatrix::uniform(hidden_dim, input_dim, -bound1, bound1, rng),
            b1: (0..hidden_dim).map(|_| rng.gen_range(-bound1..bound1)).collect(),
            w2: DenseMatrix::uniform(output_dim, hidden_dim, -bound2, bound2, rng),
            b2: (0..output_dim).map(|_| rng.gen_range(-bound2..bound2)).collect(),
        }
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, output_dim: usize, leak: f64) -> Self {
        MlpParams {
            input_dim,
            hidden_dim,
            output_dim,
            w1: DenseMatrix::zeros(hidden_dim, input_dim),
            b1: vec![0.0; hidden_dim],
            w2: DenseMatrix::zeros(output_dim, hidden_dim),
            b2: vec![0.0; output_dim],
            leak,
        }
    }

    /// Batched forward pass: input is batch x input_dim, output batch x
    /// output_dim. The returned cache belongs to this exact (params, input)
    /// pair.
    pub fn forward(&self, input: &DenseMatrix) -> Result<(DenseMatrix, MlpCache)> {
        if input.cols() != self.input_dim {
            return Err(KgaError::Shape(format!(
                "mlp expects input dim {}, got {}",
                self.input_dim,
                input.cols()
            )));
        }
        let batch = input.rows();
        let mut pre1 = DenseMatrix::zeros(batch, self.hidden_dim);
        for b in 0..batch {
            let x = input.row(b);
            let out = pre1.row_mut(b);
            for h in 0..self.hidden_dim {
                let w = self.w1.row(h);
                let mut acc = self.b1[h];
                for (wi, xi) in w.iter().zip(x.iter()) {
                    acc += wi * xi;
                }
                out[h] = acc;
            }
        }
        let mut hidden = pre1.clone();
        for v in hidden.data_mut() {
            if *v < 0.0 {
                *v *= self.leak;
            }
        }
        let mut output = DenseMatrix::zeros(batch, self.output_dim);
        for b in 0..batch {
            let h = hidden.row(b);
            let out = output.row_mut(b);
            for o in 0..self.output_dim {
                let w = self.w2.row(o);
                let mut acc = self.b2[o];
                for (wi, hi) in w.iter().zip(h.iter()) {
                    acc += wi * hi;
                }
                out[o] = acc;
            }
        }
        let cache = MlpCache {
            input: input.clone(),
            pre1,
            hidden,
        };
        Ok((output, cache))
    }

    /// Backward pass for a cache produced by `forward` on these parameters.
    /// Returns (parameter gradients, gradient wrt the input), both summed over
    /// batch rows.
    pub fn backward(
        &self,
        cache: &MlpCache,
        output_grad: &DenseMatrix,
    ) -> Result<(MlpGrads, DenseMatrix)> {
        let batch = cache.input.rows();
        if cache.input.cols() != self.input_dim
            || cache.pre1.cols() != self.hidden_dim
            || cache.pre1.rows() != batch
        {
            return Err(KgaError::Contract(
                "mlp cache does not match these parameters".into(),
            ));
        }
        if output_grad.rows() != batch || output_grad.cols() != self.output_dim {
            return Err(KgaError::Contract(format!(
                "output gradient {}x{} does not match cache batch {} / output dim {}",
                output_grad.rows(),
                output_grad.cols(),
                batch,
                self.output_dim
            )));
        }

        let mut grads = MlpGrads::zeros_like(self);
        let mut input_grad = DenseMatrix::zeros(batch, self.input_dim);
        let mut dhidden = vec![0.0; self.hidden_dim];
        for b in 0..batch {
            let dy = output_grad.row(b);
            let h = cache.hidden.row(b);
            let x = cache.input.row(b);
            // Second affine layer.
            for o in 0..self.output_dim {
                let g = dy[o];
                grads.b2[o] += g;
                let wrow = grads.w2.row_mut(o);
                for (wi, hi) in wrow.iter_mut().zip(h.iter()) {
                    *wi += g * hi;
                }
            }
            // dL/dhidden = W2^T dy
            for item in dhidden.iter_mut() {
                *item = 0.0;
            }
            for o in 0..self.output_dim {
                let g = dy[o];
                let w = self.w2.row(o);
                for (dh, wi) in dhidden.iter_mut().zip(w.iter()) {
                    *dh += g * wi;
                }
            }
            // Through LeakyReLU: slope 1 for z >= 0, `leak` below.
            let pre = cache.pre1.row(b);
            for (dh, &z) in dhidden.iter_mut().zip(pre.iter()) {
                if z < 0.0 {
                    *dh *= self.leak;
                }
            }
            // First affine layer.
            let dx = input_grad.row_mut(b);
            for hidx in 0..self.hidden_dim {
                let g = dhidden[hidx];
                if g == 0.0 {
                    continue;
                }
                grads.b1[hidx] += g;
                let wrow = grads.w1.row_mut(hidx);
                for ((wi, xi), _) in wrow.iter_mut().zip(x.iter()).zip(0..) {
                    *wi += g * xi;
                }
                let w = self.w1.row(hidx);
                for (dxi, wi) in dx.iter_mut().zip(w.iter()) {
                    *dxi += g * wi;
                }
            }
        }
        Ok((grads, input_grad))
    }

    pub fn n_params(&self) -> usize {
        self.hidden_dim * self.input_dim
            + self.hidden_dim
            + self.output_dim * self.hidden_dim
            + self.output_dim
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        out.extend_from_slice(self.w1.data());
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(self.w2.data());
        out.extend_from_slice(&self.b2);
        out
    }

    pub fn unflatten(&self, flat: &[f64]) -> Result<MlpParams> {
        if flat.len() != self.n_params() {
            return Err(KgaError::Shape(format!(
                "expected {} flat parameters, got {}",
                self.n_params(),
                flat.len()
            )));
        }
        let mut p = self.clone();
        let (n1, n2) = (
            self.hidden_dim * self.input_dim,
            self.output_dim * self.hidden_dim,
        );
        p.w1 = DenseMatrix::from_vec(self.hidden_dim, self.input_dim, flat[..n1].to_vec())?;
        p.b1 = flat[n1..n1 + self.hidden_dim].to_vec();
        let o2 = n1 + self.hidden_dim;
        p.w2 = DenseMatrix::from_vec(self.output_dim, self.hidden_dim, flat[o2..o2 + n2].to_vec())?;
        p.b2 = flat[o2 + n2..].to_vec();
        Ok(p)
    }
}
