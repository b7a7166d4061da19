use rand::Rng as _;

use super::Matrix;
use crate::error::{ensure, Result};
use crate::rng;

/// Multilayer perceptron with ReLU hidden layers and raw-logit output.
///
/// Layer `l` maps `layer_dims[l] -> layer_dims[l + 1]` as `x · W_l + b_l`, with
/// `W_l` stored `in × out`.
#[derive(Clone, Debug)]
pub struct MlpModel {
    layer_dims: Vec<usize>,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    // Bumped whenever parameters are handed out mutably; caches from an older
    // generation are refused by `backward`.
    generation: u64,
}

impl PartialEq for MlpModel {
    fn eq(&self, other: &Self) -> bool {
        self.layer_dims == other.layer_dims
            && self.weights == other.weights
            && self.biases == other.biases
    }
}

/// Activations saved by [`MlpModel::forward`] for the backward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    layer_dims: Vec<usize>,
    generation: u64,
    // activations[l] is the input to layer l
    activations: Vec<Matrix>,
}

impl ForwardCache {
    pub fn batch_size(&self) -> usize {
        self.activations[0].rows()
    }
}

/// Parameter gradients, shaped like the model they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpGrads {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Zero-initialized model. `layer_dims` is `[input, hidden..., classes]`.
    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        ensure!(
            layer_dims.len() >= 2,
            "an MLP needs at least input and output dimensions, got {:?}",
            layer_dims
        );
        ensure!(
            layer_dims.iter().all(|&d| d > 0),
            "layer dimensions must be positive, got {:?}",
            layer_dims
        );
        let weights = layer_dims
            .windows(2)
            .map(|w| Matrix::zeros(w[0], w[1]))
            .collect();
        let biases = layer_dims[1..].iter().map(|&d| vec![0.0; d]).collect();
        Ok(MlpModel {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            generation: 0,
        })
    }

    /// Weights uniform in `±1/√fan_in`, biases zero.
    pub fn init(layer_dims: &[usize], seed: u64) -> Result<Self> {
        let mut model = MlpModel::zeros(layer_dims)?;
        let mut rng = rng::seeded(seed);
        for w in &mut model.weights {
            let bound = 1.0 / (w.rows() as f64).sqrt();
            for v in w.as_mut_slice() {
                *v = rng.random_range(-bound..bound);
            }
        }
        Ok(model)
    }

    /// Builds a model from explicit parameters.
    pub fn from_parts(weights: Vec<Matrix>, biases: Vec<Vec<f64>>) -> Result<Self> {
        ensure!(!weights.is_empty(), "model needs at least one layer");
        ensure!(
            weights.len() == biases.len(),
            "{} weight matrices but {} bias vectors",
            weights.len(),
            biases.len()
        );
        let mut dims = vec![weights[0].rows()];
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            ensure!(
                w.rows() == *dims.last().unwrap(),
                "layer {} expects input {}, previous layer outputs {}",
                l,
                w.rows(),
                dims.last().unwrap()
            );
            ensure!(
                b.len() == w.cols(),
                "layer {} bias length {} does not match output {}",
                l,
                b.len(),
                w.cols()
            );
            ensure!(
                b.iter().all(|v| v.is_finite()),
                "layer {} bias has non-finite entries",
                l
            );
            dims.push(w.cols());
        }
        ensure!(dims.iter().all(|&d| d > 0), "layer dimensions must be positive");
        Ok(MlpModel {
            layer_dims: dims,
            weights,
            biases,
            generation: 0,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn num_classes(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn num_params(&self) -> usize {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| w.as_slice().len() + b.len())
            .sum()
    }

    /// Parameter slices in canonical order: per layer, weights (row-major) then bias.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.weights.len());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.push(w.as_slice());
            out.push(b.as_slice());
        }
        out
    }

    /// Mutable parameter slices in canonical order. Invalidates outstanding caches.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.generation += 1;
        let mut out = Vec::with_capacity(2 * self.weights.len());
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            out.push(w.as_mut_slice());
            out.push(b.as_mut_slice());
        }
        out
    }

    /// Flattened copy of all parameters in canonical order.
    pub fn flat_params(&self) -> Vec<f64> {
        self.param_slices().concat()
    }

    pub fn forward(&self, batch: &Matrix) -> Result<(Matrix, ForwardCache)> {
        ensure!(
            batch.cols() == self.input_dim(),
            "batch has {} features, model expects {}",
            batch.cols(),
            self.input_dim()
        );
        let last = self.weights.len() - 1;
        let mut activations = Vec::with_capacity(self.weights.len());
        let mut x = batch.clone();
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = x.matmul(w)?;
            for r in 0..z.rows() {
                let row = z.row_mut(r);
                for (v, bj) in row.iter_mut().zip(b) {
                    *v += bj;
                }
                if l < last {
                    row.iter_mut().for_each(|v| *v = v.max(0.0));
                }
            }
            activations.push(x);
            x = z;
        }
        let cache = ForwardCache {
            layer_dims: self.layer_dims.clone(),
            generation: self.generation,
            activations,
        };
        Ok((x, cache))
    }

    /// Forward pass without keeping a cache.
    pub fn logits(&self, batch: &Matrix) -> Result<Matrix> {
        self.forward(batch).map(|(l, _)| l)
    }

    pub fn backward(&self, cache: &ForwardCache, grad_logits: &Matrix) -> Result<MlpGrads> {
        ensure!(
            cache.layer_dims == self.layer_dims,
            "cache was produced by a model with layers {:?}, not {:?}",
            cache.layer_dims,
            self.layer_dims
        );
        ensure!(
            cache.generation == self.generation,
            "stale cache: model parameters changed after the forward pass"
        );
        ensure!(
            grad_logits.shape() == (cache.batch_size(), self.num_classes()),
            "grad_logits is {}x{}, expected {}x{}",
            grad_logits.rows(),
            grad_logits.cols(),
            cache.batch_size(),
            self.num_classes()
        );
        let n = self.weights.len();
        let mut gw = vec![Matrix::zeros(0, 0); n];
        let mut gb = vec![Vec::new(); n];
        let mut delta = grad_logits.clone();
        for l in (0..n).rev() {
            let input = &cache.activations[l];
            gw[l] = input.t_matmul(&delta)?;
            let mut bias = vec![0.0; delta.cols()];
            for row in delta.iter_rows() {
                for (s, v) in bias.iter_mut().zip(row) {
                    *s += v;
                }
            }
            gb[l] = bias;
            if l > 0 {
                let mut prev = delta.matmul_t(&self.weights[l])?;
                // ReLU mask: the layer input is positive exactly where the unit was active
                for (d, a) in prev.as_mut_slice().iter_mut().zip(input.as_slice()) {
                    if *a <= 0.0 {
                        *d = 0.0;
                    }
                }
                delta = prev;
            }
        }
        Ok(MlpGrads {
            weights: gw,
            biases: gb,
        })
    }
}

impl MlpGrads {
    pub fn zeros_like(model: &MlpModel) -> Self {
        MlpGrads {
            weights: model
                .weights
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.weights.len());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.push(w.as_slice());
            out.push(b.as_slice());
        }
        out
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.weights.len());
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            out.push(w.as_mut_slice());
            out.push(b.as_mut_slice());
        }
        out
    }

    pub fn flat(&self) -> Vec<f64> {
        self.slices().concat()
    }

    /// `self += k · other`
    pub fn add_scaled(&mut self, other: &MlpGrads, k: f64) -> Result<()> {
        ensure!(
            self.shapes() == other.shapes(),
            "gradient shapes differ"
        );
        for (dst, src) in self.slices_mut().into_iter().zip(other.slices()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += k * s;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, k: f64) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|v| *v *= k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|&v| v == 0.0))
    }

    pub fn shapes(&self) -> Vec<usize> {
        self.slices().iter().map(|s| s.len()).collect()
    }
}
