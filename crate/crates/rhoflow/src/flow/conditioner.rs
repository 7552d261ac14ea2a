//! The conditioner network: a small fully connected net mapping a treatment
//! value to the raw spline parameters of the outcome transformer.
//!
//! The final layer starts at zero weights with the identity-spline bias, so a
//! freshly initialized flow is the identity map regardless of the hidden
//! activations; training then bends the outcome transformer away from
//! identity as a function of the treatment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spline::{identity_raw, RAW_PARAMS_PER_TRANSFORMER};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `[out_dim x in_dim]`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    fn zeros(in_dim: usize, out_dim: usize) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    fn xavier(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        DenseLayer {
            in_dim,
            out_dim,
            weights: (0..in_dim * out_dim)
                .map(|_| rng.gen_range(-limit..limit))
                .collect(),
            biases: vec![0.0; out_dim],
        }
    }
}

/// Fully connected conditioner with tanh hidden activations and a linear
/// output layer emitting one raw spline parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conditioner {
    layers: Vec<DenseLayer>,
}

/// Reusable forward-pass activations for backpropagation.
#[derive(Debug, Clone, Default)]
pub(crate) struct ConditionerCache {
    /// `activations[0]` is the input; `activations[i]` the post-activation
    /// output of layer `i - 1`.
    pub activations: Vec<Vec<f64>>,
}

/// Per-layer weight/bias gradients, same shapes as the conditioner.
#[derive(Debug, Clone)]
pub(crate) struct ConditionerGrad {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Conditioner {
    /// Builds a conditioner with the given hidden layer sizes. Hidden layers
    /// get seeded Xavier-uniform weights; the output layer is zeroed with the
    /// identity-spline bias.
    pub fn new(hidden: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dims = vec![1usize];
        dims.extend_from_slice(hidden);
        dims.push(RAW_PARAMS_PER_TRANSFORMER);

        let mut layers = Vec::with_capacity(dims.len() - 1);
        for i in 0..dims.len() - 1 {
            let last = i == dims.len() - 2;
            let layer = if last {
                let mut l = DenseLayer::zeros(dims[i], dims[i + 1]);
                l.biases = identity_raw();
                l
            } else {
                DenseLayer::xavier(dims[i], dims[i + 1], &mut rng)
            };
            layers.push(layer);
        }
        Conditioner { layers }
    }

    pub fn hidden_sizes(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.out_dim)
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Emits the raw spline parameters for conditioning value `a`.
    pub fn forward(&self, a: f64) -> Vec<f64> {
        let mut cache = ConditionerCache::default();
        self.forward_cached(a, &mut cache);
        cache.activations.last().unwrap().clone()
    }

    /// Forward pass that retains activations; the final entry of the cache is
    /// the raw output vector.
    pub(crate) fn forward_cached(&self, a: f64, cache: &mut ConditionerCache) {
        cache.activations.resize(self.layers.len() + 1, Vec::new());
        cache.activations[0].clear();
        cache.activations[0].push(a);
        for (i, layer) in self.layers.iter().enumerate() {
            let last = i == self.layers.len() - 1;
            let (input, output) = {
                let (head, tail) = cache.activations.split_at_mut(i + 1);
                (&head[i], &mut tail[0])
            };
            output.resize(layer.out_dim, 0.0);
            for o in 0..layer.out_dim {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                let mut acc = layer.biases[o];
                for (w, x) in row.iter().zip(input.iter()) {
                    acc += w * x;
                }
                output[o] = if last { acc } else { acc.tanh() };
            }
        }
    }

    /// Backpropagates `g_out` (gradient w.r.t. the raw output vector) through
    /// the network, accumulating weight/bias gradients into `grad`. The two
    /// scratch buffers avoid per-call allocation in the training hot loop.
    pub(crate) fn backward(
        &self,
        cache: &ConditionerCache,
        g_out: &[f64],
        grad: &mut ConditionerGrad,
        scratch: &mut (Vec<f64>, Vec<f64>),
    ) {
        let (delta, delta_prev) = (&mut scratch.0, &mut scratch.1);
        delta.clear();
        delta.extend_from_slice(g_out);
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = &cache.activations[i];
            let (dw, db) = &mut grad.layers[i];
            for o in 0..layer.out_dim {
                let d = delta[o];
                db[o] += d;
                let row = &mut dw[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (g, x) in row.iter_mut().zip(input.iter()) {
                    *g += d * x;
                }
            }
            if i == 0 {
                break;
            }
            // propagate through the tanh activation of the previous layer;
            // activations[i] holds the post-tanh outputs feeding layer i
            delta_prev.clear();
            delta_prev.resize(layer.in_dim, 0.0);
            for (o, &d) in delta.iter().enumerate().take(layer.out_dim) {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (dp, w) in delta_prev.iter_mut().zip(row.iter()) {
                    *dp += d * w;
                }
            }
            for (dp, t) in delta_prev.iter_mut().zip(input.iter()) {
                *dp *= 1.0 - t * t;
            }
            std::mem::swap(delta, delta_prev);
        }
    }

    pub(crate) fn grad_zeros(&self) -> ConditionerGrad {
        ConditionerGrad {
            layers: self
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
                .collect(),
        }
    }

    pub(crate) fn write_params(&self, out: &mut Vec<f64>) {
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
    }

    pub(crate) fn read_params(&mut self, mut src: &[f64]) {
        for l in &mut self.layers {
            let nw = l.weights.len();
            let nb = l.biases.len();
            l.weights.copy_from_slice(&src[..nw]);
            src = &src[nw..];
            l.biases.copy_from_slice(&src[..nb]);
            src = &src[nb..];
        }
        debug_assert!(src.is_empty());
    }
}

impl ConditionerGrad {
    pub fn write_flat(&self, out: &mut Vec<f64>) {
        for (dw, db) in &self.layers {
            out.extend_from_slice(dw);
            out.extend_from_slice(db);
        }
    }
}
