//! The flow model: an unconditional monotone transformer for the treatment,
//! a conditioned transformer for the outcome, and a fixed-correlation
//! bivariate normal base distribution.

use serde::{Deserialize, Serialize};

use super::conditioner::{Conditioner, ConditionerCache};
use super::spline::{
    backward_raw, identity_raw, MonotoneTransformer, SplineGrad, RAW_PARAMS_PER_TRANSFORMER,
};
use super::VariableKind;
use crate::copula::{bivariate_normal_logpdf, CopulaCorrelation, GaussianPair};
use crate::{Error, Result};

/// Affine standardization `x -> (x - shift) / scale`, applied before the
/// spline so the knot range covers the data; its Jacobian is part of the
/// model density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Affine {
    pub shift: f64,
    pub scale: f64,
}

impl Affine {
    pub fn identity() -> Self {
        Affine {
            shift: 0.0,
            scale: 1.0,
        }
    }

    /// Standardizer for the given sample: zero mean, unit variance.
    pub fn standardizing(values: &[f64]) -> Result<Self> {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if !(var > 0.0) {
            return Err(Error::DegenerateData(
                "cannot standardize a constant variable".into(),
            ));
        }
        Ok(Affine {
            shift: mean,
            scale: var.sqrt(),
        })
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    #[inline]
    pub fn invert(&self, z: f64) -> f64 {
        z * self.scale + self.shift
    }

    /// `ln d(apply)/dx`.
    #[inline]
    pub fn log_deriv(&self) -> f64 {
        -self.scale.ln()
    }
}

/// A trained (or initialized) flow for a fixed copula correlation.
///
/// `rho` is the sensitivity parameter: it is set at construction and never
/// touched by training. All trainable state lives in the raw treatment
/// parameters and the conditioner network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhoGnfModel {
    rho: CopulaCorrelation,
    a_kind: VariableKind,
    y_kind: VariableKind,
    a_std: Affine,
    y_std: Affine,
    dequant_sigma: f64,
    dequant_seed: u64,
    a_raw: Vec<f64>,
    conditioner: Conditioner,
}

/// Scratch buffers reused across samples in the gradient hot loop.
struct GradWorkspace {
    cache: ConditionerCache,
    t_y: MonotoneTransformer,
    spline_grad_y: SplineGrad,
    raw_grad_y: Vec<f64>,
    delta: (Vec<f64>, Vec<f64>),
}

impl RhoGnfModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rho: CopulaCorrelation,
        a_kind: VariableKind,
        y_kind: VariableKind,
        a_std: Affine,
        y_std: Affine,
        dequant_sigma: f64,
        dequant_seed: u64,
        hidden: &[usize],
        init_seed: u64,
    ) -> Result<Self> {
        a_kind.validate()?;
        y_kind.validate()?;
        if !(a_std.scale > 0.0) || !(y_std.scale > 0.0) {
            return Err(Error::domain("standardization scales must be positive"));
        }
        if !(dequant_sigma >= 0.0) {
            return Err(Error::domain("dequantization sigma must be non-negative"));
        }
        Ok(RhoGnfModel {
            rho,
            a_kind,
            y_kind,
            a_std,
            y_std,
            dequant_sigma,
            dequant_seed,
            a_raw: identity_raw(),
            conditioner: Conditioner::new(hidden, init_seed),
        })
    }

    /// An identity flow: both transformers are the identity map, no
    /// standardization, no dequantization noise. Useful as a reference point
    /// in tests and as the zero-knowledge baseline.
    pub fn identity(rho: CopulaCorrelation, a_kind: VariableKind, y_kind: VariableKind) -> Self {
        RhoGnfModel {
            rho,
            a_kind,
            y_kind,
            a_std: Affine::identity(),
            y_std: Affine::identity(),
            dequant_sigma: 0.0,
            dequant_seed: 0,
            a_raw: identity_raw(),
            conditioner: Conditioner::new(&[32, 32], 0),
        }
    }

    pub fn rho(&self) -> CopulaCorrelation {
        self.rho
    }

    pub fn a_kind(&self) -> VariableKind {
        self.a_kind
    }

    pub fn y_kind(&self) -> VariableKind {
        self.y_kind
    }

    pub fn dequant_sigma(&self) -> f64 {
        self.dequant_sigma
    }

    pub fn dequant_seed(&self) -> u64 {
        self.dequant_seed
    }

    pub fn a_standardizer(&self) -> Affine {
        self.a_std
    }

    pub fn y_standardizer(&self) -> Affine {
        self.y_std
    }

    /// Materializes the treatment transformer (composition with the
    /// standardizer not included).
    pub fn t_a(&self) -> MonotoneTransformer {
        MonotoneTransformer::from_raw(&self.a_raw)
    }

    /// Materializes the outcome transformer conditioned on treatment level
    /// `a` (given on the original data scale).
    pub fn t_y_given(&self, a: f64) -> MonotoneTransformer {
        MonotoneTransformer::from_raw(&self.conditioner.forward(self.a_std.apply(a)))
    }

    /// Maps an observation (dequantized if discrete) to its latent normal
    /// scores.
    pub fn forward(&self, a: f64, y: f64) -> GaussianPair {
        let za = self.t_a().forward(self.a_std.apply(a));
        let zy = self.t_y_given(a).forward(self.y_std.apply(y));
        GaussianPair { z_a: za, z_y: zy }
    }

    /// Maps latent scores back to data space. The outcome transformer is
    /// conditioned on `a_for_outcome`, which enables interventional queries:
    /// the potential outcome under `do(A := a)` is
    /// `inverse(pair, a).1` for a latent score recovered from an observation.
    pub fn inverse(&self, pair: GaussianPair, a_for_outcome: f64) -> (f64, f64) {
        let a = self.a_std.invert(self.t_a().inverse(pair.z_a));
        let y = self
            .y_std
            .invert(self.t_y_given(a_for_outcome).inverse(pair.z_y));
        (a, y)
    }

    /// Exact log-likelihood of a batch by the change of variables. The
    /// Jacobian is triangular, so its log-determinant is the sum of the two
    /// diagonal log-derivatives (spline plus standardizer on each coordinate).
    pub fn log_likelihood(&self, batch: &[(f64, f64)]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::DegenerateData("empty batch".into()));
        }
        let t_a = self.t_a();
        let mut cache = ConditionerCache::default();
        let mut t_y = MonotoneTransformer::identity();
        let mut total = 0.0;
        for &(a, y) in batch {
            let at = self.a_std.apply(a);
            let yt = self.y_std.apply(y);
            let (za, ld_a) = t_a.forward_logdet(at);
            self.conditioner.forward_cached(at, &mut cache);
            t_y.refit_from_raw(cache.activations.last().unwrap());
            let (zy, ld_y) = t_y.forward_logdet(yt);
            let base = bivariate_normal_logpdf(GaussianPair { z_a: za, z_y: zy }, self.rho)?;
            let ll = base + ld_a + ld_y + self.a_std.log_deriv() + self.y_std.log_deriv();
            if !ll.is_finite() {
                return Err(Error::NonFinite(format!(
                    "log-likelihood is not finite at observation ({a}, {y})"
                )));
            }
            total += ll;
        }
        Ok(total)
    }

    /// Log-likelihood of a batch together with its exact gradient with
    /// respect to [`RhoGnfModel::param_vector`]. `rho` is a fixed
    /// hyperparameter and receives no gradient.
    pub fn log_likelihood_gradient(&self, batch: &[(f64, f64)]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::DegenerateData("empty batch".into()));
        }
        let t_a = self.t_a();
        let mut ws = GradWorkspace {
            cache: ConditionerCache::default(),
            t_y: MonotoneTransformer::identity(),
            spline_grad_y: SplineGrad::zero(),
            raw_grad_y: vec![0.0; RAW_PARAMS_PER_TRANSFORMER],
            delta: (Vec::new(), Vec::new()),
        };
        let mut spline_grad_a = SplineGrad::zero();
        let mut cond_grad = self.conditioner.grad_zeros();

        let r = self.rho.value();
        if self.rho.is_degenerate() {
            return Err(Error::DegenerateCorrelation);
        }
        let one_minus_r2 = 1.0 - r * r;
        let mut total = 0.0;

        for &(a, y) in batch {
            let at = self.a_std.apply(a);
            let yt = self.y_std.apply(y);
            let (za, ld_a) = t_a.forward_logdet(at);
            self.conditioner.forward_cached(at, &mut ws.cache);
            ws.t_y.refit_from_raw(ws.cache.activations.last().unwrap());
            let (zy, ld_y) = ws.t_y.forward_logdet(yt);

            let base = bivariate_normal_logpdf(GaussianPair { z_a: za, z_y: zy }, self.rho)?;
            let ll = base + ld_a + ld_y + self.a_std.log_deriv() + self.y_std.log_deriv();
            if !ll.is_finite() {
                return Err(Error::NonFinite(format!(
                    "log-likelihood is not finite at observation ({a}, {y})"
                )));
            }
            total += ll;

            let g_za = -(za - r * zy) / one_minus_r2;
            let g_zy = -(zy - r * za) / one_minus_r2;

            // treatment side: constrained-parameter grads accumulate across
            // the batch; the raw chain is applied once at the end
            t_a.backward(at, g_za, 1.0, &mut spline_grad_a);

            // outcome side: the raw chain depends on the conditioner output,
            // so it runs per sample before backpropagating the network
            ws.spline_grad_y = SplineGrad::zero();
            ws.t_y.backward(yt, g_zy, 1.0, &mut ws.spline_grad_y);
            ws.raw_grad_y.iter_mut().for_each(|g| *g = 0.0);
            backward_raw(
                ws.cache.activations.last().unwrap(),
                &ws.spline_grad_y,
                &mut ws.raw_grad_y,
            );
            let raw_grad = std::mem::take(&mut ws.raw_grad_y);
            self.conditioner
                .backward(&ws.cache, &raw_grad, &mut cond_grad, &mut ws.delta);
            ws.raw_grad_y = raw_grad;
        }

        let mut grad = vec![0.0; RAW_PARAMS_PER_TRANSFORMER];
        backward_raw(&self.a_raw, &spline_grad_a, &mut grad);
        grad.reserve(self.conditioner.param_count());
        cond_grad.write_flat(&mut grad);
        Ok((total, grad))
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> usize {
        RAW_PARAMS_PER_TRANSFORMER + self.conditioner.param_count()
    }

    /// Flattens all trainable parameters: raw treatment-spline parameters
    /// first, then the conditioner layers (weights then biases, in order).
    pub fn param_vector(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        out.extend_from_slice(&self.a_raw);
        self.conditioner.write_params(&mut out);
        out
    }

    /// Writes back a parameter vector in [`RhoGnfModel::param_vector`] order.
    pub fn set_param_vector(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.param_count(), "parameter length mismatch");
        self.a_raw
            .copy_from_slice(&params[..RAW_PARAMS_PER_TRANSFORMER]);
        self.conditioner
            .read_params(&params[RAW_PARAMS_PER_TRANSFORMER..]);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl MonotoneTransformer {
    /// Rebuilds this transformer in place from a raw parameter vector,
    /// reusing the existing buffers.
    pub(crate) fn refit_from_raw(&mut self, raw: &[f64]) {
        *self = MonotoneTransformer::from_raw(raw);
    }
}
