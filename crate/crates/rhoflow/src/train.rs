//! Maximum-likelihood training of flow models for a fixed copula
//! correlation: minibatch Adam, early stopping on a validation split, and
//! reproducible grid training.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::CopulaCorrelation;
use crate::data::ObservationalDataset;
use crate::derive_seed;
use crate::flow::{dequantize_column, Affine, RhoGnfModel};
use crate::{Error, Result};

const STREAM_DEQUANT: u64 = 1;
const STREAM_SPLIT: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_EPOCH_BASE: u64 = 1_000;
const STREAM_GRID_BASE: u64 = 1 << 32;

/// The largest admissible `|rho|` for training; the density degenerates at
/// the endpoints, so curve grids stop at `+/-0.99`.
pub const MAX_TRAIN_RHO: f64 = 0.99;

/// Divergence guard: abort when a minibatch mean NLL exceeds this.
const NLL_GUARD: f64 = 1e6;

fn default_hidden() -> Vec<usize> {
    vec![32, 32]
}

fn default_dequant_sigma() -> f64 {
    0.25
}

fn default_weight_decay() -> f64 {
    1e-3
}

/// Training hyperparameters. All randomness derives from `seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Early-stop after this many epochs without validation improvement.
    pub patience: usize,
    pub validation_fraction: f64,
    pub seed: u64,
    /// Hidden layer sizes of the conditioner network.
    #[serde(default = "default_hidden")]
    pub hidden_sizes: Vec<usize>,
    /// Noise scale for dequantizing discrete variables.
    #[serde(default = "default_dequant_sigma")]
    pub dequant_sigma: f64,
    /// Decoupled decay of the parameters toward their initialization. Keeps
    /// directions the data barely identifies (spline tails under extreme
    /// correlations) from drifting, without biasing well-identified ones.
    #[serde(default = "default_weight_decay")]
    pub weight_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 512,
            max_epochs: 200,
            patience: 20,
            validation_fraction: 0.1,
            seed: 0,
            hidden_sizes: default_hidden(),
            dequant_sigma: default_dequant_sigma(),
            weight_decay: default_weight_decay(),
        }
    }
}

impl TrainConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::domain("learning rate must be positive"));
        }
        if self.batch_size == 0 || self.batch_size > n {
            return Err(Error::domain(format!(
                "batch size must be in [1, {n}], got {}",
                self.batch_size
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::domain("max_epochs must be at least 1"));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::domain(
                "validation fraction must lie strictly between 0 and 1",
            ));
        }
        if !(self.dequant_sigma >= 0.0) {
            return Err(Error::domain("dequantization sigma must be non-negative"));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::domain("weight decay must be non-negative"));
        }
        Ok(())
    }
}

/// Per-epoch negative log-likelihoods (mean per observation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_nll: f64,
    pub val_nll: f64,
}

/// Outcome of one training run. The reported model corresponds to the epoch
/// with the lowest validation NLL.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub final_train_nll: f64,
    pub final_val_nll: f64,
    pub nll_history: Vec<EpochStats>,
}

/// Columns after dequantization, ready for the flow.
pub(crate) fn prepared_columns(
    dataset: &ObservationalDataset,
    sigma: f64,
    dequant_seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = if dataset.a_kind().is_discrete() {
        dequantize_column(
            dataset.a(),
            dataset.a_kind(),
            sigma,
            derive_seed(dequant_seed, 0),
        )?
    } else {
        dataset.a().to_vec()
    };
    let y = if dataset.y_kind().is_discrete() {
        dequantize_column(
            dataset.y(),
            dataset.y_kind(),
            sigma,
            derive_seed(dequant_seed, 1),
        )?
    } else {
        dataset.y().to_vec()
    };
    Ok((a, y))
}

struct Adam {
    lr: f64,
    weight_decay: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
    /// Decay target: the initialization.
    reference: Vec<f64>,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(lr: f64, weight_decay: f64, reference: Vec<f64>) -> Self {
        let dim = reference.len();
        Adam {
            lr,
            weight_decay,
            t: 0,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            reference,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.t as i32);
        let bc2 = 1.0 - Self::BETA2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * grad[i];
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * grad[i] * grad[i];
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            params[i] -= self.lr
                * (mhat / (vhat.sqrt() + Self::EPS)
                    + self.weight_decay * (params[i] - self.reference[i]));
        }
    }
}

/// Fits a flow to the dataset by maximizing the log-likelihood for the given
/// fixed `rho`. Deterministic for a given `(dataset, rho, config)`.
pub fn fit(
    dataset: &ObservationalDataset,
    rho: CopulaCorrelation,
    config: &TrainConfig,
) -> Result<(RhoGnfModel, TrainReport)> {
    if dataset.is_empty() {
        return Err(Error::DegenerateData("empty dataset".into()));
    }
    if rho.value().abs() > MAX_TRAIN_RHO {
        return Err(Error::domain(format!(
            "training requires |rho| <= {MAX_TRAIN_RHO}, got {rho}"
        )));
    }
    config.validate(dataset.len())?;

    let dequant_seed = derive_seed(config.seed, STREAM_DEQUANT);
    let (a_col, y_col) = prepared_columns(dataset, config.dequant_sigma, dequant_seed)?;
    let a_std = Affine::standardizing(&a_col)?;
    let y_std = Affine::standardizing(&y_col)?;

    let n = dataset.len();
    let n_val = ((n as f64 * config.validation_fraction).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, derive_seed(config.seed, STREAM_SPLIT));
    let (val_idx, train_idx) = order.split_at(n_val);
    let val_batch: Vec<(f64, f64)> = val_idx.iter().map(|&i| (a_col[i], y_col[i])).collect();
    let mut train_idx: Vec<usize> = train_idx.to_vec();
    let batch_size = config.batch_size.min(train_idx.len());

    let mut model = RhoGnfModel::new(
        rho,
        dataset.a_kind(),
        dataset.y_kind(),
        a_std,
        y_std,
        config.dequant_sigma,
        dequant_seed,
        &config.hidden_sizes,
        derive_seed(config.seed, STREAM_INIT),
    )?;

    let mut params = model.param_vector();
    let mut adam = Adam::new(config.learning_rate, config.weight_decay, params.clone());
    let mut history = Vec::new();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut best_train = f64::NAN;
    let mut best_params = params.clone();
    let mut stale = 0usize;
    let mut batch = Vec::with_capacity(batch_size);
    let mut epochs_run = 0usize;

    for epoch in 1..=config.max_epochs {
        epochs_run = epoch;
        shuffle(
            &mut train_idx,
            derive_seed(config.seed, STREAM_EPOCH_BASE + epoch as u64),
        );
        let mut ll_sum = 0.0;
        let mut seen = 0usize;
        for chunk in train_idx.chunks(batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| (a_col[i], y_col[i])));
            let (ll, grad) = model.log_likelihood_gradient(&batch)?;
            let mean_nll = -ll / batch.len() as f64;
            if !mean_nll.is_finite() || mean_nll > NLL_GUARD {
                return Err(Error::NonFinite(format!(
                    "training diverged at epoch {epoch} (minibatch NLL {mean_nll})"
                )));
            }
            ll_sum += ll;
            seen += batch.len();
            // gradient of the mean negative log-likelihood
            let scale = -1.0 / batch.len() as f64;
            let nll_grad: Vec<f64> = grad.iter().map(|g| g * scale).collect();
            adam.step(&mut params, &nll_grad);
            model.set_param_vector(&params);
        }
        let train_nll = -ll_sum / seen as f64;
        let val_nll = -model.log_likelihood(&val_batch)? / val_batch.len() as f64;
        history.push(EpochStats {
            epoch,
            train_nll,
            val_nll,
        });
        if val_nll < best_val {
            best_val = val_nll;
            best_train = train_nll;
            best_epoch = epoch;
            best_params.copy_from_slice(&params);
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    model.set_param_vector(&best_params);
    Ok((
        model,
        TrainReport {
            epochs_run,
            best_epoch,
            final_train_nll: best_train,
            final_val_nll: best_val,
            nll_history: history,
        },
    ))
}

/// The seed a grid point uses for its standalone fit; exposed so grid runs
/// can be reproduced point by point.
pub fn grid_point_seed(base: u64, index: usize) -> u64 {
    derive_seed(base, STREAM_GRID_BASE + index as u64)
}

/// Trains one model per grid value. Grid points are independent (each gets a
/// derived seed) and may run in parallel; results come back in grid order.
pub fn fit_grid(
    dataset: &ObservationalDataset,
    grid: &[CopulaCorrelation],
    config: &TrainConfig,
) -> Result<Vec<(CopulaCorrelation, RhoGnfModel)>> {
    validate_grid(grid)?;
    let fits: Vec<Result<(CopulaCorrelation, RhoGnfModel)>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &rho)| {
            let point_config = TrainConfig {
                seed: grid_point_seed(config.seed, i),
                ..config.clone()
            };
            fit(dataset, rho, &point_config)
                .map(|(model, _)| (rho, model))
                .map_err(|e| Error::at_grid_point(rho.value(), e))
        })
        .collect();
    fits.into_iter().collect()
}

pub(crate) fn validate_grid(grid: &[CopulaCorrelation]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("empty rho grid"));
    }
    for w in grid.windows(2) {
        if !(w[1].value() > w[0].value()) {
            return Err(Error::domain("rho grid values must be strictly increasing"));
        }
    }
    if grid.iter().any(|r| r.value().abs() > MAX_TRAIN_RHO) {
        return Err(Error::domain(format!(
            "rho grid values must lie within [-{MAX_TRAIN_RHO}, {MAX_TRAIN_RHO}]"
        )));
    }
    Ok(())
}

/// The 11-point grid used for rho-curves.
pub fn default_curve_grid() -> Vec<CopulaCorrelation> {
    [-0.99, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 0.99]
        .iter()
        .map(|&r| CopulaCorrelation::new(r).unwrap())
        .collect()
}

/// The 41-point grid used for the Bayesian posterior:
/// `-0.99, -0.95, -0.9, ..., 0.9, 0.95, 0.99`.
pub fn default_bayes_grid() -> Vec<CopulaCorrelation> {
    let mut grid = vec![-0.99];
    grid.extend((-19..=19).map(|i| i as f64 / 20.0));
    grid.push(0.99);
    grid.into_iter()
        .map(|r| CopulaCorrelation::new(r).unwrap())
        .collect()
}

fn shuffle(indices: &mut [usize], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..indices.len()).rev() {
        let j = rng.gen_range(0..=i);
        indices.swap(i, j);
    }
}
