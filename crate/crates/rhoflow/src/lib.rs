//! Sensitivity analysis of average causal effects to unobserved confounding
//! with bivariate copula-based normalizing flows.
//!
//! The central object is a two-variable normalizing flow whose latent base
//! distribution is a bivariate standard normal with a *fixed* correlation
//! `rho`. The correlation is the sensitivity parameter: it encodes how much
//! of the observed treatment-outcome association is attributed to unobserved
//! confounding. Training the flow by maximum likelihood for a grid of `rho`
//! values yields the average causal effect (ACE) as a function of `rho` (the
//! rho-curve), the confounding strength that nullifies the effect (the
//! rho-value), empirical ACE bounds, and -- given a prior over `rho` -- a
//! posterior distribution over the ACE with credible intervals.
//!
//! Module map:
//! - [`copula`]: scalar normal CDF/quantile, bivariate normal density and
//!   sampling, Spearman correlation and its Pearson conversion.
//! - [`flow`]: monotone rational-quadratic spline transformers, the
//!   conditioner network, the flow model, dequantization of discrete data.
//! - [`train`]: maximum-likelihood fitting for fixed `rho`, grid training.
//! - [`causal`]: ACE estimation, rho-curve, rho-value, assumption-free bounds.
//! - [`bayes`]: priors over `rho`, discrete posterior over causal quantities,
//!   kernel smoothing, credible intervals.
//! - [`simgen`]: ground-truth structural causal models for experiments and
//!   property checks.
//! - [`data`]: dataset container and CSV I/O.
//! - [`artifacts`]: exportable result documents and plot-data emission.

pub mod artifacts;
pub mod bayes;
pub mod causal;
pub mod copula;
pub mod data;
pub mod error;
pub mod flow;
pub mod simgen;
pub mod special;
pub mod train;

pub use causal::{AfBounds, RhoCurve};
pub use copula::{CopulaCorrelation, GaussianPair};
pub use data::ObservationalDataset;
pub use error::{Error, Result};
pub use flow::{MonotoneTransformer, RhoGnfModel, VariableKind};
pub use train::{TrainConfig, TrainReport};


/// Derives an independent stream seed from a base seed.
///
/// Two rounds of the SplitMix64 finalizer over `base + stream`; used so that
/// grid training, dequantization and data splits each get their own
/// reproducible randomness from the single user-facing seed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    for _ in 0..2 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}
