//! The bivariate normalizing flow: monotone transformers for treatment and
//! outcome, the conditioner network, dequantization of discrete variables,
//! and exact log-likelihood with gradients.

mod conditioner;
mod model;
mod spline;

pub use conditioner::Conditioner;
pub use model::{Affine, RhoGnfModel};
pub use spline::{
    identity_raw, MonotoneTransformer, RAW_PARAMS_PER_TRANSFORMER, SPLINE_BINS, SPLINE_BOUND,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::copula::std_normal_draw;
use crate::{Error, Result};

/// Statistical kind of an observed variable.
///
/// Binary variables are categorical with two levels but kept distinct so the
/// assumption-free bounds can check their own eligibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    Continuous,
    Binary,
    Categorical(u32),
}

impl VariableKind {
    pub fn is_discrete(self) -> bool {
        !matches!(self, VariableKind::Continuous)
    }

    /// Number of categories for discrete kinds.
    pub fn cardinality(self) -> Option<u32> {
        match self {
            VariableKind::Continuous => None,
            VariableKind::Binary => Some(2),
            VariableKind::Categorical(c) => Some(c),
        }
    }

    pub fn validate(self) -> Result<()> {
        if let VariableKind::Categorical(c) = self {
            if c < 2 {
                return Err(Error::domain(format!(
                    "categorical cardinality must be at least 2, got {c}"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for VariableKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VariableKind::Continuous => write!(f, "continuous"),
            VariableKind::Binary => write!(f, "binary"),
            VariableKind::Categorical(c) => write!(f, "categorical:{c}"),
        }
    }
}

impl std::str::FromStr for VariableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(VariableKind::Continuous),
            "binary" => Ok(VariableKind::Binary),
            other => {
                if let Some(card) = other.strip_prefix("categorical:") {
                    let c: u32 = card.parse().map_err(|_| {
                        Error::domain(format!("bad categorical cardinality: {card}"))
                    })?;
                    let kind = VariableKind::Categorical(c);
                    kind.validate()?;
                    Ok(kind)
                } else {
                    Err(Error::domain(format!(
                        "unknown variable kind: {other} (expected continuous, binary or categorical:N)"
                    )))
                }
            }
        }
    }
}

/// Adds Gaussian noise `sigma * e` to a discrete category so a continuous
/// flow can model it. With `sigma = 0` the category value is returned as is.
pub fn dequantize<R: Rng>(value: i64, kind: VariableKind, sigma: f64, rng: &mut R) -> Result<f64> {
    let card = kind
        .cardinality()
        .ok_or_else(|| Error::domain("dequantize applies to discrete kinds only"))?;
    if value < 0 || value >= card as i64 {
        return Err(Error::Schema(format!(
            "category {value} out of range for {kind}"
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::domain("dequantization sigma must be non-negative"));
    }
    if sigma == 0.0 {
        return Ok(value as f64);
    }
    Ok(value as f64 + sigma * std_normal_draw(rng))
}

/// Dequantizes an entire column deterministically from a seed. Values must
/// already be integral (the dataset loader enforces this).
pub fn dequantize_column(
    values: &[f64],
    kind: VariableKind,
    sigma: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    values
        .iter()
        .map(|&v| dequantize(v as i64, kind, sigma, &mut rng))
        .collect()
}

/// Inverse of dequantization for reporting: nearest category, clamped to the
/// valid range.
pub fn quantize(value: f64, kind: VariableKind) -> Result<i64> {
    let card = kind
        .cardinality()
        .ok_or_else(|| Error::domain("quantize applies to discrete kinds only"))?;
    Ok((value.round() as i64).clamp(0, card as i64 - 1))
}
