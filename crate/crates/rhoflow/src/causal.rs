//! Causal estimands from trained flows: Monte-Carlo ACE estimation through
//! recovered latent noise, the rho-curve with its derived quantities, and
//! the assumption-free bounds for binary outcomes.

use serde::{Deserialize, Serialize};

use crate::copula::{pearson_from_spearman, spearman, CopulaCorrelation};
use crate::data::ObservationalDataset;
use crate::flow::{quantize, RhoGnfModel, VariableKind};
use crate::train::{fit_grid, prepared_columns, TrainConfig};
use crate::{Error, Result};

/// The pair of intervention levels the ACE contrasts, on the original data
/// scale. Defaults to `do(A := 1)` versus `do(A := 0)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TreatmentLevels {
    pub a1: f64,
    pub a0: f64,
}

impl Default for TreatmentLevels {
    fn default() -> Self {
        TreatmentLevels { a1: 1.0, a0: 0.0 }
    }
}

impl TreatmentLevels {
    pub fn new(a1: f64, a0: f64) -> Result<Self> {
        if !a1.is_finite() || !a0.is_finite() || a1 == a0 {
            return Err(Error::domain(format!(
                "treatment levels must be finite and distinct, got a1 = {a1}, a0 = {a0}"
            )));
        }
        Ok(TreatmentLevels { a1, a0 })
    }
}

/// One evaluated point of the sensitivity curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rho: f64,
    pub ace: f64,
}

/// The ACE as a function of the assumed confounding correlation, with its
/// derived summaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhoCurve {
    /// Evaluated `(rho, ACE_rho)` points, sorted by `rho`.
    pub points: Vec<CurvePoint>,
    /// Analytic confounding strength that explains away the observed
    /// association (from the rank correlation, not from the fit).
    pub rho_value: f64,
    /// Infimum of the evaluated ACE values: the lower empirical bound.
    pub inf_ace: f64,
    /// Supremum of the evaluated ACE values: the upper empirical bound.
    pub sup_ace: f64,
    /// Where the fitted curve itself crosses zero (linear interpolation),
    /// when it does. Training noise makes this a diagnostic companion to
    /// `rho_value` rather than a replacement.
    pub zero_crossing: Option<f64>,
}

/// Distribution-free ACE bounds for a binary outcome.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AfBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Potential outcomes for every recovered noise value, on the continuous
/// (dequantized) scale, plus the quantized categories for discrete outcomes.
#[derive(Debug, Clone)]
pub struct PotentialOutcomes {
    pub continuous: Vec<f64>,
    pub categories: Option<Vec<i64>>,
}

/// Recovers the latent outcome scores `z_y` for every observation by pushing
/// the (dequantized, standardized) data through the outcome transformer
/// conditioned on its observed treatment.
pub fn recover_noise(model: &RhoGnfModel, dataset: &ObservationalDataset) -> Result<Vec<f64>> {
    if dataset.a_kind() != model.a_kind() || dataset.y_kind() != model.y_kind() {
        return Err(Error::Schema(format!(
            "dataset schema ({}, {}) does not match the model ({}, {})",
            dataset.a_kind(),
            dataset.y_kind(),
            model.a_kind(),
            model.y_kind()
        )));
    }
    let (a_col, y_col) = prepared_columns(dataset, model.dequant_sigma(), model.dequant_seed())?;
    Ok(a_col
        .iter()
        .zip(&y_col)
        .map(|(&a, &y)| model.forward(a, y).z_y)
        .collect())
}

/// Computes the potential outcome under `do(A := a)` for each latent score.
pub fn potential_outcomes(
    model: &RhoGnfModel,
    z_y: &[f64],
    a: f64,
) -> Result<PotentialOutcomes> {
    if let Some(card) = model.a_kind().cardinality() {
        if a < 0.0 || a > (card - 1) as f64 {
            return Err(Error::domain(format!(
                "treatment level {a} is not valid for a {} treatment",
                model.a_kind()
            )));
        }
    }
    let t = model.t_y_given(a);
    let y_std = model.y_standardizer();
    let continuous: Vec<f64> = z_y.iter().map(|&z| y_std.invert(t.inverse(z))).collect();
    let categories = if model.y_kind().is_discrete() {
        Some(
            continuous
                .iter()
                .map(|&v| quantize(v, model.y_kind()))
                .collect::<Result<Vec<i64>>>()?,
        )
    } else {
        None
    };
    Ok(PotentialOutcomes {
        continuous,
        categories,
    })
}

/// Monte-Carlo ACE estimate: the mean difference of potential outcomes over
/// the noise values recovered from the dataset. Discrete outcomes are
/// averaged on the continuous scale.
pub fn estimate_ace(
    model: &RhoGnfModel,
    dataset: &ObservationalDataset,
    levels: TreatmentLevels,
) -> Result<f64> {
    let z = recover_noise(model, dataset)?;
    let y1 = potential_outcomes(model, &z, levels.a1)?;
    let y0 = potential_outcomes(model, &z, levels.a0)?;
    let n = z.len() as f64;
    let mean1 = y1.continuous.iter().sum::<f64>() / n;
    let mean0 = y0.continuous.iter().sum::<f64>() / n;
    Ok(mean1 - mean0)
}

/// The analytic confounding strength that nullifies the causal effect:
/// the sine conversion of the observed Spearman correlation, computed on the
/// raw (pre-dequantization) data.
pub fn rho_value(dataset: &ObservationalDataset) -> Result<f64> {
    Ok(pearson_from_spearman(spearman(dataset.a(), dataset.y())?)?.value())
}

/// Trains one model per grid point, estimates the ACE at each, and derives
/// the curve summaries.
pub fn rho_curve(
    dataset: &ObservationalDataset,
    grid: &[CopulaCorrelation],
    config: &TrainConfig,
    levels: TreatmentLevels,
) -> Result<RhoCurve> {
    let fits = fit_grid(dataset, grid, config)?;
    let mut points = Vec::with_capacity(fits.len());
    for (rho, model) in &fits {
        let ace = estimate_ace(model, dataset, levels)
            .map_err(|e| Error::at_grid_point(rho.value(), e))?;
        points.push(CurvePoint {
            rho: rho.value(),
            ace,
        });
    }
    build_curve(points, rho_value(dataset)?)
}

/// Assembles a curve from already-evaluated points (used by the trainer-free
/// paths and tests).
pub fn build_curve(points: Vec<CurvePoint>, rho_value: f64) -> Result<RhoCurve> {
    if points.is_empty() {
        return Err(Error::domain("a curve needs at least one point"));
    }
    for w in points.windows(2) {
        if !(w[1].rho > w[0].rho) {
            return Err(Error::domain("curve points must be sorted by rho"));
        }
    }
    let inf_ace = points.iter().map(|p| p.ace).fold(f64::INFINITY, f64::min);
    let sup_ace = points
        .iter()
        .map(|p| p.ace)
        .fold(f64::NEG_INFINITY, f64::max);
    let zero_crossing = points.windows(2).find_map(|w| {
        let (p, q) = (w[0], w[1]);
        if p.ace == 0.0 {
            Some(p.rho)
        } else if p.ace * q.ace < 0.0 {
            Some(p.rho + (q.rho - p.rho) * p.ace / (p.ace - q.ace))
        } else {
            None
        }
    });
    Ok(RhoCurve {
        points,
        rho_value,
        inf_ace,
        sup_ace,
        zero_crossing,
    })
}

impl RhoCurve {
    /// Piecewise-linear interpolation of the curve at `rho`.
    pub fn interpolate(&self, rho: f64) -> Result<f64> {
        let first = self.points.first().unwrap();
        let last = self.points.last().unwrap();
        if rho < first.rho || rho > last.rho {
            return Err(Error::domain(format!(
                "rho = {rho} lies outside the evaluated grid [{}, {}]",
                first.rho, last.rho
            )));
        }
        // exact grid points return exact values
        if let Some(p) = self.points.iter().find(|p| p.rho == rho) {
            return Ok(p.ace);
        }
        for w in self.points.windows(2) {
            let (p, q) = (w[0], w[1]);
            if rho < q.rho {
                let t = (rho - p.rho) / (q.rho - p.rho);
                return Ok(p.ace + t * (q.ace - p.ace));
            }
        }
        Ok(last.ace)
    }
}

/// ACE bounds implied by restricting the confounding correlation to
/// `[rho_min, rho_max]`: the extrema of the piecewise-linear curve over that
/// interval.
pub fn ace_interval(curve: &RhoCurve, rho_min: f64, rho_max: f64) -> Result<(f64, f64)> {
    if !(rho_min <= rho_max) {
        return Err(Error::domain("rho_min must not exceed rho_max"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in [curve.interpolate(rho_min)?, curve.interpolate(rho_max)?] {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for p in &curve.points {
        if p.rho > rho_min && p.rho < rho_max {
            lo = lo.min(p.ace);
            hi = hi.max(p.ace);
        }
    }
    Ok((lo, hi))
}

/// Plug-in assumption-free bounds for binary treatment and outcome:
/// `q1 p1 - q0 p0 - p1 <= ACE <= q1 p1 - q0 p0 + p0`.
pub fn af_bounds(dataset: &ObservationalDataset) -> Result<AfBounds> {
    if dataset.a_kind() != VariableKind::Binary || dataset.y_kind() != VariableKind::Binary {
        return Err(Error::Schema(format!(
            "assumption-free bounds require binary treatment and outcome, got ({}, {})",
            dataset.a_kind(),
            dataset.y_kind()
        )));
    }
    af_bounds_from_columns(dataset.a(), dataset.y())
}

fn af_bounds_from_columns(a: &[f64], y: &[f64]) -> Result<AfBounds> {
    let n = a.len() as f64;
    let n1 = a.iter().filter(|&&v| v == 1.0).count();
    let n0 = a.len() - n1;
    if n1 == 0 || n0 == 0 {
        return Err(Error::DegenerateData(
            "both treatment arms must be non-empty".into(),
        ));
    }
    let p1 = n1 as f64 / n;
    let p0 = 1.0 - p1;
    let q1 = a
        .iter()
        .zip(y)
        .filter(|(&av, _)| av == 1.0)
        .map(|(_, &yv)| yv)
        .sum::<f64>()
        / n1 as f64;
    let q0 = a
        .iter()
        .zip(y)
        .filter(|(&av, _)| av == 0.0)
        .map(|(_, &yv)| yv)
        .sum::<f64>()
        / n0 as f64;
    let core = q1 * p1 - q0 * p0;
    Ok(AfBounds {
        lower: core - p1,
        upper: core + p0,
    })
}

/// Assumption-free bounds for an outcome that is a sum of binary indicators:
/// componentwise bounds, summed. With `k` indicators the width is exactly `k`.
pub fn af_bounds_sum(a: &[f64], indicators: &[&[f64]]) -> Result<AfBounds> {
    if indicators.is_empty() {
        return Err(Error::DegenerateData("no indicator columns given".into()));
    }
    let mut lower = 0.0;
    let mut upper = 0.0;
    for col in indicators {
        if col.len() != a.len() {
            return Err(Error::Schema(
                "indicator column length does not match the treatment column".into(),
            ));
        }
        let b = af_bounds_from_columns(a, col)?;
        lower += b.lower;
        upper += b.upper;
    }
    Ok(AfBounds { lower, upper })
}
