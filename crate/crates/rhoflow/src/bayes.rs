//! Bayesian layer: priors over the confounding correlation, their
//! discretization onto a training grid, the discrete posterior over a causal
//! quantity, kernel smoothing, credible intervals and tail probabilities.

use serde::{Deserialize, Serialize};

use crate::copula::{std_normal_cdf, std_normal_pdf};
use crate::special::reg_incomplete_beta;
use crate::{Error, Result};

/// Prior distribution over the copula correlation, supported on `[-1, +1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RhoPrior {
    /// Flat over the whole support.
    Uniform,
    /// A beta distribution scaled and shifted from `[0, 1]` to `[-1, +1]`.
    ScaledShiftedBeta { alpha: f64, beta: f64 },
    /// A normal truncated to `[-1, +1]`.
    TruncatedNormal { mu: f64, sigma: f64 },
}

impl RhoPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RhoPrior::Uniform => Ok(()),
            RhoPrior::ScaledShiftedBeta { alpha, beta } => {
                if !(alpha > 0.0) || !(beta > 0.0) {
                    Err(Error::domain(format!(
                        "beta prior requires positive shape parameters, got ({alpha}, {beta})"
                    )))
                } else {
                    Ok(())
                }
            }
            RhoPrior::TruncatedNormal { sigma, mu } => {
                if !(sigma > 0.0) || !mu.is_finite() {
                    Err(Error::domain(format!(
                        "truncated normal prior requires finite mu and positive sigma, got ({mu}, {sigma})"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl std::fmt::Display for RhoPrior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhoPrior::Uniform => write!(f, "uniform"),
            RhoPrior::ScaledShiftedBeta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            RhoPrior::TruncatedNormal { mu, sigma } => write!(f, "truncnorm:{mu},{sigma}"),
        }
    }
}

impl std::str::FromStr for RhoPrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_pair = |body: &str, what: &str| -> Result<(f64, f64)> {
            let mut it = body.split(',');
            let first = it.next().and_then(|v| v.trim().parse().ok());
            let second = it.next().and_then(|v| v.trim().parse().ok());
            match (first, second, it.next()) {
                (Some(a), Some(b), None) => Ok((a, b)),
                _ => Err(Error::domain(format!(
                    "expected {what}:X,Y with numeric X and Y, got \"{body}\""
                ))),
            }
        };
        let prior = if s == "uniform" {
            RhoPrior::Uniform
        } else if let Some(body) = s.strip_prefix("beta:") {
            let (alpha, beta) = parse_pair(body, "beta")?;
            RhoPrior::ScaledShiftedBeta { alpha, beta }
        } else if let Some(body) = s.strip_prefix("truncnorm:") {
            let (mu, sigma) = parse_pair(body, "truncnorm")?;
            RhoPrior::TruncatedNormal { mu, sigma }
        } else {
            return Err(Error::domain(format!(
                "unknown prior \"{s}\" (expected uniform, beta:A,B or truncnorm:MU,SIGMA)"
            )));
        };
        prior.validate()?;
        Ok(prior)
    }
}

/// CDF of the prior at `rho` in `[-1, +1]`.
pub fn prior_cdf(prior: &RhoPrior, rho: f64) -> Result<f64> {
    prior.validate()?;
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::domain(format!(
            "prior CDF argument must lie in [-1, 1], got {rho}"
        )));
    }
    match *prior {
        RhoPrior::Uniform => Ok((rho + 1.0) / 2.0),
        RhoPrior::ScaledShiftedBeta { alpha, beta } => {
            reg_incomplete_beta(alpha, beta, (rho + 1.0) / 2.0)
        }
        RhoPrior::TruncatedNormal { mu, sigma } => {
            let lo = std_normal_cdf((-1.0 - mu) / sigma);
            let hi = std_normal_cdf((1.0 - mu) / sigma);
            Ok(((std_normal_cdf((rho - mu) / sigma) - lo) / (hi - lo)).clamp(0.0, 1.0))
        }
    }
}

/// Discretizes the prior onto a strictly increasing grid: each point gets the
/// prior mass of the half-open cell between the midpoints to its neighbors,
/// with the first and last points absorbing the tails.
pub fn discretize_prior(prior: &RhoPrior, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 2 {
        return Err(Error::domain("prior discretization needs at least two grid points"));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::domain("grid must be strictly increasing"));
        }
    }
    if grid[0] < -1.0 || grid[grid.len() - 1] > 1.0 {
        return Err(Error::domain("grid must lie within [-1, 1]"));
    }
    let n = grid.len();
    let mut pmf = Vec::with_capacity(n);
    let mid = |i: usize| 0.5 * (grid[i] + grid[i + 1]);
    for i in 0..n {
        let mass = if i == 0 {
            prior_cdf(prior, mid(0))?
        } else if i == n - 1 {
            1.0 - prior_cdf(prior, mid(n - 2))?
        } else {
            prior_cdf(prior, mid(i))? - prior_cdf(prior, mid(i - 1))?
        };
        pmf.push(mass.max(0.0));
    }
    Ok(pmf)
}

/// The causal quantity evaluated at each grid point: `q_values[i]` is the
/// quantity computed from the model trained at `grid[i]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridEvaluation {
    pub grid: Vec<f64>,
    pub q_values: Vec<f64>,
}

impl GridEvaluation {
    pub fn new(grid: Vec<f64>, q_values: Vec<f64>) -> Result<Self> {
        if grid.len() != q_values.len() {
            return Err(Error::domain(
                "grid and evaluated quantities must have equal lengths",
            ));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain("grid must be strictly increasing"));
            }
        }
        Ok(GridEvaluation { grid, q_values })
    }
}

/// Discrete posterior over a causal quantity: sorted distinct support values
/// with their probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscretePosterior {
    pub support: Vec<f64>,
    pub pmf: Vec<f64>,
}

/// Rounds to 12 significant digits; grid evaluations that agree to that
/// precision are treated as the same quantity value.
fn round_sig12(q: f64) -> f64 {
    if q == 0.0 {
        return 0.0; // normalizes -0.0 as well
    }
    format!("{q:.11e}").parse().unwrap()
}

/// Pushes the discretized prior through the evaluated quantity map: support
/// values are the distinct (rounded) quantity values, each carrying the
/// summed prior mass of the grid points that map to it.
pub fn posterior_q(eval: &GridEvaluation, prior_pmf: &[f64]) -> Result<DiscretePosterior> {
    if eval.grid.len() != prior_pmf.len() {
        return Err(Error::domain(
            "prior pmf length does not match the evaluation grid",
        ));
    }
    let mut grouped: Vec<(f64, f64)> = Vec::new();
    for (&q, &mass) in eval.q_values.iter().zip(prior_pmf) {
        let key = round_sig12(q);
        match grouped
            .iter_mut()
            .find(|(existing, _)| *existing == key)
        {
            Some((_, m)) => *m += mass,
            None => grouped.push((key, mass)),
        }
    }
    grouped.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(DiscretePosterior {
        support: grouped.iter().map(|(q, _)| *q).collect(),
        pmf: grouped.iter().map(|(_, m)| *m).collect(),
    })
}

impl DiscretePosterior {
    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(q, p)| q * p)
            .sum()
    }

    /// Gaussian-kernel bandwidth: standard deviation of the support values
    /// divided by 4 (kernel variance is one sixteenth of the support
    /// variance), with a floor for degenerate posteriors.
    pub fn bandwidth(&self) -> f64 {
        let n = self.support.len() as f64;
        let mean = self.support.iter().sum::<f64>() / n;
        let var = self.support.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / n;
        if var > 0.0 {
            var.sqrt() / 4.0
        } else {
            (1e-3 * mean.abs()).max(1e-6)
        }
    }

    /// CDF of the kernel-smoothed mixture.
    pub fn smoothed_cdf(&self, x: f64) -> f64 {
        let b = self.bandwidth();
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(q, p)| p * std_normal_cdf((x - q) / b))
            .sum()
    }
}

/// Kernel-smoothed density of the posterior at the given points: a Gaussian
/// mixture with one component per support value.
pub fn smooth_density(posterior: &DiscretePosterior, points: &[f64]) -> Vec<f64> {
    let b = posterior.bandwidth();
    points
        .iter()
        .map(|&x| {
            posterior
                .support
                .iter()
                .zip(&posterior.pmf)
                .map(|(q, p)| p * std_normal_pdf((x - q) / b) / b)
                .sum()
        })
        .collect()
}

/// Equal-tailed credible interval on the smoothed density, by bisection on
/// the mixture CDF.
pub fn credible_interval(posterior: &DiscretePosterior, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "credible level must lie strictly between 0 and 1, got {level}"
        )));
    }
    let tail = (1.0 - level) / 2.0;
    let lo = invert_smoothed_cdf(posterior, tail);
    let hi = invert_smoothed_cdf(posterior, 1.0 - tail);
    Ok((lo, hi))
}

fn invert_smoothed_cdf(posterior: &DiscretePosterior, p: f64) -> f64 {
    let b = posterior.bandwidth();
    let min = posterior.support.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = posterior
        .support
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut lo = min - 10.0 * b;
    let mut hi = max + 10.0 * b;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if posterior.smoothed_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Posterior probability that the quantity exceeds the threshold, on the
/// discrete pmf (not the smoothed density, which would leak kernel mass
/// across the threshold).
pub fn prob_greater(posterior: &DiscretePosterior, threshold: f64) -> f64 {
    posterior
        .support
        .iter()
        .zip(&posterior.pmf)
        .filter(|(q, _)| **q > threshold)
        .map(|(_, p)| p)
        .sum()
}

/// Number of density samples in exported posterior artifacts.
pub const DENSITY_SAMPLES: usize = 512;

/// One point of the exported density table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DensitySample {
    pub q: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailProbability {
    pub threshold: f64,
    pub value: f64,
}

/// Exportable posterior document: the discrete posterior, a smoothed density
/// table spanning the support plus four bandwidths, the credible interval
/// and the tail probability, along with the prior that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub prior: RhoPrior,
    pub grid: Vec<f64>,
    pub support: Vec<f64>,
    pub pmf: Vec<f64>,
    pub density_samples: Vec<DensitySample>,
    pub credible_interval: CredibleInterval,
    pub prob_greater: TailProbability,
    pub posterior_mean: f64,
}

/// Runs the full Bayesian pipeline on an evaluated grid.
pub fn summarize_posterior(
    eval: &GridEvaluation,
    prior: &RhoPrior,
    level: f64,
    threshold: f64,
) -> Result<PosteriorSummary> {
    let pmf = discretize_prior(prior, &eval.grid)?;
    let posterior = posterior_q(eval, &pmf)?;
    let (lo, hi) = credible_interval(&posterior, level)?;
    let b = posterior.bandwidth();
    let q_min = posterior.support.iter().cloned().fold(f64::INFINITY, f64::min) - 4.0 * b;
    let q_max = posterior
        .support
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        + 4.0 * b;
    let points: Vec<f64> = (0..DENSITY_SAMPLES)
        .map(|i| q_min + (q_max - q_min) * i as f64 / (DENSITY_SAMPLES - 1) as f64)
        .collect();
    let density = smooth_density(&posterior, &points);
    Ok(PosteriorSummary {
        prior: *prior,
        grid: eval.grid.clone(),
        posterior_mean: posterior.mean(),
        prob_greater: TailProbability {
            threshold,
            value: prob_greater(&posterior, threshold),
        },
        credible_interval: CredibleInterval { level, lo, hi },
        density_samples: points
            .into_iter()
            .zip(density)
            .map(|(q, density)| DensitySample { q, density })
            .collect(),
        support: posterior.support,
        pmf: posterior.pmf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cdf_is_linear() {
        assert_eq!(prior_cdf(&RhoPrior::Uniform, 0.0).unwrap(), 0.5);
        assert_eq!(prior_cdf(&RhoPrior::Uniform, -1.0).unwrap(), 0.0);
        assert_eq!(prior_cdf(&RhoPrior::Uniform, 1.0).unwrap(), 1.0);
        assert!(prior_cdf(&RhoPrior::Uniform, 1.5).is_err());
    }

    #[test]
    fn beta_one_one_is_uniform() {
        let beta = RhoPrior::ScaledShiftedBeta {
            alpha: 1.0,
            beta: 1.0,
        };
        for i in 0..=20 {
            let rho = -1.0 + i as f64 / 10.0;
            let want = (rho + 1.0) / 2.0;
            assert!((prior_cdf(&beta, rho).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_beta_has_median_zero() {
        let beta = RhoPrior::ScaledShiftedBeta {
            alpha: 2.0,
            beta: 2.0,
        };
        assert!((prior_cdf(&beta, 0.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn truncated_normal_cdf_endpoints_and_midpoint() {
        let prior = RhoPrior::TruncatedNormal { mu: 0.0, sigma: 0.5 };
        assert!(prior_cdf(&prior, -1.0).unwrap().abs() < 1e-15);
        assert!((prior_cdf(&prior, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((prior_cdf(&prior, 0.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn beta_prior_cdf_matches_density_quadrature() {
        // integrate the scaled-shifted beta density 0.5 f_Beta((rho+1)/2)
        // with Simpson and compare
        let (alpha, beta) = (2.5, 1.5);
        let prior = RhoPrior::ScaledShiftedBeta { alpha, beta };
        let ln_b = crate::special::ln_beta(alpha, beta);
        let density = |rho: f64| {
            let x: f64 = (rho + 1.0) / 2.0;
            0.5 * ((alpha - 1.0) * x.ln() + (beta - 1.0) * (1.0 - x).ln() - ln_b).exp()
        };
        for i in 1..20 {
            let rho = -1.0 + 2.0 * i as f64 / 20.0;
            // composite Simpson from -1 to rho
            let n = 20_000;
            let h = (rho + 1.0) / n as f64;
            let mut acc = density(-1.0 + 1e-12) + density(rho);
            for k in 1..n {
                let x = -1.0 + k as f64 * h;
                acc += density(x) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            let integral = acc * h / 3.0;
            let got = prior_cdf(&prior, rho).unwrap();
            assert!(
                (got - integral).abs() < 1e-8,
                "rho {rho}: cdf {got}, quadrature {integral}"
            );
        }
    }

    #[test]
    fn discretize_uniform_hand_example() {
        let pmf = discretize_prior(&RhoPrior::Uniform, &[-0.5, 0.0, 0.5]).unwrap();
        assert_eq!(pmf.len(), 3);
        assert!((pmf[0] - 0.375).abs() < 1e-14);
        assert!((pmf[1] - 0.25).abs() < 1e-14);
        assert!((pmf[2] - 0.375).abs() < 1e-14);
    }

    #[test]
    fn discretize_conserves_mass_for_all_families() {
        let grids: Vec<Vec<f64>> = vec![
            vec![-0.99, -0.5, 0.0, 0.5, 0.99],
            (0..41).map(|i| -0.99 + 1.98 * i as f64 / 40.0).collect(),
            vec![-1.0, 1.0],
        ];
        let priors = [
            RhoPrior::Uniform,
            RhoPrior::ScaledShiftedBeta { alpha: 8.0, beta: 2.0 },
            RhoPrior::ScaledShiftedBeta { alpha: 0.5, beta: 0.5 },
            RhoPrior::TruncatedNormal { mu: -0.71, sigma: 0.2 },
        ];
        for grid in &grids {
            for prior in &priors {
                let pmf = discretize_prior(prior, grid).unwrap();
                let total: f64 = pmf.iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "{prior}: total {total}");
                assert!(pmf.iter().all(|p| *p >= 0.0));
            }
        }
    }

    #[test]
    fn discretize_symmetric_prior_on_symmetric_grid() {
        let grid: Vec<f64> = vec![-0.8, -0.4, 0.0, 0.4, 0.8];
        let pmf = discretize_prior(
            &RhoPrior::ScaledShiftedBeta { alpha: 2.0, beta: 2.0 },
            &grid,
        )
        .unwrap();
        for i in 0..grid.len() / 2 {
            assert!(
                (pmf[i] - pmf[grid.len() - 1 - i]).abs() < 1e-12,
                "pmf not symmetric: {pmf:?}"
            );
        }
    }

    #[test]
    fn discretize_rejects_bad_grids() {
        assert!(discretize_prior(&RhoPrior::Uniform, &[0.0]).is_err());
        assert!(discretize_prior(&RhoPrior::Uniform, &[0.5, 0.5]).is_err());
        assert!(discretize_prior(&RhoPrior::Uniform, &[-1.2, 0.0]).is_err());
    }

    #[test]
    fn posterior_with_injective_map_reorders_prior() {
        let eval = GridEvaluation::new(vec![-0.5, 0.0, 0.5], vec![3.0, 2.0, 1.0]).unwrap();
        let pmf = vec![0.2, 0.3, 0.5];
        let post = posterior_q(&eval, &pmf).unwrap();
        assert_eq!(post.support, vec![1.0, 2.0, 3.0]);
        assert_eq!(post.pmf, vec![0.5, 0.3, 0.2]);
    }

    #[test]
    fn posterior_groups_equal_quantity_values() {
        // h(-0.5) = h(0.5) = 1, h(0) = 0 under the uniform prior on the
        // 3-point grid from the hand example: P(Q=1) = 0.75, P(Q=0) = 0.25
        let eval = GridEvaluation::new(vec![-0.5, 0.0, 0.5], vec![1.0, 0.0, 1.0]).unwrap();
        let pmf = discretize_prior(&RhoPrior::Uniform, &eval.grid).unwrap();
        let post = posterior_q(&eval, &pmf).unwrap();
        assert_eq!(post.support, vec![0.0, 1.0]);
        assert!((post.pmf[0] - 0.25).abs() < 1e-14);
        assert!((post.pmf[1] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn posterior_constant_map_is_point_mass() {
        let eval = GridEvaluation::new(vec![-0.5, 0.0, 0.5], vec![2.0, 2.0, 2.0]).unwrap();
        let pmf = vec![0.25, 0.5, 0.25];
        let post = posterior_q(&eval, &pmf).unwrap();
        assert_eq!(post.support, vec![2.0]);
        assert!((post.pmf[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn posterior_mean_matches_brute_force_identity() {
        // mass conservation and E[Q] = sum_i h(rho_i) P(rho_i)
        let grid: Vec<f64> = (0..21).map(|i| -0.9 + 1.8 * i as f64 / 20.0).collect();
        let q: Vec<f64> = grid.iter().map(|r| r * r - 0.3 * r).collect();
        let eval = GridEvaluation::new(grid.clone(), q.clone()).unwrap();
        let pmf = discretize_prior(
            &RhoPrior::TruncatedNormal { mu: 0.2, sigma: 0.4 },
            &grid,
        )
        .unwrap();
        let post = posterior_q(&eval, &pmf).unwrap();
        assert!((post.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let brute: f64 = q.iter().zip(&pmf).map(|(qi, pi)| qi * pi).sum();
        assert!((post.mean() - brute).abs() < 1e-12);
    }

    #[test]
    fn uniform_prior_identity_map_posterior_mean_zero() {
        let grid: Vec<f64> = (0..41).map(|i| -1.0 + 2.0 * i as f64 / 40.0).collect();
        let eval = GridEvaluation::new(grid.clone(), grid.clone()).unwrap();
        let pmf = discretize_prior(&RhoPrior::Uniform, &grid).unwrap();
        let post = posterior_q(&eval, &pmf).unwrap();
        assert!(post.mean().abs() < 1e-12);
        let p = prob_greater(&post, 0.0);
        assert!((0.45..=0.55).contains(&p), "P(Q>0) = {p}");
    }

    #[test]
    fn smoothed_density_integrates_to_one() {
        let post = DiscretePosterior {
            support: vec![-1.0, 0.2, 1.5],
            pmf: vec![0.3, 0.45, 0.25],
        };
        let b = post.bandwidth();
        let (lo, hi) = (-1.0 - 8.0 * b, 1.5 + 8.0 * b);
        let n = 4000;
        let h = (hi - lo) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
        let d = smooth_density(&post, &xs);
        let integral = h * (d.iter().sum::<f64>() - 0.5 * (d[0] + d[n]));
        assert!((integral - 1.0).abs() < 1e-3, "integral = {integral}");
    }

    #[test]
    fn smoothing_is_symmetric_for_symmetric_masses() {
        let post = DiscretePosterior {
            support: vec![-1.0, 1.0],
            pmf: vec![0.5, 0.5],
        };
        let d = smooth_density(&post, &[0.0]);
        let each = smooth_density(
            &DiscretePosterior {
                support: vec![-1.0],
                pmf: vec![1.0],
            },
            &[0.0],
        );
        // careful: the single-point posterior has a different (fallback)
        // bandwidth, so compare the two components of the symmetric mixture
        let b = post.bandwidth();
        let component = 0.5 * std_normal_pdf(1.0 / b) / b;
        assert!((d[0] - 2.0 * component).abs() < 1e-12);
        assert!(each[0] >= 0.0);
    }

    #[test]
    fn credible_interval_covers_the_stated_mass() {
        let post = DiscretePosterior {
            support: vec![-0.4, 0.0, 0.1, 0.7],
            pmf: vec![0.2, 0.3, 0.3, 0.2],
        };
        let (lo, hi) = credible_interval(&post, 0.95).unwrap();
        let covered = post.smoothed_cdf(hi) - post.smoothed_cdf(lo);
        assert!((covered - 0.95).abs() < 1e-6, "covered {covered}");
        assert!(lo < hi);
    }

    #[test]
    fn credible_interval_symmetric_posterior() {
        let post = DiscretePosterior {
            support: vec![-1.0, 0.0, 1.0],
            pmf: vec![0.25, 0.5, 0.25],
        };
        let (lo, hi) = credible_interval(&post, 0.9).unwrap();
        assert!((lo + hi).abs() < 1e-6, "interval not symmetric: ({lo}, {hi})");
    }

    #[test]
    fn credible_interval_point_mass_fallback() {
        let post = DiscretePosterior {
            support: vec![0.3],
            pmf: vec![1.0],
        };
        let (lo, hi) = credible_interval(&post, 0.95).unwrap();
        assert!(lo < 0.3 && hi > 0.3);
        // degenerate interval width is set by the fallback bandwidth
        assert!(hi - lo < 0.01);
    }

    #[test]
    fn prob_greater_uses_discrete_masses() {
        let post = DiscretePosterior {
            support: vec![-1.0, 1.0],
            pmf: vec![0.5, 0.5],
        };
        assert_eq!(prob_greater(&post, 0.0), 0.5);
        assert_eq!(prob_greater(&post, -2.0), 1.0);
        assert_eq!(prob_greater(&post, 1.0), 0.0);
    }

    #[test]
    fn prior_parsing_round_trips() {
        for s in ["uniform", "beta:8,2", "truncnorm:-0.71,0.2"] {
            let p: RhoPrior = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("beta:0,1".parse::<RhoPrior>().is_err());
        assert!("truncnorm:0".parse::<RhoPrior>().is_err());
        assert!("gamma:1,1".parse::<RhoPrior>().is_err());
    }

    #[test]
    fn summary_pipeline_produces_consistent_document() {
        let grid: Vec<f64> = (0..21).map(|i| -0.9 + 1.8 * i as f64 / 20.0).collect();
        let q: Vec<f64> = grid.iter().map(|r| -0.4 - 0.6 * r).collect();
        let eval = GridEvaluation::new(grid, q).unwrap();
        let summary =
            summarize_posterior(&eval, &RhoPrior::Uniform, 0.95, 0.0).unwrap();
        assert_eq!(summary.density_samples.len(), DENSITY_SAMPLES);
        assert!((summary.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(summary.credible_interval.lo < summary.credible_interval.hi);
        assert!(summary.prob_greater.value > 0.0 && summary.prob_greater.value < 1.0);
    }
}
