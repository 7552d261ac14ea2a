//! Ground-truth structural causal models for experiments and property
//! checks: the linear-Gaussian family, random binary-confounder models, and
//! the explicit hidden-confounder reparameterization of the flow SCM.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::copula::{std_normal_draw, CopulaCorrelation};
use crate::data::ObservationalDataset;
use crate::derive_seed;
use crate::flow::{RhoGnfModel, VariableKind};
use crate::{Error, Result};

/// Master seed behind the reproducible random binary-confounder suite.
pub const BINARY_SUITE_MASTER_SEED: u64 = 0x5c_3000;

/// Linear-Gaussian model: `A := eps_A`, `Y := alpha A + eps_Y` with noise
/// covariance `[[1, beta], [beta, delta]]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinearScmSpec {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

/// Analytic observables of a linear-Gaussian model.
#[derive(Debug, Clone, Copy)]
pub struct LinearScmStats {
    /// Total Pearson correlation between A and Y.
    pub rho_p_obs: f64,
    /// Correlation of the noise terms: the confounding strength.
    pub rho_true: f64,
    /// The causal coefficient alpha.
    pub ace_true: f64,
}

impl LinearScmSpec {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        let spec = LinearScmSpec { alpha, beta, delta };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::domain("outcome-noise variance delta must be positive"));
        }
        if self.beta * self.beta > self.delta {
            return Err(Error::domain(format!(
                "noise covariance [[1, {b}], [{b}, {d}]] is not positive semi-definite \
                 (requires beta^2 <= delta)",
                b = self.beta,
                d = self.delta
            )));
        }
        Ok(())
    }
}

/// The six benchmark parameterizations, indexed 1 through 6. The first three
/// are observationally equivalent to each other, as are the last three.
pub fn table1_scm(index: usize) -> Result<LinearScmSpec> {
    let (alpha, beta, delta) = match index {
        1 => (0.2, -0.6, 0.72),
        2 => (0.0, -0.4, 0.52),
        3 => (-0.2, -0.2, 0.40),
        4 => (0.2, 0.2, 0.40),
        5 => (0.0, 0.4, 0.52),
        6 => (-0.2, 0.6, 0.72),
        other => {
            return Err(Error::domain(format!(
                "benchmark SCM index must be 1..=6, got {other}"
            )))
        }
    };
    LinearScmSpec::new(alpha, beta, delta)
}

/// Closed-form statistics of the linear model.
///
/// `sigma_Y^2 = alpha^2 + delta + 2 alpha beta`, `sigma_AY = alpha + beta`,
/// and the noise correlation is `beta / sqrt(delta)` since the outcome noise
/// has standard deviation `sqrt(delta)`.
pub fn linear_scm_stats(spec: LinearScmSpec) -> Result<LinearScmStats> {
    spec.validate()?;
    let var_y = spec.alpha * spec.alpha + spec.delta + 2.0 * spec.alpha * spec.beta;
    Ok(LinearScmStats {
        rho_p_obs: (spec.alpha + spec.beta) / var_y.sqrt(),
        rho_true: spec.beta / spec.delta.sqrt(),
        ace_true: spec.alpha,
    })
}

/// The ACE of the optimal flow fitted to linear-Gaussian data at copula
/// correlation `rho`: `(alpha + beta) - rho sqrt((delta - beta^2)/(1 - rho^2))`.
///
/// Used as an independent oracle for curve shapes; it equals `alpha` at the
/// true noise correlation and crosses zero at the analytic rho-value.
pub fn linear_ace_at_rho(spec: LinearScmSpec, rho: f64) -> f64 {
    (spec.alpha + spec.beta) - rho * ((spec.delta - spec.beta * spec.beta) / (1.0 - rho * rho)).sqrt()
}

/// Samples an observational dataset from the linear model.
pub fn sample_linear_scm(spec: LinearScmSpec, n: usize, seed: u64) -> Result<ObservationalDataset> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Cholesky factor of [[1, beta], [beta, delta]]
    let resid = (spec.delta - spec.beta * spec.beta).sqrt();
    let mut a = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let e1 = std_normal_draw(&mut rng);
        let e2 = std_normal_draw(&mut rng);
        let eps_a = e1;
        let eps_y = spec.beta * e1 + resid * e2;
        a.push(eps_a);
        y.push(spec.alpha * eps_a + eps_y);
    }
    ObservationalDataset::new(
        format!("linear_a{}_b{}_d{}", spec.alpha, spec.beta, spec.delta),
        a,
        y,
        VariableKind::Continuous,
        VariableKind::Continuous,
    )
}

/// Binary treatment/outcome model with a binary hidden confounder.
///
/// `p_a_given_u[u]` is `P(A=1 | U=u)`; `p_y_given_a_u[a][u]` is
/// `P(Y=1 | A=a, U=u)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BinaryScmSpec {
    pub p_u: f64,
    pub p_a_given_u: [f64; 2],
    pub p_y_given_a_u: [[f64; 2]; 2],
}

impl BinaryScmSpec {
    pub fn validate(&self) -> Result<()> {
        let mut probs = vec![self.p_u];
        probs.extend_from_slice(&self.p_a_given_u);
        probs.extend(self.p_y_given_a_u.iter().flatten());
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::domain("all entries must be probabilities in [0, 1]"));
        }
        Ok(())
    }

    /// Uniformly random parameterization; every conditional cell is drawn
    /// independently from [0, 1].
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        BinaryScmSpec {
            p_u: rng.gen(),
            p_a_given_u: [rng.gen(), rng.gen()],
            p_y_given_a_u: [[rng.gen(), rng.gen()], [rng.gen(), rng.gen()]],
        }
    }

    /// The true ACE by the adjustment formula over the confounder:
    /// `sum_u [P(Y=1|A=1,u) - P(Y=1|A=0,u)] P(u)`.
    pub fn ace_true(&self) -> f64 {
        let pu = [1.0 - self.p_u, self.p_u];
        (0..2)
            .map(|u| (self.p_y_given_a_u[1][u] - self.p_y_given_a_u[0][u]) * pu[u])
            .sum()
    }
}

/// The reproducible suite of random binary-confounder models used by the
/// experiments; instance `k` is derived from the fixed master seed.
pub fn binary_scm_suite(count: usize) -> Vec<BinaryScmSpec> {
    (0..count)
        .map(|k| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(BINARY_SUITE_MASTER_SEED, k as u64));
            BinaryScmSpec::random(&mut rng)
        })
        .collect()
}

/// Samples `(A, Y)` pairs (the confounder is discarded) together with the
/// exact `ace_true` computed from the spec.
pub fn sample_binary_scm(
    spec: &BinaryScmSpec,
    n: usize,
    seed: u64,
) -> Result<(ObservationalDataset, f64)> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let u = usize::from(rng.gen::<f64>() < spec.p_u);
        let ai = usize::from(rng.gen::<f64>() < spec.p_a_given_u[u]);
        let yi = usize::from(rng.gen::<f64>() < spec.p_y_given_a_u[ai][u]);
        a.push(ai as f64);
        y.push(yi as f64);
    }
    let ds = ObservationalDataset::new(
        "binary_confounder",
        a,
        y,
        VariableKind::Binary,
        VariableKind::Binary,
    )?;
    Ok((ds, spec.ace_true()))
}

/// Parameters of the observationally and interventionally equivalent SCM
/// with an explicit hidden confounder `U`:
///
/// ```text
/// U := eps_U
/// A := T_A^-1( (gamma U + delta eps_A) / sqrt(gamma^2 + delta^2) )
/// Y := T_{Y|A}^-1( lambda rho U + tau sqrt(1 - rho^2) eps_Y )
/// ```
///
/// with `lambda = sqrt(gamma^2 + delta^2) / gamma` and
/// `tau = sqrt( 1/(1-rho^2) - (gamma^2 + delta^2)/gamma^2 * rho^2/(1-rho^2) )`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EquivScmSpec {
    pub rho: CopulaCorrelation,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    pub tau: f64,
}

/// Computes the derived mixing coefficients, enforcing the bound on `delta`
/// that keeps `tau` real.
pub fn equiv_scm_params(rho: CopulaCorrelation, gamma: f64, delta: f64) -> Result<EquivScmSpec> {
    if gamma == 0.0 {
        return Err(Error::domain("gamma must be non-zero"));
    }
    if rho.is_degenerate() {
        return Err(Error::DegenerateCorrelation);
    }
    let r2 = rho.value() * rho.value();
    if r2 > 0.0 {
        let bound = ((1.0 - r2) * gamma * gamma / r2).sqrt();
        if delta.abs() > bound {
            return Err(Error::domain(format!(
                "delta needs to be bound: |delta| <= {bound} for rho = {rho}, gamma = {gamma}"
            )));
        }
    }
    let g2d2 = gamma * gamma + delta * delta;
    let lambda = g2d2.sqrt() / gamma;
    let tau_sq = 1.0 / (1.0 - r2) - (g2d2 / (gamma * gamma)) * (r2 / (1.0 - r2));
    // the delta bound guarantees non-negativity; max guards roundoff at the boundary
    let tau = tau_sq.max(0.0).sqrt();
    Ok(EquivScmSpec {
        rho,
        gamma,
        delta,
        lambda,
        tau,
    })
}

/// One draw from the hidden-confounder SCM, with latents retained.
#[derive(Debug, Clone, Copy)]
pub struct EquivScmSample {
    pub u: f64,
    pub a: f64,
    pub y: f64,
}

/// Samples `(U, A, Y)` through the monotone inverses of the given model.
pub fn sample_equiv_scm(
    spec: &EquivScmSpec,
    model: &RhoGnfModel,
    n: usize,
    seed: u64,
) -> Result<Vec<EquivScmSample>> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = spec.rho.value();
    let norm = (spec.gamma * spec.gamma + spec.delta * spec.delta).sqrt();
    let t_a = model.t_a();
    let a_std = model.a_standardizer();
    let y_std = model.y_standardizer();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u = std_normal_draw(&mut rng);
        let eps_a = std_normal_draw(&mut rng);
        let eps_y = std_normal_draw(&mut rng);
        let z_a = (spec.gamma * u + spec.delta * eps_a) / norm;
        let z_y = spec.lambda * r * u + spec.tau * (1.0 - r * r).sqrt() * eps_y;
        let a = a_std.invert(t_a.inverse(z_a));
        let y = y_std.invert(model.t_y_given(a).inverse(z_y));
        out.push(EquivScmSample { u, a, y });
    }
    Ok(out)
}

/// Signs of the influence of the hidden confounder on treatment and outcome:
/// `(sgn(gamma), sgn(rho) sgn(gamma))`. Undefined at `rho = 0`.
pub fn influence_signs(spec: &EquivScmSpec) -> Result<(f64, f64)> {
    let r = spec.rho.value();
    if r == 0.0 {
        return Err(Error::domain(
            "influence signs are undefined at rho = 0 (no confounding path to the outcome)",
        ));
    }
    Ok((spec.gamma.signum(), r.signum() * spec.gamma.signum()))
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn two_sample_ks(x: &[f64], y: &[f64]) -> f64 {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        // consume every observation tied at the current value on both sides
        // before comparing the empirical CDFs
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho(v: f64) -> CopulaCorrelation {
        CopulaCorrelation::new(v).unwrap()
    }

    #[test]
    fn table1_stats_match_published_rows() {
        // (index, rho_p_obs, rho_true, ace_true) rounded to 2 decimals
        let rows = [
            (1, -0.55, -0.71, 0.2),
            (2, -0.55, -0.55, 0.0),
            (3, -0.55, -0.32, -0.2),
            (4, 0.55, 0.32, 0.2),
            (5, 0.55, 0.55, 0.0),
            (6, 0.55, 0.71, -0.2),
        ];
        for (idx, rp, rt, ace) in rows {
            let stats = linear_scm_stats(table1_scm(idx).unwrap()).unwrap();
            assert!(
                ((stats.rho_p_obs * 100.0).round() / 100.0 - rp).abs() < 1e-12,
                "SCM_{idx} rho_p_obs = {}",
                stats.rho_p_obs
            );
            assert!(
                ((stats.rho_true * 100.0).round() / 100.0 - rt).abs() < 1e-12,
                "SCM_{idx} rho_true = {}",
                stats.rho_true
            );
            assert_eq!(stats.ace_true, ace);
        }
    }

    #[test]
    fn unconfounded_linear_model() {
        let spec = LinearScmSpec::new(0.8, 0.0, 0.5).unwrap();
        let stats = linear_scm_stats(spec).unwrap();
        assert_eq!(stats.rho_true, 0.0);
        let want = 0.8 / (0.64f64 + 0.5).sqrt();
        assert!((stats.rho_p_obs - want).abs() < 1e-15);
    }

    #[test]
    fn psd_guard_rejects_invalid_covariance() {
        assert!(LinearScmSpec::new(0.0, 0.9, 0.5).is_err());
        assert!(LinearScmSpec::new(0.0, 0.5, 0.0).is_err());
        assert!(LinearScmSpec::new(0.0, 0.5, 0.26).is_ok());
    }

    #[test]
    fn linear_samples_match_analytic_moments() {
        let spec = table1_scm(1).unwrap();
        let ds = sample_linear_scm(spec, 50_000, 7).unwrap();
        let n = ds.len() as f64;
        let mean_a = ds.a().iter().sum::<f64>() / n;
        let var_a = ds.a().iter().map(|v| (v - mean_a).powi(2)).sum::<f64>() / n;
        assert!((var_a - 1.0).abs() < 0.02, "Var(A) = {var_a}");
        let corr = crate::copula::spearman(ds.a(), ds.y()).unwrap();
        let pearson = {
            let mean_y = ds.y().iter().sum::<f64>() / n;
            let var_y = ds.y().iter().map(|v| (v - mean_y).powi(2)).sum::<f64>() / n;
            let cov = ds
                .a()
                .iter()
                .zip(ds.y())
                .map(|(a, y)| (a - mean_a) * (y - mean_y))
                .sum::<f64>()
                / n;
            cov / (var_a * var_y).sqrt()
        };
        assert!((pearson - (-0.5547)).abs() < 0.02, "Pearson = {pearson}");
        assert!(corr.is_finite());
    }

    #[test]
    fn near_deterministic_effect() {
        let spec = LinearScmSpec::new(1.0, 0.0, 1e-6).unwrap();
        let ds = sample_linear_scm(spec, 1000, 3).unwrap();
        for (a, y) in ds.a().iter().zip(ds.y()) {
            assert!((a - y).abs() < 0.01);
        }
    }

    #[test]
    fn binary_ace_true_null_when_a_is_ignored() {
        let spec = BinaryScmSpec {
            p_u: 0.3,
            p_a_given_u: [0.2, 0.8],
            p_y_given_a_u: [[0.4, 0.7], [0.4, 0.7]],
        };
        assert_eq!(spec.ace_true(), 0.0);
    }

    #[test]
    fn binary_ace_true_hand_computed() {
        let spec = BinaryScmSpec {
            p_u: 0.5,
            p_a_given_u: [0.2, 0.8],
            p_y_given_a_u: [[0.1, 0.5], [0.4, 0.9]],
        };
        // 0.5 (0.4 - 0.1) + 0.5 (0.9 - 0.5) = 0.35
        assert!((spec.ace_true() - 0.35).abs() < 1e-15);
    }

    #[test]
    fn binary_ace_matches_brute_force_enumeration() {
        // adjustment formula versus direct enumeration over (u, a)
        let specs = binary_scm_suite(100);
        for spec in specs {
            let pu = [1.0 - spec.p_u, spec.p_u];
            let mut e1 = 0.0;
            let mut e0 = 0.0;
            for u in 0..2 {
                e1 += spec.p_y_given_a_u[1][u] * pu[u];
                e0 += spec.p_y_given_a_u[0][u] * pu[u];
            }
            assert!((spec.ace_true() - (e1 - e0)).abs() < 1e-15);
        }
    }

    #[test]
    fn binary_sampling_matches_marginals() {
        let spec = BinaryScmSpec {
            p_u: 0.4,
            p_a_given_u: [0.3, 0.7],
            p_y_given_a_u: [[0.2, 0.5], [0.6, 0.9]],
        };
        let (ds, ace) = sample_binary_scm(&spec, 50_000, 5).unwrap();
        let p_a1 = ds.a().iter().sum::<f64>() / ds.len() as f64;
        let want = 0.6 * 0.3 + 0.4 * 0.7;
        assert!((p_a1 - want).abs() < 0.01, "P(A=1) = {p_a1}, want {want}");
        assert_eq!(ace, spec.ace_true());
        assert_eq!(ds.a_kind(), VariableKind::Binary);
    }

    #[test]
    fn binary_suite_is_reproducible() {
        let a = binary_scm_suite(20);
        let b = binary_scm_suite(20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.p_u, y.p_u);
            assert_eq!(x.p_y_given_a_u, y.p_y_given_a_u);
        }
    }

    #[test]
    fn equiv_params_standard_decomposition() {
        // gamma = 1, delta = 0 recovers z_y = rho u + sqrt(1-rho^2) eps
        for &r in &[-0.7, 0.2, 0.9] {
            let spec = equiv_scm_params(rho(r), 1.0, 0.0).unwrap();
            assert!((spec.lambda - 1.0).abs() < 1e-15);
            assert!((spec.tau - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equiv_params_tau_is_one_at_rho_zero() {
        let spec = equiv_scm_params(rho(0.0), 3.0, 17.0).unwrap();
        assert!((spec.tau - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equiv_params_worked_example() {
        // gamma = 2, delta = 1, rho = 0.5:
        // lambda = sqrt(5)/2, tau = sqrt(4/3 - (5/4)(1/3)) = sqrt(11/12)
        let spec = equiv_scm_params(rho(0.5), 2.0, 1.0).unwrap();
        assert!((spec.lambda - 5f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((spec.tau - (11f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equiv_params_enforce_delta_bound_and_gamma() {
        assert!(equiv_scm_params(rho(0.5), 0.0, 0.1).is_err());
        // bound at rho=0.5, gamma=1: sqrt(0.75/0.25) = sqrt(3)
        assert!(equiv_scm_params(rho(0.5), 1.0, 1.7).is_ok());
        assert!(equiv_scm_params(rho(0.5), 1.0, 1.8).is_err());
        assert!(equiv_scm_params(rho(1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn equiv_scm_reconstructed_latents_have_copula_moments() {
        let model = RhoGnfModel::identity(
            rho(0.6),
            VariableKind::Continuous,
            VariableKind::Continuous,
        );
        let spec = equiv_scm_params(rho(0.6), 1.3, 0.4).unwrap();
        let samples = sample_equiv_scm(&spec, &model, 100_000, 21).unwrap();
        // identity model: the data ARE the latents
        let n = samples.len() as f64;
        let ma = samples.iter().map(|s| s.a).sum::<f64>() / n;
        let my = samples.iter().map(|s| s.y).sum::<f64>() / n;
        let va = samples.iter().map(|s| (s.a - ma).powi(2)).sum::<f64>() / n;
        let vy = samples.iter().map(|s| (s.y - my).powi(2)).sum::<f64>() / n;
        let cov = samples
            .iter()
            .map(|s| (s.a - ma) * (s.y - my))
            .sum::<f64>()
            / n;
        assert!(ma.abs() < 0.02 && my.abs() < 0.02, "means {ma}, {my}");
        assert!((va - 1.0).abs() < 0.03 && (vy - 1.0).abs() < 0.03);
        assert!((cov / (va * vy).sqrt() - 0.6).abs() < 0.02);
    }

    #[test]
    fn equiv_scm_degenerate_mixing_gives_z_a_equal_u() {
        let model = RhoGnfModel::identity(
            rho(0.3),
            VariableKind::Continuous,
            VariableKind::Continuous,
        );
        let spec = equiv_scm_params(rho(0.3), 1.0, 0.0).unwrap();
        let samples = sample_equiv_scm(&spec, &model, 500, 3).unwrap();
        for s in samples {
            assert!((s.a - s.u).abs() < 1e-12);
        }
    }

    #[test]
    fn equiv_scm_is_observationally_equivalent_to_direct_sampling() {
        let model = RhoGnfModel::identity(
            rho(-0.5),
            VariableKind::Continuous,
            VariableKind::Continuous,
        );
        let spec = equiv_scm_params(rho(-0.5), -0.8, 0.5).unwrap();
        let samples = sample_equiv_scm(&spec, &model, 100_000, 9).unwrap();
        let direct = crate::copula::sample_bivariate(rho(-0.5), 100_000, 10);
        let a1: Vec<f64> = samples.iter().map(|s| s.a).collect();
        let y1: Vec<f64> = samples.iter().map(|s| s.y).collect();
        let a2: Vec<f64> = direct.iter().map(|p| p.z_a).collect();
        let y2: Vec<f64> = direct.iter().map(|p| p.z_y).collect();
        assert!(two_sample_ks(&a1, &a2) < 0.02);
        assert!(two_sample_ks(&y1, &y2) < 0.02);
    }

    #[test]
    fn influence_sign_algebra() {
        let cases = [
            (0.5, 1.0, (1.0, 1.0)),
            (0.5, -1.0, (-1.0, -1.0)),
            (-0.5, 1.0, (1.0, -1.0)),
            (-0.5, -1.0, (-1.0, 1.0)),
        ];
        for (r, g, want) in cases {
            let spec = equiv_scm_params(rho(r), g, 0.1).unwrap();
            let got = influence_signs(&spec).unwrap();
            assert_eq!(got, want, "rho {r}, gamma {g}");
            // same sign iff rho > 0
            assert_eq!(got.0 * got.1 > 0.0, r > 0.0);
            assert_eq!(got.0 * got.1, r.signum());
        }
        let spec = equiv_scm_params(rho(0.0), 1.0, 0.1).unwrap();
        assert!(influence_signs(&spec).is_err());
    }

    #[test]
    fn ks_statistic_sanity() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let y: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0 + 0.5).collect();
        assert!(two_sample_ks(&x, &x.clone()) < 1e-12);
        assert!(two_sample_ks(&x, &y) > 0.4);
    }
}
