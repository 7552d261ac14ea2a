//! Scalar and bivariate Gaussian/copula mathematics.
//!
//! Normal CDF and quantile, the correlated bivariate normal log-density and
//! sampler, Spearman rank correlation, and the sine conversion from Spearman
//! to the Pearson correlation of a Gaussian copula.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::special::erfc;
use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const LN_2PI: f64 = 1.837_877_066_409_345_4;

/// Correlation parameter of the Gaussian copula, in `[-1, +1]`.
///
/// Density operations additionally require `|rho| < 1`; the toolkit uses
/// `+/-0.99` as its extreme grid values so the degenerate endpoints only
/// appear in explicitly constructed inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CopulaCorrelation(f64);

impl CopulaCorrelation {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || !(-1.0..=1.0).contains(&rho) {
            return Err(Error::domain(format!(
                "correlation must lie in [-1, 1], got {rho}"
            )));
        }
        Ok(CopulaCorrelation(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when `|rho| = 1`, where the bivariate density degenerates.
    pub fn is_degenerate(self) -> bool {
        self.0.abs() == 1.0
    }
}

impl std::fmt::Display for CopulaCorrelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<f64> for CopulaCorrelation {
    type Error = Error;

    fn try_from(rho: f64) -> Result<Self> {
        CopulaCorrelation::new(rho)
    }
}

/// A point in the latent space of the flow: the normal scores of treatment
/// and outcome, jointly interpreted under the copula correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPair {
    pub z_a: f64,
    pub z_y: f64,
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile (inverse CDF) for `u` in the open unit interval.
///
/// Acklam's rational approximation refined by one Newton step against the
/// high-accuracy CDF; round trips through [`std_normal_cdf`] to well below
/// 1e-9 relative error over the whole support.
pub fn std_normal_quantile(u: f64) -> Result<f64> {
    if !u.is_finite() || u <= 0.0 || u >= 1.0 {
        return Err(Error::domain(format!(
            "quantile requires 0 < u < 1, got {u}"
        )));
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    // Work in the lower half; mirror otherwise (1 - u is exact for u >= 0.5).
    if u > 0.5 {
        return Ok(-std_normal_quantile(1.0 - u)?);
    }
    let mut z = acklam(u);
    // One Newton step. In the lower tail both Phi(z) and u are tiny and the
    // erfc-based CDF keeps relative accuracy, so the correction is stable.
    let pdf = std_normal_pdf(z);
    if pdf > 0.0 {
        let delta = (std_normal_cdf(z) - u) / pdf;
        if delta.is_finite() {
            z -= delta;
        }
    }
    Ok(z)
}

/// Acklam's rational approximation to the normal quantile (relative error
/// below 1.15e-9 before refinement).
fn acklam(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const U_LOW: f64 = 0.024_25;

    if u < U_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Log-density of the bivariate standard normal with correlation `rho`.
pub fn bivariate_normal_logpdf(pair: GaussianPair, rho: CopulaCorrelation) -> Result<f64> {
    if rho.is_degenerate() {
        return Err(Error::DegenerateCorrelation);
    }
    let r = rho.value();
    let one_minus_r2 = 1.0 - r * r;
    let quad = pair.z_a * pair.z_a - 2.0 * r * pair.z_a * pair.z_y + pair.z_y * pair.z_y;
    Ok(-LN_2PI - 0.5 * one_minus_r2.ln() - quad / (2.0 * one_minus_r2))
}

/// One standard normal draw by quantile transform of an open-interval
/// uniform; deterministic for a given generator state.
pub fn std_normal_draw<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    std_normal_quantile(u).expect("Open01 sample lies strictly inside (0, 1)")
}

/// Draws `n` pairs from the correlated bivariate standard normal via the
/// conditional construction `z_y = rho z_a + sqrt(1 - rho^2) e`.
pub fn sample_bivariate(rho: CopulaCorrelation, n: usize, seed: u64) -> Vec<GaussianPair> {
    let r = rho.value();
    let resid = (1.0 - r * r).max(0.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z_a = std_normal_draw(&mut rng);
            let e = std_normal_draw(&mut rng);
            GaussianPair {
                z_a,
                z_y: r * z_a + resid * e,
            }
        })
        .collect()
}

/// Average ranks, ties sharing the mean of the tied positions.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateData(
            "correlation is undefined for a constant variable".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], y: &[f64]) -> Result<f64> {
    if a.len() != y.len() {
        return Err(Error::domain(format!(
            "spearman requires equal lengths, got {} and {}",
            a.len(),
            y.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::domain("spearman requires at least two observations"));
    }
    pearson(&average_ranks(a), &average_ranks(y))
}

/// Converts a Spearman correlation to the Pearson correlation of the
/// Gaussian copula: `rho = 2 sin(pi rho_s / 6)`.
pub fn pearson_from_spearman(rho_s: f64) -> Result<CopulaCorrelation> {
    if !rho_s.is_finite() || !(-1.0..=1.0).contains(&rho_s) {
        return Err(Error::domain(format!(
            "Spearman correlation must lie in [-1, 1], got {rho_s}"
        )));
    }
    CopulaCorrelation::new(2.0 * (std::f64::consts::PI * rho_s / 6.0).sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Quadrature oracle for the normal CDF: Simpson integration of the
    /// density from 0 to z, independent of the erfc path.
    fn cdf_oracle(z: f64) -> f64 {
        let n = 40_000;
        let h = z / n as f64;
        let mut acc = std_normal_pdf(0.0) + std_normal_pdf(z);
        for i in 1..n {
            let x = i as f64 * h;
            acc += std_normal_pdf(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 + acc * h / 3.0
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_matches_quadrature_oracle() {
        let mut z = -6.0;
        while z <= 6.0 {
            let want = cdf_oracle(z);
            let got = std_normal_cdf(z);
            assert!(
                (got - want).abs() < 1e-12,
                "Phi({z}) = {got}, oracle {want}"
            );
            z += 0.5;
        }
    }

    #[test]
    fn cdf_at_0975_quantile() {
        // reference evaluation of Phi at the 97.5% point
        assert!((std_normal_cdf(1.959_963_985) - 0.975).abs() < 1e-9);
    }

    #[test]
    fn cdf_deep_tail_is_tiny_but_nonnegative() {
        let v = std_normal_cdf(-40.0);
        assert!(v < 1e-300);
        assert!(v >= 0.0);
    }

    #[test]
    fn cdf_is_monotone() {
        let mut prev = std_normal_cdf(-8.0);
        let mut z = -8.0 + 1e-2;
        while z <= 8.0 {
            let cur = std_normal_cdf(z);
            assert!(cur >= prev, "monotonicity violated at {z}");
            prev = cur;
            z += 1e-2;
        }
    }

    #[test]
    fn quantile_median_and_reference_point() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let z = std_normal_quantile(0.975).unwrap();
        assert!((z - 1.959_963_985).abs() < 1e-8, "got {z}");
    }

    #[test]
    fn quantile_round_trip_central_grid() {
        // |Phi(Phi^-1(u)) - u| < 1e-9 absolute and relative on a wide grid
        for i in 1..1000 {
            let u = i as f64 / 1000.0;
            let z = std_normal_quantile(u).unwrap();
            let back = std_normal_cdf(z);
            assert!((back - u).abs() < 1e-9, "u = {u}: back = {back}");
            assert!(((back - u) / u).abs() < 1e-9, "u = {u}");
        }
    }

    #[test]
    fn quantile_round_trip_tails() {
        for &u in &[1e-9, 1e-10, 1e-12, 1e-300, 1.0 - 1e-9, 1.0 - 1e-12] {
            let z = std_normal_quantile(u).unwrap();
            let back = std_normal_cdf(z);
            assert!(
                ((back - u) / u).abs() < 1e-6,
                "u = {u}: z = {z}, back = {back}"
            );
        }
        assert!(std_normal_quantile(1e-10).unwrap() < 0.0);
    }

    #[test]
    fn quantile_rejects_boundary() {
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
        assert!(std_normal_quantile(-0.3).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn logpdf_independent_origin() {
        let rho = CopulaCorrelation::new(0.0).unwrap();
        let got = bivariate_normal_logpdf(GaussianPair { z_a: 0.0, z_y: 0.0 }, rho).unwrap();
        assert!((got - (-LN_2PI)).abs() < 1e-12);
    }

    #[test]
    fn logpdf_correlated_origin() {
        // -ln(2 pi) - 0.5 ln(0.75), evaluated directly from the closed form
        let rho = CopulaCorrelation::new(0.5).unwrap();
        let got = bivariate_normal_logpdf(GaussianPair { z_a: 0.0, z_y: 0.0 }, rho).unwrap();
        let want = -LN_2PI - 0.5 * 0.75f64.ln();
        assert!((got - want).abs() < 1e-12);
        assert!((got - (-1.694_036_030_183_454_9)).abs() < 1e-9);
    }

    #[test]
    fn logpdf_unit_point_independent() {
        let rho = CopulaCorrelation::new(0.0).unwrap();
        let got = bivariate_normal_logpdf(GaussianPair { z_a: 1.0, z_y: 1.0 }, rho).unwrap();
        assert!((got - (-LN_2PI - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn logpdf_factorizes_at_rho_zero() {
        let rho = CopulaCorrelation::new(0.0).unwrap();
        for &(za, zy) in &[(0.3, -1.2), (2.0, 0.1), (-3.5, -0.7)] {
            let joint = bivariate_normal_logpdf(GaussianPair { z_a: za, z_y: zy }, rho).unwrap();
            let split = std_normal_pdf(za).ln() + std_normal_pdf(zy).ln();
            assert!((joint - split).abs() < 1e-12);
        }
    }

    #[test]
    fn logpdf_symmetries() {
        let rho = CopulaCorrelation::new(0.37).unwrap();
        let p = GaussianPair { z_a: 0.8, z_y: -1.3 };
        let base = bivariate_normal_logpdf(p, rho).unwrap();
        let swapped =
            bivariate_normal_logpdf(GaussianPair { z_a: p.z_y, z_y: p.z_a }, rho).unwrap();
        let negated =
            bivariate_normal_logpdf(GaussianPair { z_a: -p.z_a, z_y: -p.z_y }, rho).unwrap();
        assert_eq!(base, swapped);
        assert_eq!(base, negated);
    }

    #[test]
    fn logpdf_rejects_degenerate_rho() {
        let rho = CopulaCorrelation::new(1.0).unwrap();
        assert!(bivariate_normal_logpdf(GaussianPair { z_a: 0.0, z_y: 0.0 }, rho).is_err());
    }

    fn moments(pairs: &[GaussianPair]) -> (f64, f64, f64, f64, f64) {
        let n = pairs.len() as f64;
        let ma = pairs.iter().map(|p| p.z_a).sum::<f64>() / n;
        let my = pairs.iter().map(|p| p.z_y).sum::<f64>() / n;
        let va = pairs.iter().map(|p| (p.z_a - ma).powi(2)).sum::<f64>() / n;
        let vy = pairs.iter().map(|p| (p.z_y - my).powi(2)).sum::<f64>() / n;
        let cov = pairs
            .iter()
            .map(|p| (p.z_a - ma) * (p.z_y - my))
            .sum::<f64>()
            / n;
        (ma, my, va, vy, cov / (va * vy).sqrt())
    }

    #[test]
    fn sampler_independent_case() {
        let rho = CopulaCorrelation::new(0.0).unwrap();
        let pairs = sample_bivariate(rho, 100_000, 11);
        let (_, _, _, _, corr) = moments(&pairs);
        assert!(corr.abs() < 3.0 / (100_000f64).sqrt() * 1.5, "corr = {corr}");
    }

    #[test]
    fn sampler_is_deterministic_given_seed() {
        let rho = CopulaCorrelation::new(0.3).unwrap();
        assert_eq!(sample_bivariate(rho, 64, 5), sample_bivariate(rho, 64, 5));
        assert_ne!(sample_bivariate(rho, 64, 5), sample_bivariate(rho, 64, 6));
    }

    #[test]
    fn sampler_moment_checks_across_rho_grid() {
        for &r in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
            let rho = CopulaCorrelation::new(r).unwrap();
            let pairs = sample_bivariate(rho, 100_000, 20_260_101);
            let (ma, my, va, vy, corr) = moments(&pairs);
            assert!(ma.abs() < 0.02, "rho {r}: mean a {ma}");
            assert!(my.abs() < 0.02, "rho {r}: mean y {my}");
            assert!((va - 1.0).abs() < 0.03, "rho {r}: var a {va}");
            assert!((vy - 1.0).abs() < 0.03, "rho {r}: var y {vy}");
            assert!((corr - r).abs() < 0.02, "rho {r}: corr {corr}");
        }
    }

    #[test]
    fn sampler_near_degenerate_construction() {
        let rho = CopulaCorrelation::new(0.99).unwrap();
        let pairs = sample_bivariate(rho, 1000, 3);
        let resid = (1.0f64 - 0.99 * 0.99).sqrt();
        // each pair satisfies z_y = 0.99 z_a + resid * e with e standard
        // normal, so the residual scaled back should look standard normal
        let es: Vec<f64> = pairs
            .iter()
            .map(|p| (p.z_y - 0.99 * p.z_a) / resid)
            .collect();
        let mean = es.iter().sum::<f64>() / es.len() as f64;
        let var = es.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / es.len() as f64;
        assert!(mean.abs() < 0.1);
        assert!((var - 1.0).abs() < 0.15);
    }

    #[test]
    fn spearman_monotone_agreement() {
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap(),
            -1.0
        );
    }

    #[test]
    fn spearman_hand_computed_value() {
        // ranks equal values; Pearson of (1,2,3,4) with (2,1,4,3) is 0.6
        let got = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((got - 0.6).abs() < 1e-12);
    }

    #[test]
    fn spearman_handles_ties_with_average_ranks() {
        // ranks of [1, 1, 2]: (1.5, 1.5, 3)
        let r = average_ranks(&[1.0, 1.0, 2.0]);
        assert_eq!(r, vec![1.5, 1.5, 3.0]);
        // binary columns are full of ties and must still work
        let a = [0.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let y = [0.0, 1.0, 1.0, 1.0, 0.0, 1.0];
        assert!(spearman(&a, &y).unwrap() > 0.0);
    }

    #[test]
    fn spearman_rejects_degenerate_input() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn sine_conversion_fixed_points() {
        assert_eq!(pearson_from_spearman(0.0).unwrap().value(), 0.0);
        assert!((pearson_from_spearman(1.0).unwrap().value() - 1.0).abs() < 1e-15);
        assert!((pearson_from_spearman(-1.0).unwrap().value() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_conversion_inverts_at_wanted_pearson() {
        // numerically invert rho = 2 sin(pi rho_s / 6) at rho = -0.55:
        // rho_s = (6/pi) asin(-0.275) = -0.532103...
        let rho_s = 6.0 / std::f64::consts::PI * (-0.275f64).asin();
        let got = pearson_from_spearman(rho_s).unwrap().value();
        assert!((got - (-0.55)).abs() < 1e-12, "round trip gave {got}");
        // a nearby Spearman value still lands within the coarse tolerance
        let got = pearson_from_spearman(rho_s + 1e-3).unwrap().value();
        assert!((got - (-0.55)).abs() < 0.005);
    }

    #[test]
    fn sine_conversion_is_odd_and_bounded() {
        for i in 0..=100 {
            let s = -1.0 + 2.0 * i as f64 / 100.0;
            let f = pearson_from_spearman(s).unwrap().value();
            let g = pearson_from_spearman(-s).unwrap().value();
            assert!((f + g).abs() < 1e-15);
            assert!((-1.0..=1.0).contains(&f));
        }
        assert!(pearson_from_spearman(1.2).is_err());
    }

    #[test]
    fn correlation_newtype_validates() {
        assert!(CopulaCorrelation::new(1.5).is_err());
        assert!(CopulaCorrelation::new(f64::NAN).is_err());
        assert!(CopulaCorrelation::new(-1.0).unwrap().is_degenerate());
        assert!(!CopulaCorrelation::new(-0.99).unwrap().is_degenerate());
    }
}
