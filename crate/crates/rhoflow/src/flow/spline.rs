//! Strictly monotone rational-quadratic spline transformers.
//!
//! Each transformer is a C1 bijection of the real line: a rational-quadratic
//! spline on the fixed interval `[-BOUND, BOUND]` with linear tails outside.
//! Every spline is materialized from an unconstrained raw parameter vector
//! (widths and heights through a softmax, derivatives and the tail slope
//! through a softplus), so monotonicity and differentiability hold by
//! construction and gradient-based training can treat the raw vector as a
//! free point in Euclidean space.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of spline bins.
pub const SPLINE_BINS: usize = 8;
/// Half-width of the input knot range; input knots span
/// `[-SPLINE_BOUND, SPLINE_BOUND]`.
pub const SPLINE_BOUND: f64 = 4.0;
/// Length of the raw parameter vector of one transformer: `SPLINE_BINS`
/// widths, `SPLINE_BINS` heights, `SPLINE_BINS - 1` interior derivatives,
/// one tail slope, and the output shift/scale pair.
///
/// The output affine is what lets a conditioned transformer place its output
/// range wherever the base distribution demands (e.g. strongly shifted
/// conditionals near `|rho| = 1`); it folds into the knot values and
/// derivatives, so the materialized transformer is still a plain monotone
/// spline.
pub const RAW_PARAMS_PER_TRANSFORMER: usize = 3 * SPLINE_BINS + 2;

/// Smallest admissible bin width/height as a fraction of the range.
const MIN_FRACTION: f64 = 1e-3;

pub(crate) fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn softplus_inv(y: f64) -> f64 {
    (y.exp() - 1.0).ln()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softmax(xs: &[f64], out: &mut [f64]) {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &x) in out.iter_mut().zip(xs) {
        *o = (x - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Raw parameters that materialize to the identity transformer.
pub fn identity_raw() -> Vec<f64> {
    let k = SPLINE_BINS;
    let mut raw = vec![0.0; RAW_PARAMS_PER_TRANSFORMER];
    let unit = softplus_inv(1.0);
    // interior derivatives and tail slope of 1
    for r in raw.iter_mut().take(3 * k).skip(2 * k) {
        *r = unit;
    }
    // output shift 0 (already), output scale 1
    raw[3 * k + 1] = unit;
    raw
}

/// A strictly increasing, continuously differentiable, analytically
/// invertible map of the real line.
///
/// Inside the knot range the map is a monotone rational-quadratic spline;
/// outside it extrapolates linearly with slope `tail_slope`. The boundary
/// derivatives equal the tail slope, which is what makes the map C1 at the
/// edge knots.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneTransformer {
    knot_x: Vec<f64>,
    knot_y: Vec<f64>,
    derivs: Vec<f64>,
    tail_slope: f64,
}

/// Gradients of some scalar objective with respect to the constrained,
/// affine-folded spline parameters: bin widths, folded bin heights, folded
/// knot derivatives, folded tail slope, and the value of the first output
/// knot (`y_base`), which carries the output shift.
#[derive(Debug, Clone)]
pub(crate) struct SplineGrad {
    pub widths: [f64; SPLINE_BINS],
    pub heights: [f64; SPLINE_BINS],
    pub derivs: [f64; SPLINE_BINS + 1],
    pub tail: f64,
    pub y_base: f64,
}

impl SplineGrad {
    pub fn zero() -> Self {
        SplineGrad {
            widths: [0.0; SPLINE_BINS],
            heights: [0.0; SPLINE_BINS],
            derivs: [0.0; SPLINE_BINS + 1],
            tail: 0.0,
            y_base: 0.0,
        }
    }
}

impl MonotoneTransformer {
    /// Validated constructor for explicitly supplied knots.
    pub fn new(
        knot_x: Vec<f64>,
        knot_y: Vec<f64>,
        derivs: Vec<f64>,
        tail_slope: f64,
    ) -> Result<Self> {
        if knot_x.len() < 2 || knot_x.len() != knot_y.len() || derivs.len() != knot_x.len() {
            return Err(Error::domain(
                "transformer needs matching knot_x/knot_y/derivs with at least two knots",
            ));
        }
        if !(tail_slope > 0.0) {
            return Err(Error::domain("tail slope must be positive"));
        }
        for w in knot_x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain("knot positions must be strictly increasing"));
            }
        }
        for w in knot_y.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain("knot values must be strictly increasing"));
            }
        }
        if derivs.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::domain("knot derivatives must be positive"));
        }
        if derivs[0] != tail_slope || derivs[derivs.len() - 1] != tail_slope {
            return Err(Error::domain(
                "boundary derivatives must equal the tail slope (C1 at the edge knots)",
            ));
        }
        Ok(MonotoneTransformer {
            knot_x,
            knot_y,
            derivs,
            tail_slope,
        })
    }

    /// The identity map on the knot grid.
    pub fn identity() -> Self {
        MonotoneTransformer::from_raw(&identity_raw())
    }

    /// Materializes the transformer from an unconstrained raw vector. The
    /// output affine `z -> shift + scale z` is folded into the knot values,
    /// derivatives and tail slope.
    pub fn from_raw(raw: &[f64]) -> Self {
        assert_eq!(raw.len(), RAW_PARAMS_PER_TRANSFORMER);
        let k = SPLINE_BINS;
        let span = 2.0 * SPLINE_BOUND;

        let mut pw = [0.0; SPLINE_BINS];
        let mut ph = [0.0; SPLINE_BINS];
        softmax(&raw[..k], &mut pw);
        softmax(&raw[k..2 * k], &mut ph);
        let scale = span * (1.0 - k as f64 * MIN_FRACTION);
        let floor = span * MIN_FRACTION;

        let out_shift = raw[3 * k];
        let out_scale = softplus(raw[3 * k + 1]);

        let mut knot_x = Vec::with_capacity(k + 1);
        let mut knot_y = Vec::with_capacity(k + 1);
        knot_x.push(-SPLINE_BOUND);
        knot_y.push(out_shift - out_scale * SPLINE_BOUND);
        let mut cx = -SPLINE_BOUND;
        let mut cy = knot_y[0];
        for i in 0..k {
            cx += floor + scale * pw[i];
            cy += out_scale * (floor + scale * ph[i]);
            knot_x.push(cx);
            knot_y.push(cy);
        }

        let tail_slope = out_scale * softplus(raw[3 * k - 1]);
        let mut derivs = Vec::with_capacity(k + 1);
        derivs.push(tail_slope);
        for i in 0..k - 1 {
            derivs.push(out_scale * softplus(raw[2 * k + i]));
        }
        derivs.push(tail_slope);

        MonotoneTransformer {
            knot_x,
            knot_y,
            derivs,
            tail_slope,
        }
    }

    pub fn tail_slope(&self) -> f64 {
        self.tail_slope
    }

    pub fn knot_positions(&self) -> &[f64] {
        &self.knot_x
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_y
    }

    /// Index of the bin containing `x`, assuming `x` lies in the knot range.
    fn bin_for_x(&self, x: f64) -> usize {
        self.knot_x[1..self.knot_x.len() - 1]
            .partition_point(|k| *k <= x)
            .min(SPLINE_BINS - 1)
    }

    fn bin_for_z(&self, z: f64) -> usize {
        self.knot_y[1..self.knot_y.len() - 1]
            .partition_point(|k| *k <= z)
            .min(SPLINE_BINS - 1)
    }

    pub fn forward(&self, x: f64) -> f64 {
        self.forward_logdet(x).0
    }

    /// Derivative dT/dx at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        self.forward_logdet(x).1.exp()
    }

    /// Returns `(T(x), ln dT/dx)`.
    pub fn forward_logdet(&self, x: f64) -> (f64, f64) {
        let last = self.knot_x.len() - 1;
        if x < self.knot_x[0] {
            let z = self.knot_y[0] + self.tail_slope * (x - self.knot_x[0]);
            return (z, self.tail_slope.ln());
        }
        if x >= self.knot_x[last] {
            let z = self.knot_y[last] + self.tail_slope * (x - self.knot_x[last]);
            return (z, self.tail_slope.ln());
        }
        let k = self.bin_for_x(x);
        let (x0, x1) = (self.knot_x[k], self.knot_x[k + 1]);
        let (y0, y1) = (self.knot_y[k], self.knot_y[k + 1]);
        let (d0, d1) = (self.derivs[k], self.derivs[k + 1]);
        let w = x1 - x0;
        let h = y1 - y0;
        let s = h / w;
        let xi = (x - x0) / w;
        let u = xi * (1.0 - xi);
        let p = s * xi * xi + d0 * u;
        let dd = s + (d0 + d1 - 2.0 * s) * u;
        let z = y0 + h * p / dd;
        let numer = d1 * xi * xi + 2.0 * s * u + d0 * (1.0 - xi) * (1.0 - xi);
        let logdet = 2.0 * s.ln() + numer.ln() - 2.0 * dd.ln();
        (z, logdet)
    }

    /// Analytic inverse: closed-form quadratic solve inside the knot range,
    /// linear solve in the tails.
    pub fn inverse(&self, z: f64) -> f64 {
        let last = self.knot_y.len() - 1;
        if z < self.knot_y[0] {
            return self.knot_x[0] + (z - self.knot_y[0]) / self.tail_slope;
        }
        if z >= self.knot_y[last] {
            return self.knot_x[last] + (z - self.knot_y[last]) / self.tail_slope;
        }
        let k = self.bin_for_z(z);
        let (x0, x1) = (self.knot_x[k], self.knot_x[k + 1]);
        let (y0, y1) = (self.knot_y[k], self.knot_y[k + 1]);
        let (d0, d1) = (self.derivs[k], self.derivs[k + 1]);
        let w = x1 - x0;
        let h = y1 - y0;
        let s = h / w;
        let r = (z - y0) / h;
        let c2 = d0 + d1 - 2.0 * s;
        let qa = (s - d0) + r * c2;
        let qb = d0 - r * c2;
        let qc = -r * s;
        // the monotone root of qa xi^2 + qb xi + qc = 0 in [0, 1]; this form
        // stays valid when qa degenerates to zero
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
        let xi = (2.0 * qc / (-qb - disc.sqrt())).clamp(0.0, 1.0);
        x0 + xi * w
    }

    /// Accumulates gradients of `g_z * T(x) + g_logd * ln T'(x)` with respect
    /// to the constrained spline parameters into `grad`.
    pub(crate) fn backward(&self, x: f64, g_z: f64, g_logd: f64, grad: &mut SplineGrad) {
        let last = self.knot_x.len() - 1;
        if x < self.knot_x[0] {
            // z = knot_y[0] + tail (x - x0); knot_y[0] is the output base
            grad.tail += g_z * (x - self.knot_x[0]) + g_logd / self.tail_slope;
            grad.y_base += g_z;
            return;
        }
        if x >= self.knot_x[last] {
            // z = knot_y[last] + tail (x - x_last); the last output knot is
            // the base plus every bin height
            grad.tail += g_z * (x - self.knot_x[last]) + g_logd / self.tail_slope;
            grad.y_base += g_z;
            for h in grad.heights.iter_mut() {
                *h += g_z;
            }
            return;
        }
        let k = self.bin_for_x(x);
        let (x0, x1) = (self.knot_x[k], self.knot_x[k + 1]);
        let (y0, y1) = (self.knot_y[k], self.knot_y[k + 1]);
        let (d0, d1) = (self.derivs[k], self.derivs[k + 1]);
        let w = x1 - x0;
        let h = y1 - y0;
        let s = h / w;
        let xi = (x - x0) / w;
        let u = xi * (1.0 - xi);
        let du_dxi = 1.0 - 2.0 * xi;
        let c2 = d0 + d1 - 2.0 * s;
        let p = s * xi * xi + d0 * u;
        let dd = s + c2 * u;
        let dd2 = dd * dd;
        let numer = d1 * xi * xi + 2.0 * s * u + d0 * (1.0 - xi) * (1.0 - xi);

        // partials of z = y0 + h p / dd
        let dz_dxi = h * ((2.0 * s * xi + d0 * du_dxi) * dd - p * c2 * du_dxi) / dd2;
        let dz_ds = h * (xi * xi * dd - p * (1.0 - 2.0 * u)) / dd2;
        let dz_dd0 = h * u * (dd - p) / dd2;
        let dz_dd1 = -h * p * u / dd2;
        let dz_dh = p / dd;

        // partials of L = 2 ln s + ln numer - 2 ln dd
        let dl_dxi = (2.0 * d1 * xi + 2.0 * s * du_dxi - 2.0 * d0 * (1.0 - xi)) / numer
            - 2.0 * c2 * du_dxi / dd;
        let dl_ds = 2.0 / s + 2.0 * u / numer - 2.0 * (1.0 - 2.0 * u) / dd;
        let dl_dd0 = (1.0 - xi) * (1.0 - xi) / numer - 2.0 * u / dd;
        let dl_dd1 = xi * xi / numer - 2.0 * u / dd;

        let g_xi = g_z * dz_dxi + g_logd * dl_dxi;
        let g_s = g_z * dz_ds + g_logd * dl_ds;

        // chain xi = (x - x0)/w and s = h/w into (x0, w, h)
        let g_x0 = -g_xi / w;
        let g_w_local = -g_xi * xi / w - g_s * s / w;
        let g_h_local = g_s / w + g_z * dz_dh;
        let g_y0 = g_z;

        // x0 is a prefix sum of widths; y0 is the output base plus a prefix
        // sum of heights
        for j in 0..k {
            grad.widths[j] += g_x0;
            grad.heights[j] += g_y0;
        }
        grad.y_base += g_y0;
        grad.widths[k] += g_w_local;
        grad.heights[k] += g_h_local;
        grad.derivs[k] += g_z * dz_dd0 + g_logd * dl_dd0;
        grad.derivs[k + 1] += g_z * dz_dd1 + g_logd * dl_dd1;
    }
}

/// Chains a [`SplineGrad`] (gradients w.r.t. constrained parameters) through
/// the constraint transforms, accumulating into gradients w.r.t. the raw
/// vector that produced the spline.
pub(crate) fn backward_raw(raw: &[f64], grad: &SplineGrad, out: &mut [f64]) {
    debug_assert_eq!(raw.len(), RAW_PARAMS_PER_TRANSFORMER);
    debug_assert_eq!(out.len(), RAW_PARAMS_PER_TRANSFORMER);
    let k = SPLINE_BINS;
    let span = 2.0 * SPLINE_BOUND;
    let scale = span * (1.0 - k as f64 * MIN_FRACTION);
    let floor = span * MIN_FRACTION;

    let mut pw = [0.0; SPLINE_BINS];
    let mut ph = [0.0; SPLINE_BINS];
    softmax(&raw[..k], &mut pw);
    softmax(&raw[k..2 * k], &mut ph);

    let out_scale = softplus(raw[3 * k + 1]);
    let tail_unscaled = softplus(raw[3 * k - 1]);

    // widths: w_i = floor + scale * softmax_i
    softmax_vjp(&pw, &grad.widths, scale, &mut out[..k]);
    // folded heights: h'_i = out_scale (floor + scale * softmax_i)
    softmax_vjp(&ph, &grad.heights, out_scale * scale, &mut out[k..2 * k]);

    // interior derivatives: d'_{i+1} = out_scale softplus(raw[2k + i])
    let mut g_scale = 0.0;
    for i in 0..k - 1 {
        out[2 * k + i] += grad.derivs[i + 1] * out_scale * sigmoid(raw[2 * k + i]);
        g_scale += grad.derivs[i + 1] * softplus(raw[2 * k + i]);
    }
    // tail slope feeds both boundary derivatives and the tail itself
    let g_tail = grad.derivs[0] + grad.derivs[k] + grad.tail;
    out[3 * k - 1] += g_tail * out_scale * sigmoid(raw[3 * k - 1]);
    g_scale += g_tail * tail_unscaled;

    // output shift: y_base = shift - out_scale * BOUND
    out[3 * k] += grad.y_base;
    g_scale -= grad.y_base * SPLINE_BOUND;
    // scale channel through the folded heights
    for (gh, &p) in grad.heights.iter().zip(ph.iter()) {
        g_scale += gh * (floor + scale * p);
    }
    out[3 * k + 1] += g_scale * sigmoid(raw[3 * k + 1]);
}

fn softmax_vjp(p: &[f64], upstream: &[f64], scale: f64, out: &mut [f64]) {
    let dot: f64 = p.iter().zip(upstream).map(|(pi, gi)| pi * gi).sum();
    for ((o, &pi), &gi) in out.iter_mut().zip(p).zip(upstream) {
        *o += scale * pi * (gi - dot);
    }
}
