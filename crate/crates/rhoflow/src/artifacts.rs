//! Exportable result documents and plot-data emission.
//!
//! Curves and posteriors are persisted as JSON documents; plot data is
//! emitted as a CSV of plotted points plus a self-contained SVG (curve with
//! rho-value marker and bound lines; posterior density with shaded credible
//! interval).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bayes::PosteriorSummary;
use crate::causal::{AfBounds, RhoCurve};
use crate::train::TrainConfig;
use crate::Result;

/// The persisted form of a sensitivity curve: the evaluated grid and ACE
/// values with derived summaries, the assumption-free bounds when the data
/// supports them, and enough configuration to reproduce the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveArtifact {
    pub dataset: String,
    pub grid: Vec<f64>,
    pub ace: Vec<f64>,
    pub rho_value: f64,
    pub inf_ace: f64,
    pub sup_ace: f64,
    pub zero_crossing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub af_bounds: Option<AfBounds>,
    pub seeds: Vec<u64>,
    pub config: TrainConfig,
}

impl CurveArtifact {
    pub fn new(
        dataset: impl Into<String>,
        curve: &RhoCurve,
        af_bounds: Option<AfBounds>,
        config: &TrainConfig,
    ) -> Self {
        let seeds = (0..curve.points.len())
            .map(|i| crate::train::grid_point_seed(config.seed, i))
            .collect();
        CurveArtifact {
            dataset: dataset.into(),
            grid: curve.points.iter().map(|p| p.rho).collect(),
            ace: curve.points.iter().map(|p| p.ace).collect(),
            rho_value: curve.rho_value,
            inf_ace: curve.inf_ace,
            sup_ace: curve.sup_ace,
            zero_crossing: curve.zero_crossing,
            af_bounds,
            seeds,
            config: config.clone(),
        }
    }

    pub fn to_curve(&self) -> Result<RhoCurve> {
        let points = self
            .grid
            .iter()
            .zip(&self.ace)
            .map(|(&rho, &ace)| crate::causal::CurvePoint { rho, ace })
            .collect();
        crate::causal::build_curve(points, self.rho_value)
    }
}

/// CSV of the plotted curve points.
pub fn curve_csv(curve: &RhoCurve) -> String {
    let mut out = String::from("rho,ace\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{}", p.rho, p.ace);
    }
    out
}

/// CSV of the posterior density table.
pub fn posterior_csv(summary: &PosteriorSummary) -> String {
    let mut out = String::from("q,density\n");
    for s in &summary.density_samples {
        let _ = writeln!(out, "{},{}", s.q, s.density);
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_header(title: &str) -> String {
    format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<title>{title}</title>\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        title = title
    )
}

fn axes(frame: &Frame, out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        MARGIN,
        MARGIN,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let xv = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let yv = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{:.2}</text>",
            frame.x(xv),
            HEIGHT - MARGIN + 16.0,
            xv
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{:.2}</text>",
            MARGIN - 6.0,
            frame.y(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">{y_label}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

/// Renders the sensitivity curve: the ACE polyline over rho, dashed
/// inf/sup bound lines, a zero line and the rho-value marker.
pub fn curve_svg(curve: &RhoCurve, title: &str) -> String {
    let pad = 0.1 * (curve.sup_ace - curve.inf_ace).max(1e-6);
    let frame = Frame {
        x_min: curve.points.first().map(|p| p.rho).unwrap_or(-1.0),
        x_max: curve.points.last().map(|p| p.rho).unwrap_or(1.0),
        y_min: (curve.inf_ace - pad).min(0.0 - pad),
        y_max: (curve.sup_ace + pad).max(0.0 + pad),
    };
    let mut out = svg_header(title);
    axes(&frame, &mut out, "rho", "ACE");

    // zero line
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{:.2}\" x2=\"{}\" y2=\"{:.2}\" stroke=\"#999\" stroke-width=\"0.7\"/>",
        MARGIN,
        frame.y(0.0),
        WIDTH - MARGIN,
        frame.y(0.0)
    );
    // inf/sup bound lines
    for (bound, label) in [(curve.inf_ace, "inf"), (curve.sup_ace, "sup")] {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#d62728\" \
             stroke-dasharray=\"6 3\" stroke-width=\"1\"/>",
            MARGIN,
            WIDTH - MARGIN,
            y = frame.y(bound)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#d62728\">{label} = {bound:.3}</text>",
            WIDTH - MARGIN - 90.0,
            frame.y(bound) - 4.0
        );
    }
    // rho-value marker
    if curve.rho_value >= frame.x_min && curve.rho_value <= frame.x_max {
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"#2ca02c\" \
             stroke-dasharray=\"4 3\" stroke-width=\"1\"/>",
            MARGIN,
            HEIGHT - MARGIN,
            x = frame.x(curve.rho_value)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#2ca02c\">rho_value = {:.3}</text>",
            frame.x(curve.rho_value) + 4.0,
            MARGIN + 14.0,
            curve.rho_value
        );
    }
    // the curve itself
    let path: Vec<String> = curve
        .points
        .iter()
        .map(|p| format!("{:.2},{:.2}", frame.x(p.rho), frame.y(p.ace)))
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.8\"/>",
        path.join(" ")
    );
    for p in &curve.points {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"#1f77b4\"/>",
            frame.x(p.rho),
            frame.y(p.ace)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Renders the smoothed posterior density with the credible interval shaded.
pub fn posterior_svg(summary: &PosteriorSummary, title: &str) -> String {
    let q_min = summary.density_samples.first().map(|s| s.q).unwrap_or(0.0);
    let q_max = summary.density_samples.last().map(|s| s.q).unwrap_or(1.0);
    let d_max = summary
        .density_samples
        .iter()
        .map(|s| s.density)
        .fold(0.0, f64::max);
    let frame = Frame {
        x_min: q_min,
        x_max: q_max,
        y_min: 0.0,
        y_max: d_max * 1.1 + 1e-12,
    };
    let mut out = svg_header(title);
    axes(&frame, &mut out, "Q", "posterior density");

    // shaded credible interval
    let ci = summary.credible_interval;
    let mut shade = vec![format!("{:.2},{:.2}", frame.x(ci.lo), frame.y(0.0))];
    for s in summary
        .density_samples
        .iter()
        .filter(|s| s.q >= ci.lo && s.q <= ci.hi)
    {
        shade.push(format!("{:.2},{:.2}", frame.x(s.q), frame.y(s.density)));
    }
    shade.push(format!("{:.2},{:.2}", frame.x(ci.hi), frame.y(0.0)));
    let _ = writeln!(
        out,
        "<polygon points=\"{}\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\"/>",
        shade.join(" ")
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#1f77b4\">{}% CI [{:.3}, {:.3}]</text>",
        MARGIN + 8.0,
        MARGIN + 14.0,
        ci.level * 100.0,
        ci.lo,
        ci.hi
    );

    // density path
    let path: Vec<String> = summary
        .density_samples
        .iter()
        .map(|s| format!("{:.2},{:.2}", frame.x(s.q), frame.y(s.density)))
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.8\"/>",
        path.join(" ")
    );
    // support rug
    for (q, p) in summary.support.iter().zip(&summary.pmf) {
        if *q >= frame.x_min && *q <= frame.x_max {
            let _ = writeln!(
                out,
                "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#555\" stroke-width=\"0.8\"/>",
                HEIGHT - MARGIN,
                HEIGHT - MARGIN - (60.0 * p).min(30.0),
                x = frame.x(*q)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes plot data for a curve: `<prefix>.csv` and `<prefix>.svg`.
pub fn emit_curve_plot(curve: &RhoCurve, prefix: impl AsRef<std::path::Path>) -> Result<()> {
    let prefix = prefix.as_ref();
    std::fs::write(prefix.with_extension("csv"), curve_csv(curve))?;
    std::fs::write(
        prefix.with_extension("svg"),
        curve_svg(curve, "sensitivity curve"),
    )?;
    Ok(())
}

/// Writes plot data for a posterior: `<prefix>.csv` and `<prefix>.svg`.
pub fn emit_posterior_plot(
    summary: &PosteriorSummary,
    prefix: impl AsRef<std::path::Path>,
) -> Result<()> {
    let prefix = prefix.as_ref();
    std::fs::write(prefix.with_extension("csv"), posterior_csv(summary))?;
    std::fs::write(
        prefix.with_extension("svg"),
        posterior_svg(summary, "posterior density"),
    )?;
    Ok(())
}
