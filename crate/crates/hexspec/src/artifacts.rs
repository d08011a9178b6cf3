//! Serialized outputs: band JSON, butterfly CSV with its Dirichlet sidecar,
//! and a minimal SVG renderer.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hexspec_core::graph::ButterflyDataset;
use hexspec_core::BandList;
use serde::Serialize;

use crate::format::{g, g15};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandsJson {
    pub p: u64,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<&'static str>,
    pub bands: Vec<[f64; 2]>,
    pub measure: f64,
}

impl BandsJson {
    pub fn new(p: u64, q: u64, operator: Option<&'static str>, bands: &BandList) -> Self {
        Self {
            p,
            q,
            operator,
            bands: pairs(bands),
            measure: bands.measure(),
        }
    }
}

pub fn pairs(bands: &BandList) -> Vec<[f64; 2]> {
    bands.iter().map(|b| [b.lo, b.hi]).collect()
}

/// JSON text with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

pub const BUTTERFLY_HEADER: &str = "p,q,hill_band,lo,hi";

pub fn butterfly_csv(data: &ButterflyDataset) -> String {
    let mut out = String::with_capacity(48 * data.rows.len() + 32);
    out.push_str(BUTTERFLY_HEADER);
    out.push('\n');
    for r in &data.rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.p, r.q, r.hill_band, g15(r.lo), g15(r.hi));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletSidecar {
    pub potential: String,
    pub dirichlet_lines: Vec<f64>,
    pub dirac_points: Vec<f64>,
    pub hill_bands: Vec<[f64; 2]>,
}

impl DirichletSidecar {
    pub fn new(data: &ButterflyDataset) -> Self {
        Self {
            potential: data.potential.clone(),
            dirichlet_lines: data.dirichlet_lines.clone(),
            dirac_points: data.dirac_points.clone(),
            hill_bands: data.hill_bands.iter().map(|b| [b.alpha, b.beta]).collect(),
        }
    }
}

/// `out/name.csv` -> `out/name.dirichlet.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.dirichlet.json"))
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 720.0;
const MARGIN: f64 = 64.0;

/// Flux on the horizontal axis, energy on the vertical one. Each band is a
/// short vertical segment; Dirichlet lines are dashed horizontals.
pub fn butterfly_svg(data: &ButterflyDataset) -> String {
    let top = data
        .hill_bands
        .last()
        .map(|b| b.beta)
        .into_iter()
        .chain(data.rows.iter().map(|r| r.hi))
        .fold(f64::NEG_INFINITY, f64::max);
    let bottom = data
        .hill_bands
        .first()
        .map(|b| b.alpha)
        .into_iter()
        .chain(data.rows.iter().map(|r| r.lo))
        .fold(f64::INFINITY, f64::min);
    let (bottom, top) = if bottom.is_finite() && top > bottom {
        (bottom, top)
    } else {
        (0.0, 1.0)
    };
    let x = |a: f64| MARGIN + a * (WIDTH - 2.0 * MARGIN);
    let y = |l: f64| HEIGHT - MARGIN - (l - bottom) / (top - bottom) * (HEIGHT - 2.0 * MARGIN);
    let c = |v: f64| g(v, 6);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        WIDTH, HEIGHT, WIDTH, HEIGHT
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        s,
        "<g stroke=\"black\" fill=\"none\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></g>",
        MARGIN,
        MARGIN,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    s.push_str("<g stroke=\"#b03030\" stroke-width=\"0.6\" stroke-dasharray=\"4 3\">\n");
    for &l in data.dirichlet_lines.iter().filter(|&&l| l >= bottom && l <= top) {
        let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", c(x(0.0)), c(y(l)), c(x(1.0)), c(y(l)));
    }
    s.push_str("</g>\n<g stroke=\"#1f3b73\" stroke-width=\"1\">\n");
    for r in &data.rows {
        let a = r.p as f64 / r.q as f64;
        // keep point bands visible
        let (y0, y1) = (y(r.lo), y(r.hi).min(y(r.lo) - 0.5));
        let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", c(x(a)), c(y0), c(x(a)), c(y1));
    }
    s.push_str("</g>\n<g font-family=\"sans-serif\" font-size=\"14\" fill=\"black\">\n");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">\u{3a6}/2\u{3c0}</text>",
        WIDTH / 2.0,
        HEIGHT - MARGIN / 3.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">\u{3bb}</text>",
        MARGIN / 3.0,
        HEIGHT / 2.0,
        MARGIN / 3.0,
        HEIGHT / 2.0
    );
    for (a, label) in [(0.0, "0"), (0.5, "1/2"), (1.0, "1")] {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", c(x(a)), c(HEIGHT - MARGIN + 18.0), label);
    }
    for l in [bottom, top] {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", c(MARGIN - 6.0), c(y(l) + 5.0), g(l, 4));
    }
    s.push_str("</g>\n</svg>\n");
    s
}
