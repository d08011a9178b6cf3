//! Spectrum of the two-dimensional tight-binding operator `Q` obtained from
//! the Jacobi spectrum through `x -> +-sqrt(x / 9 + 1 / 3)`, plus the point 0.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::bands::{BandList, Interval};
use crate::error::{Error, Result};

use core::f64::consts::PI;

/// Radicands below this are snapped to zero.
const RADICAND_SNAP: f64 = 1e-12;

const THETA_GRID: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct QSpectrum {
    pub bands: BandList,
    pub contains_zero: bool,
}

impl QSpectrum {
    pub fn measure(&self) -> f64 {
        self.bands.measure()
    }

    /// Largest `|w + w'|` over band endpoints `w` matched with their mirror
    /// image, i.e. the defect of symmetry under negation.
    pub fn symmetry_defect(&self) -> f64 {
        let iv = self.bands.intervals();
        let n = iv.len();
        (0..n)
            .map(|i| {
                let j = n - 1 - i;
                (iv[i].lo + iv[j].hi).abs().max((iv[i].hi + iv[j].lo).abs())
            })
            .fold(0.0, f64::max)
    }
}

fn radical(x: f64) -> f64 {
    let r = x / 9.0 + 1.0 / 3.0;
    if r <= RADICAND_SNAP {
        0.0
    } else {
        r.sqrt()
    }
}

/// Maps the Jacobi spectrum to the spectrum of `Q`. Each band `[a, b]`
/// contributes `[r(a), r(b)]` and its mirror image, with
/// `r(x) = sqrt(x / 9 + 1 / 3)`.
pub fn q_spectrum(sigma_phi: &BandList) -> Result<QSpectrum> {
    let mut out: Vec<Interval> = Vec::with_capacity(2 * sigma_phi.len() + 1);
    for band in sigma_phi.iter() {
        if band.lo < -3.0 - RADICAND_SNAP {
            return Err(Error::Domain("Jacobi spectrum extends below -3"));
        }
        if band.hi > 6.0 + RADICAND_SNAP {
            return Err(Error::Domain("Jacobi spectrum extends above 6"));
        }
        let (lo, hi) = (radical(band.lo), radical(band.hi));
        out.push(Interval::new(lo, hi));
        // adding 0.0 turns -0.0 into 0.0
        out.push(Interval::new(-hi + 0.0, -lo + 0.0));
    }
    let mut bands = BandList::new(out);
    if !bands.contains(0.0, 0.0) {
        bands = bands.union(&BandList::new(alloc::vec![Interval::point(0.0)]));
    }
    Ok(QSpectrum {
        bands,
        contains_zero: true,
    })
}

fn norm_profile(theta: f64, alpha: f64) -> f64 {
    let a = (PI * (theta - alpha)).sin();
    let b = (PI * theta).sin();
    let c = (2.0 * PI * theta).cos();
    a * a + b * b + c * c
}

/// `c_Phi = sqrt(12 sup_theta (sin^2 pi(theta - alpha) + sin^2 pi theta + cos^2 2 pi theta))`,
/// with `alpha = Phi / 2 pi`.
pub fn jacobi_norm_bound(phi: f64) -> f64 {
    let alpha = phi / (2.0 * PI);
    let h = 1.0 / THETA_GRID as f64;
    let (mut best_theta, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..THETA_GRID {
        let t = i as f64 * h;
        let f = norm_profile(t, alpha);
        if f > best {
            best = f;
            best_theta = t;
        }
    }
    // golden-section refinement on the neighbouring grid cells
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_theta - h, best_theta + h);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (norm_profile(x1, alpha), norm_profile(x2, alpha));
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = norm_profile(x1, alpha);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = norm_profile(x2, alpha);
        }
    }
    let sup = best.max(f1).max(f2);
    (12.0 * sup).sqrt()
}

/// Upper bound `sqrt(1/3 + c_Phi / 9)` on the norm of `Q`.
pub fn q_norm_bound(phi: f64) -> f64 {
    (1.0 / 3.0 + jacobi_norm_bound(phi) / 9.0).sqrt()
}
