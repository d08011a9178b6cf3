//! Edge potentials `V` on the unit interval.
//!
//! Every potential is even about the edge midpoint, `V(t) = V(1 - t)`.
//! Tabulated data is symmetrized on construction and interpolated by a
//! natural cubic spline.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;


use crate::error::{Error, Result};

/// Samples above this evenness defect are reported back to the caller.
pub const SYMMETRY_WARN_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    /// `V(t) = amplitude * cos(2 pi t)`.
    Mathieu { amplitude: f64 },
    Tabulated(Tabulated),
}

/// A potential sampled on the uniform grid `t_i = i / (n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    samples: Vec<f64>,
    // second derivatives of the natural spline at the nodes
    moments: Vec<f64>,
    asymmetry: f64,
}

impl Tabulated {
    /// Builds a symmetrized spline from raw samples.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::InvalidPotential("tabulated grid needs at least 2 points"));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("tabulated samples must be finite"));
        }
        let n = raw.len();
        let asymmetry = (0..n)
            .map(|i| (raw[i] - raw[n - 1 - i]).abs())
            .fold(0.0, f64::max);
        let samples: Vec<f64> = (0..n).map(|i| 0.5 * (raw[i] + raw[n - 1 - i])).collect();
        let moments = natural_spline_moments(&samples);
        Ok(Self {
            samples,
            moments,
            asymmetry,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Largest `|V(t_i) - V(1 - t_i)|` of the raw input before symmetrization.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn needs_symmetry_warning(&self) -> bool {
        self.asymmetry > SYMMETRY_WARN_THRESHOLD
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.samples.len();
        let h = 1.0 / (n - 1) as f64;
        let t = t.clamp(0.0, 1.0);
        let k = ((t / h) as usize).min(n - 2);
        let a = (k + 1) as f64 * h - t;
        let b = t - k as f64 * h;
        let (y0, y1) = (self.samples[k], self.samples[k + 1]);
        let (m0, m1) = (self.moments[k], self.moments[k + 1]);
        (m0 * a * a * a + m1 * b * b * b) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b
    }
}

fn natural_spline_moments(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let h = 1.0 / (n - 1) as f64;
    // Thomas algorithm on the interior system  m_{i-1} + 4 m_i + m_{i+1} = rhs_i
    let interior = n - 2;
    let mut diag = vec![4.0; interior];
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h))
        .collect();
    for i in 1..interior {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    m[interior] = rhs[interior - 1] / diag[interior - 1];
    for i in (0..interior - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    m
}

impl PotentialSpec {
    /// Parses `"zero"` or `"mathieu:<amplitude>"`. File-backed potentials are
    /// read by the caller and passed to [`PotentialSpec::tabulated`].
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("zero") {
            return Ok(PotentialSpec::Zero);
        }
        if let Some(rest) = s.strip_prefix("mathieu:") {
            let amplitude: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::InvalidPotential("mathieu amplitude is not a number"))?;
            if !amplitude.is_finite() {
                return Err(Error::InvalidPotential("mathieu amplitude must be finite"));
            }
            return Ok(PotentialSpec::Mathieu { amplitude });
        }
        Err(Error::InvalidPotential(
            "expected \"zero\", \"mathieu:<amplitude>\" or \"file:<path>\"",
        ))
    }

    pub fn tabulated(samples: Vec<f64>) -> Result<Self> {
        Tabulated::new(samples).map(PotentialSpec::Tabulated)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Mathieu { amplitude } => {
                amplitude * (2.0 * core::f64::consts::PI * t).cos()
            }
            PotentialSpec::Tabulated(tab) => tab.eval(t),
        }
    }

    /// Lower bound of `V` on `[0, 1]`, used to start spectral scans.
    pub fn min_value(&self) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Mathieu { amplitude } => -amplitude.abs(),
            PotentialSpec::Tabulated(_) => (0..=1024)
                .map(|i| self.value(i as f64 / 1024.0))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Mathieu { amplitude } => amplitude.abs(),
            PotentialSpec::Tabulated(_) => (0..=1024)
                .map(|i| self.value(i as f64 / 1024.0))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Largest `|V(t) - V(1 - t)|` over a grid of `points` nodes.
    pub fn evenness_defect(&self, points: usize) -> f64 {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let t = i as f64 / (points - 1) as f64;
                (self.value(t) - self.value(1.0 - t)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Short human-readable descriptor, e.g. `mathieu:20`.
    pub fn descriptor(&self) -> String {
        match self {
            PotentialSpec::Zero => String::from("zero"),
            PotentialSpec::Mathieu { amplitude } => format!("mathieu:{amplitude}"),
            PotentialSpec::Tabulated(tab) => format!("tabulated:{}", tab.samples.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_variants() {
        assert_eq!(PotentialSpec::parse("zero").unwrap(), PotentialSpec::Zero);
        assert_eq!(
            PotentialSpec::parse("mathieu:20.0").unwrap(),
            PotentialSpec::Mathieu { amplitude: 20.0 }
        );
        assert!(PotentialSpec::parse("mathieu:abc").is_err());
        assert!(PotentialSpec::parse("gauss:1").is_err());
    }

    #[test]
    fn closed_forms_are_even() {
        for v in [PotentialSpec::Zero, PotentialSpec::Mathieu { amplitude: 20.0 }] {
            assert!(v.evenness_defect(1001) <= 1e-12);
        }
    }

    #[test]
    fn tabulated_rejects_bad_grids() {
        assert!(PotentialSpec::tabulated(vec![1.0]).is_err());
        assert!(PotentialSpec::tabulated(vec![1.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn tabulated_is_symmetrized() {
        let spec = PotentialSpec::tabulated(vec![0.0, 1.0, 3.0, 2.0, 0.5]).unwrap();
        let PotentialSpec::Tabulated(tab) = &spec else {
            unreachable!()
        };
        assert!(tab.needs_symmetry_warning());
        assert!((tab.asymmetry() - 1.0).abs() < 1e-15);
        assert!(spec.evenness_defect(997) <= 1e-12);
    }

    #[test]
    fn spline_reproduces_mathieu_samples() {
        let n = 257;
        let raw: Vec<f64> = (0..n)
            .map(|i| 20.0 * (2.0 * core::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
            .collect();
        let tab = PotentialSpec::tabulated(raw).unwrap();
        let exact = PotentialSpec::Mathieu { amplitude: 20.0 };
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((tab.value(t) - exact.value(t)).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn two_point_grid_is_linear() {
        let tab = PotentialSpec::tabulated(vec![2.0, 2.0]).unwrap();
        assert!((tab.value(0.3) - 2.0).abs() < 1e-15);
    }
}
