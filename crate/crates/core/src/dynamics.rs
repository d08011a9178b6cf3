//! Transfer-matrix dynamics: Lyapunov exponents of the `D` cocycle, its
//! complexification and acceleration, irrational-flux covers built from
//! continued-fraction approximants, and Hölder probes of the spectrum in the
//! flux.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::bands::BandList;
use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::jacobi::rational_spectrum;
use crate::linalg::{cis, op_norm2, Mat2};

use core::f64::consts::PI;

pub use crate::flux::continued_fraction;

/// Products are rescaled after this many factors.
const RENORMALIZE_EVERY: usize = 32;

/// Length of the shortest product in the doubling schedule.
const START_LENGTH: usize = 64;

/// Step of the one-sided difference quotient in [`acceleration`].
pub const ACCELERATION_STEP: f64 = 0.1;

/// Distance to the nearest integer accepted as quantized acceleration.
pub const QUANTIZATION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleConfig {
    pub alpha: f64,
    pub theta_samples: usize,
    pub max_n: usize,
    pub tolerance: f64,
    /// Set for rational flux, where the limit is a Floquet exponent and the
    /// doubling schedule converges differently.
    pub rational: bool,
}

impl CocycleConfig {
    pub fn new(flux: &Flux) -> Self {
        Self {
            alpha: flux.alpha(),
            theta_samples: 64,
            max_n: 1 << 14,
            tolerance: 1e-3,
            rational: flux.as_rational().is_some(),
        }
    }

    pub fn with_max_n(mut self, max_n: usize) -> Self {
        self.max_n = max_n;
        self
    }

    pub fn with_theta_samples(mut self, samples: usize) -> Self {
        self.theta_samples = samples;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_samples < 64 {
            return Err(Error::Domain("theta_samples must be at least 64"));
        }
        if !self.max_n.is_power_of_two() || self.max_n < START_LENGTH {
            return Err(Error::Domain("max_n must be a power of two no smaller than 64"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain("tolerance must be positive"));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidFlux("flux must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub converged: bool,
    /// Product length of the final estimate.
    pub n: usize,
    pub theta_samples: usize,
    /// Set when the flux was rational.
    pub rational_flux: bool,
}

/// `(1/n) log ||D(z_{n-1}) ... D(z_0)||` along `z_j = theta + j alpha + i epsilon`,
/// with the factor `e^{2 pi |epsilon|}` of every matrix divided out and
/// added back at the end.
///
/// With `u = e^{-2 pi i z}` and `w = e^{2 pi i alpha}` the matrix is
/// `[[lambda - u - 1/u, -(1 + conj(w) / u)], [1 + u, 0]]`; `u` is advanced by
/// multiplication and reseeded at every rescaling.
fn log_norm_growth(lambda: f64, theta: f64, epsilon: f64, alpha: f64, n: usize) -> f64 {
    let lam = Complex64::new(lambda, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let w = cis(2.0 * PI * alpha);
    let w_bar = w.conj();
    let damp = (-2.0 * PI * epsilon.abs()).exp();
    let seed = |j: usize| {
        let phase = -2.0 * PI * (theta + j as f64 * alpha);
        let r = (2.0 * PI * epsilon).exp();
        (cis(phase) * r, cis(-phase) / r)
    };
    let (mut u, mut u_inv) = seed(0);
    let (mut m00, mut m01, mut m10, mut m11) = (one, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one);
    let mut log_scale = 0.0;
    for j in 0..n {
        let a = (lam - u - u_inv) * damp;
        let b = -(one + w_bar * u_inv) * damp;
        let c = (one + u) * damp;
        // [[a, b], [c, 0]] * m
        let (n00, n01) = (a * m00 + b * m10, a * m01 + b * m11);
        let (n10, n11) = (c * m00, c * m01);
        m00 = n00;
        m01 = n01;
        m10 = n10;
        m11 = n11;
        if (j + 1) % RENORMALIZE_EVERY == 0 {
            let s = m00.norm().max(m01.norm()).max(m10.norm()).max(m11.norm());
            if s == 0.0 {
                return f64::NEG_INFINITY;
            }
            let inv = 1.0 / s;
            m00 *= inv;
            m01 *= inv;
            m10 *= inv;
            m11 *= inv;
            log_scale += s.ln();
            (u, u_inv) = seed(j + 1);
        } else {
            u *= w_bar;
            u_inv *= w;
        }
    }
    let m = Mat2::new(m00, m01, m10, m11);
    (op_norm2(&m).ln() + log_scale) / n as f64 + 2.0 * PI * epsilon.abs()
}

/// Irrational offset of the phase grid, keeping nodes off `1/2 + Z/q`.
fn grid_offset() -> f64 {
    let x = 1.0 / 5.0f64.sqrt();
    x - x.floor()
}

fn averaged_growth(lambda: f64, epsilon: f64, alpha: f64, n: usize, samples: usize) -> f64 {
    let offset = grid_offset();
    (0..samples)
        .map(|k| {
            let theta = (k as f64 + offset) / samples as f64;
            log_norm_growth(lambda, theta, epsilon, alpha, n)
        })
        .sum::<f64>()
        / samples as f64
}

fn doubling_schedule(lambda: f64, epsilon: f64, config: &CocycleConfig) -> Result<LyapunovEstimate> {
    config.validate()?;
    let mut n = START_LENGTH;
    let mut samples = config.theta_samples;
    let mut prev = averaged_growth(lambda, epsilon, config.alpha, n, samples);
    while n < config.max_n {
        n *= 2;
        samples *= 2;
        let next = averaged_growth(lambda, epsilon, config.alpha, n, samples);
        if !next.is_finite() {
            return Err(Error::Domain("transfer-matrix product degenerated"));
        }
        if (next - prev).abs() < config.tolerance {
            return Ok(LyapunovEstimate {
                value: next,
                converged: true,
                n,
                theta_samples: samples,
                rational_flux: config.rational,
            });
        }
        prev = next;
    }
    Ok(LyapunovEstimate {
        value: prev,
        converged: false,
        n,
        theta_samples: samples,
        rational_flux: config.rational,
    })
}

/// Lyapunov exponent of the Jacobi cocycle at energy `lambda`.
///
/// Computed from the `D` cocycle, which is defined for every phase; its
/// exponent equals that of the normalized cocycle because
/// `int_0^1 log |1 + e^{-2 pi i theta}| d theta = 0`.
pub fn lyapunov(lambda: f64, config: &CocycleConfig) -> Result<LyapunovEstimate> {
    doubling_schedule(lambda, 0.0, config)
}

/// Lyapunov exponent of the `D` cocycle with the phase shifted to `theta + i epsilon`.
pub fn complexified_le(lambda: f64, epsilon: f64, config: &CocycleConfig) -> Result<LyapunovEstimate> {
    doubling_schedule(lambda, epsilon, config)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acceleration {
    pub value: f64,
    pub nearest_integer: i64,
    pub quantized: bool,
}

/// `(L(eps + h) - L(eps)) / (2 pi h)` on a common phase grid and product
/// length, so the estimation error largely cancels.
pub fn acceleration(lambda: f64, epsilon: f64, config: &CocycleConfig) -> Result<Acceleration> {
    if epsilon == 0.0 {
        return Err(Error::Domain("acceleration needs a non-zero imaginary shift"));
    }
    config.validate()?;
    let h = ACCELERATION_STEP;
    let mut n = START_LENGTH;
    let mut samples = config.theta_samples;
    let quotient = |n: usize, samples: usize| {
        let a = averaged_growth(lambda, epsilon, config.alpha, n, samples);
        let b = averaged_growth(lambda, epsilon + h, config.alpha, n, samples);
        (b - a) / (2.0 * PI * h)
    };
    let mut value = quotient(n, samples);
    while n < config.max_n {
        n *= 2;
        samples *= 2;
        let next = quotient(n, samples);
        let done = (next - value).abs() < config.tolerance;
        value = next;
        if done {
            break;
        }
    }
    let nearest = value.round();
    Ok(Acceleration {
        value,
        nearest_integer: nearest as i64,
        quantized: (value - nearest).abs() <= QUANTIZATION_TOLERANCE,
    })
}

/// Midpoint rule for `int_0^1 log |1 + e^{-2 pi i theta}| d theta`, which is 0.
pub fn coupling_log_mean(samples: usize) -> f64 {
    let n = samples.max(1);
    (0..n)
        .map(|k| {
            let theta = (k as f64 + 0.5) / n as f64;
            (2.0 * (PI * theta).cos().abs()).ln()
        })
        .sum::<f64>()
        / n as f64
}

/// Lyapunov exponent at rational `p / q` from the Floquet formula
/// `(1/q) int log rho(D_q(theta)) d theta`, with `rho` the spectral radius.
pub fn floquet_exponent(lambda: f64, p: u64, q: u64, samples: usize) -> f64 {
    let alpha = p as f64 / q as f64;
    let offset = grid_offset();
    let mut acc = 0.0;
    for k in 0..samples {
        let theta = (k as f64 + offset) / samples as f64;
        let m = crate::jacobi::d_product(lambda, theta, alpha, q as usize);
        let tr = m.trace();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = (tr * tr - det * 4.0).sqrt();
        let rho = ((tr + disc) * 0.5).norm().max(((tr - disc) * 0.5).norm());
        acc += rho.ln() / q as f64;
    }
    acc / samples as f64
}

/// Cover of the spectrum at irrational flux from its `n`-th convergent.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverEstimate {
    pub n: usize,
    pub p_n: u64,
    pub q_n: u64,
    pub holder_constant: f64,
    /// `C2 |alpha - p_n / q_n|^{1/2}`.
    pub radius: f64,
    pub intervals: BandList,
    /// `16 pi / (3 q_n) + 2 C2 q_n |alpha - p_n / q_n|^{1/2}`.
    pub bound: f64,
}

impl CoverEstimate {
    pub fn measure(&self) -> f64 {
        self.intervals.measure()
    }
}

/// `Sigma_{p_n / q_n}` with every band widened by `C2 |alpha - p_n / q_n|^{1/2}`.
pub fn irrational_cover(flux: &Flux, n: usize, holder_constant: f64) -> Result<CoverEstimate> {
    let (p, q) = flux
        .convergent(n)
        .ok_or(Error::Domain("convergent index out of range"))?;
    if !(holder_constant >= 0.0) {
        return Err(Error::Domain("Hölder constant must be non-negative"));
    }
    let distance = (flux.alpha() - p as f64 / q as f64).abs();
    let radius = holder_constant * distance.sqrt();
    let sigma = rational_spectrum(p, q)?;
    let intervals = if radius > 0.0 { sigma.inflate(radius) } else { sigma };
    Ok(CoverEstimate {
        n,
        p_n: p,
        q_n: q,
        holder_constant,
        radius,
        intervals,
        bound: 16.0 * PI / (3.0 * q as f64) + 2.0 * q as f64 * radius,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderReport {
    /// Largest distance from a band endpoint of the first spectrum to the second.
    pub sup_onesided_distance: f64,
    /// `sup_onesided_distance / |alpha_1 - alpha_2|^{1/2}`, in units of
    /// `alpha = Phi / 2 pi`; 0 when the fluxes coincide.
    pub ratio: f64,
}

pub fn holder_probe(flux1: (u64, u64), flux2: (u64, u64)) -> Result<HolderReport> {
    let s1 = rational_spectrum(flux1.0, flux1.1)?;
    let s2 = rational_spectrum(flux2.0, flux2.1)?;
    let sup = s1
        .iter()
        .flat_map(|b| [b.lo, b.hi])
        .map(|x| s2.distance_to(x))
        .fold(0.0, f64::max);
    let da = (flux1.0 as f64 / flux1.1 as f64 - flux2.0 as f64 / flux2.1 as f64).abs();
    let ratio = if da == 0.0 { 0.0 } else { sup / da.sqrt() };
    Ok(HolderReport {
        sup_onesided_distance: sup,
        ratio,
    })
}

/// Smallest `C2` for which the spectrum at each convergent `m` in
/// `(n, levels]` lies in the cover built from convergent `n`, over
/// `1 <= n < levels`.
pub fn fit_holder_constant(flux: &Flux, levels: usize) -> Result<f64> {
    let alpha = flux.alpha();
    let mut spectra = Vec::with_capacity(levels);
    for n in 1..=levels {
        let (p, q) = flux
            .convergent(n)
            .ok_or(Error::Domain("convergent index out of range"))?;
        spectra.push(((p, q), rational_spectrum(p, q)?));
    }
    let mut c2: f64 = 0.0;
    for (i, ((p, q), shallow)) in spectra.iter().enumerate() {
        let d = (alpha - *p as f64 / *q as f64).abs().sqrt();
        for (_, deep) in spectra.iter().skip(i + 1) {
            let sup = deep
                .iter()
                .flat_map(|b| [b.lo, b.hi])
                .map(|x| shallow.distance_to(x))
                .fold(0.0, f64::max);
            if d > 0.0 {
                c2 = c2.max(sup / d);
            }
        }
    }
    Ok(c2)
}
