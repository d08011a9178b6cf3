//! The reduced quasi-periodic Jacobi operator
//! `(H u)_m = c(theta + m alpha) u_{m+1} + conj c(theta + (m-1) alpha) u_{m-1} + v(theta + m alpha) u_m`
//! with `c(theta) = 1 + e^{-2 pi i theta}` and `v(theta) = 2 cos 2 pi theta`,
//! its transfer matrices and its exact spectrum at rational `alpha = p / q`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::bands::{BandList, Interval};
use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::linalg::{cis, hermitian_eigenvalues, symmetric_eigenvalues, CMatrix, Mat2};

use core::f64::consts::PI;

/// Largest denominator accepted by the dense eigensolver paths.
pub const MAX_DENOMINATOR: u64 = 400;

/// Distance from `1/2 + Z/q` tolerated when a matrix requires `theta` there.
pub const THETA_SET_TOLERANCE: f64 = 1e-12;

const INTERLACING_TOLERANCE: f64 = 1e-9;

pub fn coupling(theta: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) + cis(-2.0 * PI * theta)
}

/// `|c(theta)| = 2 |cos pi theta|`.
pub fn coupling_abs(theta: f64) -> f64 {
    2.0 * (PI * theta).cos().abs()
}

pub fn onsite(theta: f64) -> f64 {
    2.0 * (2.0 * PI * theta).cos()
}

/// `prod_{j<q} |c(theta + j p / q)| = 2 |sin pi q (theta + 1/2)|`.
pub fn coupling_product_abs(theta: f64, q: u64) -> f64 {
    2.0 * (PI * q as f64 * (theta + 0.5)).sin().abs()
}

/// `D(z)` at a complex phase `z`, analytically continued from real `theta`.
pub fn transfer_d_at(lambda: f64, z: Complex64, alpha: f64) -> Mat2 {
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let e = |w: Complex64| (two_pi_i * w).exp();
    let one = Complex64::new(1.0, 0.0);
    let a = Complex64::new(lambda, 0.0) - e(z) - e(-z);
    // conj c(theta - alpha) continued analytically is 1 + e^{2 pi i (z - alpha)}
    let b = -(one + e(z - alpha));
    let c = one + e(-z);
    Mat2::new(a, b, c, Complex64::new(0.0, 0.0))
}

/// `D^lambda(theta) = [[lambda - v(theta), -conj c(theta - alpha)], [c(theta), 0]]`.
pub fn transfer_d(lambda: f64, theta: f64, flux: &Flux) -> Mat2 {
    transfer_d_real(lambda, theta, flux.alpha())
}

pub fn transfer_d_real(lambda: f64, theta: f64, alpha: f64) -> Mat2 {
    Mat2::new(
        Complex64::new(lambda - onsite(theta), 0.0),
        -coupling(theta - alpha).conj(),
        coupling(theta),
        Complex64::new(0.0, 0.0),
    )
}

/// `D_n = D(theta + (n-1) alpha) ... D(theta + alpha) D(theta)`.
pub fn d_product(lambda: f64, theta: f64, alpha: f64, n: usize) -> Mat2 {
    let mut m = Mat2::identity();
    for j in 0..n {
        m = transfer_d_real(lambda, theta + j as f64 * alpha, alpha) * m;
    }
    m
}

/// `tr D_q^lambda(theta)` at `alpha = p / q`; real by construction.
pub fn trace_dq(lambda: f64, theta: f64, p: u64, q: u64) -> f64 {
    d_product(lambda, theta, p as f64 / q as f64, q as usize).trace().re
}

/// The upper envelope `L_q(theta) = 4 |sin pi q (theta + 1/2)| + 2 cos 2 pi q theta`.
pub fn upper_envelope(theta: f64, q: u64) -> f64 {
    2.0 * coupling_product_abs(theta, q) + 2.0 * (2.0 * PI * q as f64 * theta).cos()
}

/// The lower envelope `l_q(theta) = -4 |sin pi q (theta + 1/2)| + 2 cos 2 pi q theta`.
pub fn lower_envelope(theta: f64, q: u64) -> f64 {
    -2.0 * coupling_product_abs(theta, q) + 2.0 * (2.0 * PI * q as f64 * theta).cos()
}

/// `G_q(lambda) = tr D_q(theta) + 2 cos 2 pi q theta`, independent of `theta`.
pub fn chambers_gq(lambda: f64, p: u64, q: u64) -> f64 {
    chambers_gq_at(lambda, p, q, 1.0 / (4.0 * q as f64))
}

pub fn chambers_gq_at(lambda: f64, p: u64, q: u64, theta: f64) -> f64 {
    trace_dq(lambda, theta, p, q) + 2.0 * (2.0 * PI * q as f64 * theta).cos()
}

/// Signed distance of `q (theta - 1/2)` to the nearest integer, divided by `q`.
fn theta_set_distance(theta: f64, q: u64) -> f64 {
    let x = q as f64 * (theta - 0.5);
    (x - x.round()).abs() / q as f64
}

pub fn in_theta_set(theta: f64, q: u64) -> bool {
    theta_set_distance(theta, q) <= THETA_SET_TOLERANCE
}

fn check_denominator(q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidFlux("denominator must be positive"));
    }
    if q > MAX_DENOMINATOR {
        return Err(Error::DenominatorTooLarge {
            q,
            cap: MAX_DENOMINATOR,
        });
    }
    Ok(())
}

/// The `q x q` block of `H` at `theta` in `1/2 + Z/q`: diagonal
/// `v(theta - j p/q)`, subdiagonal `c(theta - (j+1) p/q)` and the periodic
/// corner `c(theta)`. One coupling vanishes on this set, so the block
/// decouples from its neighbours and `det(lambda - M) = tr D_q`.
pub fn build_mq(theta: f64, p: u64, q: u64) -> Result<CMatrix> {
    check_denominator(q)?;
    if !in_theta_set(theta, q) {
        return Err(Error::Domain("theta must lie in 1/2 + Z/q"));
    }
    let n = q as usize;
    let alpha = p as f64 / q as f64;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] += Complex64::new(onsite(theta - j as f64 * alpha), 0.0);
    }
    for j in 0..n {
        // site j couples to site j+1 (mod q) through c(theta - (j+1) alpha)
        let cj = coupling(theta - (j + 1) as f64 * alpha);
        let k = (j + 1) % n;
        m[(k, j)] += cj;
        m[(j, k)] += cj.conj();
    }
    Ok(m)
}

/// Bloch-twisted block with moduli `|c|` off the diagonal and corners
/// `e^{+-2 pi i nu} |c(theta)|`.
pub fn build_mq_nu(theta: f64, nu: f64, p: u64, q: u64) -> CMatrix {
    let n = q as usize;
    let alpha = p as f64 / q as f64;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] += Complex64::new(onsite(theta - j as f64 * alpha), 0.0);
    }
    for j in 0..n.saturating_sub(1) {
        let a = Complex64::new(coupling_abs(theta - (j + 1) as f64 * alpha), 0.0);
        m[(j + 1, j)] += a;
        m[(j, j + 1)] += a;
    }
    let corner = cis(2.0 * PI * nu) * coupling_abs(theta);
    m[(0, n - 1)] += corner;
    m[(n - 1, 0)] += corner.conj();
    m
}

/// Real symmetric version of [`build_mq_nu`] for `nu = 0` or `nu = 1/2`.
fn build_mq_real(theta: f64, antiperiodic: bool, p: u64, q: u64) -> DMatrix<f64> {
    let n = q as usize;
    let alpha = p as f64 / q as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] += onsite(theta - j as f64 * alpha);
    }
    for j in 0..n.saturating_sub(1) {
        let a = coupling_abs(theta - (j + 1) as f64 * alpha);
        m[(j + 1, j)] += a;
        m[(j, j + 1)] += a;
    }
    let corner = if antiperiodic { -1.0 } else { 1.0 } * coupling_abs(theta);
    m[(0, n - 1)] += corner;
    m[(n - 1, 0)] += corner;
    m
}

/// Eigenvalues of `M_{q,nu}(theta)` in increasing order.
pub fn mq_nu_eigenvalues(theta: f64, nu: f64, p: u64, q: u64) -> Vec<f64> {
    hermitian_eigenvalues(build_mq_nu(theta, nu, p, q))
}

/// `sigma(H_{p/q, theta})`: `q` possibly touching bands whose `k`-th
/// endpoints are the `k`-th eigenvalues of the periodic and antiperiodic
/// blocks.
pub fn theta_spectrum(p: u64, q: u64, theta: f64) -> Result<BandList> {
    check_denominator(q)?;
    let periodic = symmetric_eigenvalues(build_mq_real(theta, false, p, q));
    let anti = symmetric_eigenvalues(build_mq_real(theta, true, p, q));
    let bands: Vec<Interval> = periodic
        .iter()
        .zip(anti.iter())
        .map(|(&a, &b)| Interval::new(a.min(b), a.max(b)))
        .collect();
    check_band_order(&bands)?;
    Ok(BandList::new(bands))
}

fn check_band_order(bands: &[Interval]) -> Result<()> {
    let scale = bands
        .iter()
        .map(|b| b.lo.abs().max(b.hi.abs()))
        .fold(1.0, f64::max);
    for w in bands.windows(2) {
        let overlap = w[0].hi - w[1].lo;
        if overlap > INTERLACING_TOLERANCE * scale {
            return Err(Error::Consistency {
                what: "periodic and antiperiodic eigenvalues do not interlace",
                deviation: overlap,
            });
        }
    }
    Ok(())
}

/// The two phases whose per-phase spectra together cover `Sigma_{p/q}`:
/// one reaches the global minimum of `l_q`, the other the global maximum of
/// `L_q`.
pub fn extremal_phases(q: u64) -> (f64, f64) {
    let qf = q as f64;
    if q % 2 == 0 {
        ((qf + 1.0) / (2.0 * qf), 1.0 / (6.0 * qf))
    } else {
        ((3.0 * qf - 1.0) / (6.0 * qf), (qf - 1.0) / (2.0 * qf))
    }
}

/// `Sigma_{p/q} = union over theta of sigma(H_{p/q, theta})` as `q`
/// possibly touching bands.
pub fn rational_spectrum(p: u64, q: u64) -> Result<BandList> {
    check_denominator(q)?;
    let (theta_a, theta_b) = extremal_phases(q);
    let a = theta_spectrum(p, q, theta_a)?;
    let b = theta_spectrum(p, q, theta_b)?;
    // band k of the union is the k-th branch of G_q over the full window
    let bands: Vec<Interval> = a
        .intervals()
        .iter()
        .zip(b.intervals().iter())
        .map(|(x, y)| Interval::new(x.lo.min(y.lo), x.hi.max(y.hi)))
        .collect();
    if a.len() != q as usize || b.len() != q as usize {
        // degenerate point bands were merged; fall back to the set union
        return Ok(a.union(&b));
    }
    check_band_order(&bands)?;
    Ok(BandList::new(bands))
}

/// `Sigma_{p/q}` with no band structure, the union of the two extremal
/// per-phase spectra.
pub fn rational_spectrum_set(p: u64, q: u64) -> Result<BandList> {
    let (theta_a, theta_b) = extremal_phases(q);
    Ok(theta_spectrum(p, q, theta_a)?.union(&theta_spectrum(p, q, theta_b)?))
}

/// `A~(theta) = D(theta) / sqrt(|c(theta)| |c(theta - alpha)|)` with the
/// couplings replaced by their moduli. Undefined where `c` vanishes.
pub fn normalized_transfer(lambda: f64, theta: f64, alpha: f64) -> Result<Mat2> {
    let c0 = coupling_abs(theta);
    let c1 = coupling_abs(theta - alpha);
    let norm = c0 * c1;
    if norm <= 1e-300 {
        return Err(Error::Domain("normalized transfer matrix is singular at this phase"));
    }
    let s = 1.0 / norm.sqrt();
    let r = |x: f64| Complex64::new(x * s, 0.0);
    Ok(Mat2::new(r(lambda - onsite(theta)), r(-c1), r(c0), r(0.0)))
}

/// `tr A~_q(theta)` at `alpha = p / q`.
pub fn normalized_trace(lambda: f64, theta: f64, p: u64, q: u64) -> Result<f64> {
    let alpha = p as f64 / q as f64;
    let mut m = Mat2::identity();
    for j in 0..q as usize {
        m = normalized_transfer(lambda, theta + j as f64 * alpha, alpha)? * m;
    }
    Ok(m.trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{determinant, is_hermitian};

    #[test]
    fn coefficient_identities() {
        for i in 0..50 {
            let theta = i as f64 * 0.0731;
            assert!((coupling(theta).norm() - coupling_abs(theta)).abs() < 1e-14);
            for (p, q) in [(1u64, 3u64), (2, 5), (3, 8)] {
                let prod: f64 = (0..q)
                    .map(|j| coupling(theta + j as f64 * p as f64 / q as f64).norm())
                    .product();
                assert!((prod - coupling_product_abs(theta, q)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transfer_matrix_basics() {
        let flux = Flux::rational(1, 1).unwrap();
        let d = transfer_d(1.3, 0.2, &flux);
        assert!((d.trace().re - (1.3 - onsite(0.2))).abs() < 1e-14);
        let flux = Flux::rational(2, 7).unwrap();
        let (theta, alpha) = (0.41, 2.0 / 7.0);
        let d = transfer_d(0.7, theta, &flux);
        let det = d[(0, 0)] * d[(1, 1)] - d[(0, 1)] * d[(1, 0)];
        let expected = coupling(theta) * coupling(theta - alpha).conj();
        assert!((det - expected).norm() < 1e-14);
    }

    #[test]
    fn continued_transfer_matches_real_phase() {
        let a = transfer_d_at(2.1, Complex64::new(0.33, 0.0), 0.2);
        let b = transfer_d_real(2.1, 0.33, 0.2);
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn half_flux_trace_expansion() {
        for i in 0..20 {
            let lambda = -4.0 + 0.43 * i as f64;
            let theta = 0.017 + 0.049 * i as f64;
            let tr = trace_dq(lambda, theta, 1, 2);
            let expected = lambda * lambda - 6.0 - 2.0 * (4.0 * PI * theta).cos();
            assert!((tr - expected).abs() < 1e-11);
        }
    }

    #[test]
    fn chambers_small_cases() {
        for lambda in [-3.0, -0.5, 0.0, 2.2, 5.0] {
            assert!((chambers_gq(lambda, 1, 1) - lambda).abs() < 1e-13);
            assert!((chambers_gq(lambda, 0, 1) - lambda).abs() < 1e-13);
            assert!((chambers_gq(lambda, 1, 2) - (lambda * lambda - 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_is_real() {
        let d = d_product(0.8, 0.123, 3.0 / 7.0, 7);
        assert!(d.trace().im.abs() < 1e-10);
    }

    #[test]
    fn mq_examples() {
        let m = build_mq(0.5, 0, 1).unwrap();
        assert!((m[(0, 0)].re + 2.0).abs() < 1e-15);
        assert!(build_mq(0.3, 1, 2).is_err());
        let m = build_mq(0.5 + 2.0 / 7.0, 3, 7).unwrap();
        assert!(is_hermitian(&m, 1e-14));
    }

    #[test]
    fn det_equals_trace_on_theta_set() {
        for (p, q) in [(1u64, 2u64), (1, 3), (2, 5), (3, 8), (5, 13)] {
            for k in 0..q {
                let theta = 0.5 + k as f64 / q as f64;
                let m = build_mq(theta, p, q).unwrap();
                for lambda in [-5.5, -1.0, 0.3, 2.7] {
                    let n = q as usize;
                    let lm = CMatrix::identity(n, n) * Complex64::new(lambda, 0.0) - &m;
                    let det = determinant(lm);
                    let tr = trace_dq(lambda, theta, p, q);
                    assert!((det.re - tr).abs() <= 1e-8 * (1.0 + tr.abs()), "{p}/{q} {theta} {lambda}");
                    assert!(det.im.abs() <= 1e-8 * (1.0 + tr.abs()));
                }
            }
        }
    }

    #[test]
    fn mq_nu_corners() {
        let m = build_mq_nu(0.2, 0.0, 1, 3);
        assert!((m[(0, 2)].re - coupling_abs(0.2)).abs() < 1e-15);
        let m = build_mq_nu(0.2, 0.5, 1, 3);
        assert!((m[(0, 2)].re + coupling_abs(0.2)).abs() < 1e-15);
        assert!(is_hermitian(&build_mq_nu(0.31, 0.17, 2, 5), 1e-15));
    }

    #[test]
    fn periodic_block_solves_upper_level_set() {
        // G_2(lambda) = lambda^2 - 6 = L_2(theta), and = l_2(theta) for nu = 1/2
        let theta = 0.1;
        let upper = (upper_envelope(theta, 2) + 6.0).sqrt();
        let lower = (lower_envelope(theta, 2) + 6.0).sqrt();
        let ev0 = mq_nu_eigenvalues(theta, 0.0, 1, 2);
        let ev1 = mq_nu_eigenvalues(theta, 0.5, 1, 2);
        assert!((ev0[0] + upper).abs() < 1e-12 && (ev0[1] - upper).abs() < 1e-12);
        assert!((ev1[0] + lower).abs() < 1e-12 && (ev1[1] - lower).abs() < 1e-12);
    }

    #[test]
    fn theta_spectrum_examples() {
        let s = theta_spectrum(1, 2, 0.5).unwrap();
        assert!(s.measure() <= 1e-12);
        let s = theta_spectrum(0, 1, 0.0).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.intervals()[0].lo + 2.0).abs() < 1e-13);
        assert!((s.intervals()[0].hi - 6.0).abs() < 1e-13);
    }

    #[test]
    fn rational_spectrum_examples() {
        for p in [0, 1] {
            let s = rational_spectrum(p, 1).unwrap();
            assert_eq!(s.len(), 1);
            assert!((s.min().unwrap() + 3.0).abs() < 1e-12);
            assert!((s.max().unwrap() - 6.0).abs() < 1e-12);
        }
        let s = rational_spectrum(1, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.min().unwrap() + 3.0).abs() < 1e-12);
        assert!((s.max().unwrap() - 3.0).abs() < 1e-12);
        assert!(s.intervals()[0].hi.abs() < 1e-12);
        let s = rational_spectrum(1, 5).unwrap();
        assert!(s.measure() < 16.0 * PI / 15.0);
        assert!(rational_spectrum(1, 401).is_err());
    }

    #[test]
    fn normalized_trace_identity() {
        for (p, q, theta) in [(1u64, 3u64, 0.11), (2, 5, 0.37), (5, 8, 0.73)] {
            for lambda in [-2.0, 0.4, 3.3] {
                let lhs = normalized_trace(lambda, theta, p, q).unwrap() * coupling_product_abs(theta, q);
                let rhs = trace_dq(lambda, theta, p, q);
                assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
            }
        }
    }
}
