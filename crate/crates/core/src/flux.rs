//! Magnetic flux per hexagon, normalized as `alpha = Phi / 2 pi`, and
//! continued-fraction approximants.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::error::{Error, Result};

/// Number of convergents stored with a real flux. Deeper approximants of an
/// `f64` stop carrying information about the intended irrational.
pub const DEFAULT_CONVERGENTS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub enum Flux {
    /// `alpha = p / q` in lowest terms.
    Rational { p: u64, q: u64 },
    /// `alpha` in `(0, 1)` together with its convergents `(p_n, q_n)`, `n >= 1`.
    Real { alpha: f64, convergents: Vec<(u64, u64)> },
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Flux {
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidFlux("denominator must be positive"));
        }
        let g = gcd(p, q).max(1);
        Ok(Flux::Rational { p: p / g, q: q / g })
    }

    pub fn real(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidFlux("flux must be finite"));
        }
        let frac = alpha - alpha.floor();
        Ok(Flux::Real {
            alpha: frac,
            convergents: continued_fraction(frac, DEFAULT_CONVERGENTS),
        })
    }

    /// `alpha = (sqrt 5 - 1) / 2`, whose convergents are Fibonacci ratios.
    pub fn golden() -> Self {
        Flux::real((5.0f64.sqrt() - 1.0) / 2.0).expect("finite")
    }

    /// Parses `"p/q"`, a finite decimal (read exactly as a rational) or
    /// `"golden"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("golden") {
            return Ok(Flux::golden());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidFlux("numerator is not a non-negative integer"))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::InvalidFlux("denominator is not a positive integer"))?;
            return Flux::rational(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
        if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
            return Err(Error::InvalidFlux("expected \"p/q\", a decimal or \"golden\""));
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 18 {
            return Err(Error::InvalidFlux("too many decimal digits"));
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| Error::InvalidFlux("integer part too large"))?
        };
        let q = 10u64.pow(frac.len() as u32);
        let f: u64 = if frac.is_empty() { 0 } else { frac.parse().expect("digits") };
        let p = int
            .checked_mul(q)
            .and_then(|v| v.checked_add(f))
            .ok_or(Error::InvalidFlux("flux too large"))?;
        Flux::rational(p, q)
    }

    /// `Phi / 2 pi`.
    pub fn alpha(&self) -> f64 {
        match self {
            Flux::Rational { p, q } => *p as f64 / *q as f64,
            Flux::Real { alpha, .. } => *alpha,
        }
    }

    /// The flux `Phi` itself.
    pub fn phi(&self) -> f64 {
        2.0 * core::f64::consts::PI * self.alpha()
    }

    pub fn as_rational(&self) -> Option<(u64, u64)> {
        match self {
            Flux::Rational { p, q } => Some((*p, *q)),
            Flux::Real { .. } => None,
        }
    }

    /// Convergent `n >= 1`; rationals are their own sole convergent.
    pub fn convergent(&self, n: usize) -> Option<(u64, u64)> {
        match self {
            Flux::Rational { p, q } => (n == 1).then_some((*p, *q)),
            Flux::Real { convergents, .. } => n.checked_sub(1).and_then(|i| convergents.get(i).copied()),
        }
    }
}

/// Convergents `p_n / q_n`, `n = 1..`, of the continued fraction of `alpha`
/// in `(0, 1)`, starting with `1 / a_1`.
///
/// The expansion is that of the exact binary value of `alpha`, so it
/// terminates when `alpha` is hit exactly.
pub fn continued_fraction(alpha: f64, n_terms: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if !(alpha > 0.0 && alpha < 1.0) || n_terms == 0 {
        return out;
    }
    // alpha = num / den exactly, den a power of two
    let (mantissa, exponent, _) = alpha.integer_decode();
    let mut shift = -(exponent as i32);
    let mut num = mantissa as u128;
    while shift > 126 {
        num >>= 1;
        shift -= 1;
    }
    let den = 1u128 << shift;
    let (mut a, mut b) = (den, num);
    let (mut p_prev, mut p) = (1u128, 0u128);
    let (mut q_prev, mut q) = (0u128, 1u128);
    while b != 0 && out.len() < n_terms {
        let term = a / b;
        let r = a % b;
        let p_next = term * p + p_prev;
        let q_next = term * q + q_prev;
        if q_next > u64::MAX as u128 {
            break;
        }
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
        out.push((p as u64, q as u64));
        a = b;
        b = r;
    }
    out
}
