//! Edge ODE `-psi'' + V psi = lambda psi` on `(0, 1)`: monodromy matrix,
//! Floquet discriminant, Hill bands and the Dirichlet spectrum.
//!
//! All evaluations go through [`HillSolver`], which caches the potential on
//! the integration grid so repeated energy evaluations only pay for the
//! fixed-step RK4 sweep.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::roots::{bisect, illinois};

pub const DEFAULT_STEPS: usize = 4096;
pub const MIN_STEPS: usize = 64;

/// Spacing of the coarse energy scan used to bracket band edges and roots.
pub const DEFAULT_SCAN_STEP: f64 = 0.25;

/// Absolute tolerance for band-edge and Dirichlet bisection.
pub const EDGE_TOLERANCE: f64 = 1e-12;

/// A critical point of the discriminant with `|Delta| <= 1 + CLOSED_GAP_TOLERANCE`
/// is treated as a closed gap.
pub const CLOSED_GAP_TOLERANCE: f64 = 1e-9;

/// Target residual `|Delta(lambda) - w|` of [`HillSolver::invert_on_band`].
pub const INVERSION_TOLERANCE: f64 = 1e-13;

/// Fundamental solutions at `t = 1` for one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromySolution {
    pub lambda: f64,
    pub c1: f64,
    pub c1p: f64,
    pub s1: f64,
    pub s1p: f64,
    /// Floquet discriminant, `s'_lambda(1)`.
    pub delta: f64,
    /// Largest deviation between the `steps` and `2 * steps` integrations.
    pub error_estimate: f64,
}

impl MonodromySolution {
    pub fn wronskian(&self) -> f64 {
        self.c1 * self.s1p - self.c1p * self.s1
    }

    /// Half trace of the monodromy matrix; equals `delta` for even potentials.
    pub fn half_trace(&self) -> f64 {
        0.5 * (self.c1 + self.s1p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// The closed interval `[alpha, beta]` of the `index`-th Hill band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillBand {
    pub index: usize,
    pub alpha: f64,
    pub beta: f64,
    pub monotonicity: Monotonicity,
}

impl HillBand {
    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.alpha && lambda <= self.beta
    }

    /// The band edge where `|Delta| = 1` takes the value `w`, if `|w| = 1`.
    /// Closed gaps make `Delta -+ 1` vanish quadratically there, so these
    /// levels are not left to the root finder.
    fn edge_at_level(&self, w: f64) -> Option<f64> {
        if w == self.delta_at_alpha() {
            Some(self.alpha)
        } else if w == -self.delta_at_alpha() {
            Some(self.beta)
        } else {
            None
        }
    }

    /// Value of the discriminant at `alpha`: `+1` on odd bands, `-1` on even ones.
    fn delta_at_alpha(&self) -> f64 {
        match self.monotonicity {
            Monotonicity::Decreasing => 1.0,
            Monotonicity::Increasing => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HillSolver {
    potential: PotentialSpec,
    steps: usize,
    scan_step: f64,
    // V sampled at t = k / (4 steps), k = 0..=4 steps; covers the midpoints of
    // both the base grid and the doubled grid
    v_fine: Vec<f64>,
}

impl HillSolver {
    pub fn new(potential: &PotentialSpec, steps: usize) -> Result<Self> {
        if steps < MIN_STEPS {
            return Err(Error::Domain("integration needs at least 64 steps"));
        }
        let fine = 4 * steps;
        let v_fine = (0..=fine)
            .map(|k| potential.value(k as f64 / fine as f64))
            .collect();
        Ok(Self {
            potential: potential.clone(),
            steps,
            scan_step: DEFAULT_SCAN_STEP,
            v_fine,
        })
    }

    pub fn with_default_steps(potential: &PotentialSpec) -> Result<Self> {
        Self::new(potential, DEFAULT_STEPS)
    }

    pub fn with_scan_step(mut self, step: f64) -> Self {
        assert!(step > 0.0 && step.is_finite());
        self.scan_step = step;
        self
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// RK4 sweep of `y'' = (V - lambda) y` for `n` initial vectors at once.
    /// `stride` selects the grid: 2 for `steps` steps, 1 for `2 * steps`.
    fn sweep<const N: usize>(&self, lambda: f64, stride: usize, init: [[f64; 2]; N]) -> [[f64; 2]; N] {
        let n_steps = 2 * self.steps / stride;
        let h = 1.0 / n_steps as f64;
        let half = 0.5 * h;
        let mut st = init;
        for k in 0..n_steps {
            let base = 2 * stride * k;
            let q0 = self.v_fine[base] - lambda;
            let qm = self.v_fine[base + stride] - lambda;
            let q1 = self.v_fine[base + 2 * stride] - lambda;
            for s in st.iter_mut() {
                let [y, z] = *s;
                let (k1y, k1z) = (z, q0 * y);
                let (k2y, k2z) = (z + half * k1z, qm * (y + half * k1y));
                let (k3y, k3z) = (z + half * k2z, qm * (y + half * k2y));
                let (k4y, k4z) = (z + h * k3z, q1 * (y + h * k3y));
                s[0] = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
                s[1] = z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            }
        }
        st
    }

    fn fundamental(&self, lambda: f64, stride: usize) -> Result<[f64; 4]> {
        let [c, s] = self.sweep(lambda, stride, [[1.0, 0.0], [0.0, 1.0]]);
        let out = [c[0], c[1], s[0], s[1]];
        if out.iter().all(|x| x.is_finite()) {
            Ok(out)
        } else {
            Err(Error::IntegrationFailure { lambda })
        }
    }

    /// Monodromy data at `lambda` with a step-doubling error estimate.
    pub fn monodromy(&self, lambda: f64) -> Result<MonodromySolution> {
        let coarse = self.fundamental(lambda, 2)?;
        let fine = self.fundamental(lambda, 1)?;
        let error_estimate = coarse
            .iter()
            .zip(fine.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let [c1, c1p, s1, s1p] = coarse;
        Ok(MonodromySolution {
            lambda,
            c1,
            c1p,
            s1,
            s1p,
            delta: s1p,
            error_estimate,
        })
    }

    /// `(s_lambda(1), s'_lambda(1))` from a single sweep.
    pub fn sine_endpoint(&self, lambda: f64) -> Result<(f64, f64)> {
        let [s] = self.sweep(lambda, 2, [[0.0, 1.0]]);
        if s[0].is_finite() && s[1].is_finite() {
            Ok((s[0], s[1]))
        } else {
            Err(Error::IntegrationFailure { lambda })
        }
    }

    pub fn discriminant(&self, lambda: f64) -> Result<f64> {
        self.sine_endpoint(lambda).map(|(_, d)| d)
    }

    /// `(Delta(lambda), dDelta/dlambda)` via the variational equation
    /// `(d/dlambda s)'' = (V - lambda) d/dlambda s - s`.
    pub fn discriminant_with_derivative(&self, lambda: f64) -> Result<(f64, f64)> {
        let n_steps = self.steps;
        let h = 1.0 / n_steps as f64;
        let half = 0.5 * h;
        let (mut y, mut z, mut u, mut w) = (0.0, 1.0, 0.0, 0.0);
        for k in 0..n_steps {
            let base = 4 * k;
            let q0 = self.v_fine[base] - lambda;
            let qm = self.v_fine[base + 2] - lambda;
            let q1 = self.v_fine[base + 4] - lambda;
            let f = |q: f64, y: f64, z: f64, u: f64, w: f64| (z, q * y, w, q * u - y);
            let k1 = f(q0, y, z, u, w);
            let k2 = f(qm, y + half * k1.0, z + half * k1.1, u + half * k1.2, w + half * k1.3);
            let k3 = f(qm, y + half * k2.0, z + half * k2.1, u + half * k2.2, w + half * k2.3);
            let k4 = f(q1, y + h * k3.0, z + h * k3.1, u + h * k3.2, w + h * k3.3);
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            z += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            u += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
            w += h / 6.0 * (k1.3 + 2.0 * k2.3 + 2.0 * k3.3 + k4.3);
        }
        if z.is_finite() && w.is_finite() {
            Ok((z, w))
        } else {
            Err(Error::IntegrationFailure { lambda })
        }
    }

    fn scan_start(&self) -> f64 {
        self.potential.min_value() - 1.0
    }

    /// Critical points of the discriminant in `(start, end)`, refined by
    /// bisection on its derivative.
    fn critical_points(&self, start: f64, end: f64) -> Result<Vec<f64>> {
        let n = ((end - start) / self.scan_step).ceil().max(1.0) as usize;
        let mut out = Vec::new();
        let mut prev = (start, self.discriminant_with_derivative(start)?.1);
        for i in 1..=n {
            let x = start + (end - start) * i as f64 / n as f64;
            let d = self.discriminant_with_derivative(x)?.1;
            if (d > 0.0) != (prev.1 > 0.0) {
                let mut failure = None;
                let c = bisect(
                    |l| match self.discriminant_with_derivative(l) {
                        Ok((_, dd)) => dd,
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    },
                    prev.0,
                    x,
                    EDGE_TOLERANCE,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                out.push(c);
            }
            prev = (x, d);
        }
        Ok(out)
    }

    fn solve_level(&self, a: f64, b: f64, level: f64) -> Result<f64> {
        let mut failure = None;
        let r = bisect(
            |l| match self.discriminant(l) {
                Ok(d) => d - level,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            a,
            b,
            EDGE_TOLERANCE,
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }

    /// All Hill bands with `beta <= lambda_max`.
    pub fn hill_bands(&self, lambda_max: f64) -> Result<Vec<HillBand>> {
        let start = self.scan_start();
        if lambda_max <= start {
            return Ok(Vec::new());
        }
        // scan a little past lambda_max so a band ending exactly there is resolved
        let end = lambda_max + 2.0 * self.scan_step;
        let crit = self.critical_points(start, end)?;

        let mut bands = Vec::new();
        let mut seg_lo = start;
        let mut closed_lo = false;
        for (n, seg_hi) in crit.iter().copied().chain(core::iter::once(end)).enumerate() {
            let index = n + 1;
            let monotonicity = if index % 2 == 1 {
                Monotonicity::Decreasing
            } else {
                Monotonicity::Increasing
            };
            let s = if index % 2 == 1 { 1.0 } else { -1.0 };
            let d_hi = self.discriminant(seg_hi)?;
            let is_last = seg_hi == end;
            let closed_hi = !is_last && (d_hi.abs() - 1.0) <= CLOSED_GAP_TOLERANCE;
            if !is_last && d_hi.abs() < 1.0 - 1e-6 {
                return Err(Error::Consistency {
                    what: "discriminant extremum inside a band",
                    deviation: 1.0 - d_hi.abs(),
                });
            }
            let alpha = if closed_lo {
                seg_lo
            } else {
                self.solve_level(seg_lo, seg_hi, s)?
            };
            let beta = if closed_hi {
                seg_hi
            } else if is_last && (d_hi + s) * s > 0.0 {
                // the band is not finished inside the scanned window
                break;
            } else {
                self.solve_level(seg_lo, seg_hi, -s)?
            };
            if beta > lambda_max + 1e-9 * lambda_max.abs().max(1.0) {
                break;
            }
            bands.push(HillBand {
                index,
                alpha,
                beta,
                monotonicity,
            });
            seg_lo = seg_hi;
            closed_lo = closed_hi;
        }
        Ok(bands)
    }

    /// The first `count` Hill bands.
    pub fn first_bands(&self, count: usize) -> Result<Vec<HillBand>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let pi = core::f64::consts::PI;
        let mut lambda_max =
            self.potential.max_value() + (pi * count as f64).powi(2) + 10.0;
        loop {
            let mut bands = self.hill_bands(lambda_max)?;
            if bands.len() >= count {
                bands.truncate(count);
                return Ok(bands);
            }
            lambda_max *= 1.5;
        }
    }

    /// The first `count` Dirichlet eigenvalues.
    pub fn first_dirichlet_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let pi = core::f64::consts::PI;
        let mut lambda_max =
            self.potential.max_value() + (pi * count as f64).powi(2) + 10.0;
        loop {
            let mut ev = self.dirichlet_eigenvalues(lambda_max)?;
            if ev.len() >= count {
                ev.truncate(count);
                return Ok(ev);
            }
            lambda_max *= 1.5;
        }
    }

    /// Roots of `s_lambda(1)` below `lambda_max`.
    pub fn dirichlet_eigenvalues(&self, lambda_max: f64) -> Result<Vec<f64>> {
        let start = self.potential.min_value();
        if lambda_max <= start {
            return Ok(Vec::new());
        }
        let end = lambda_max + 2.0 * self.scan_step;
        let n = ((end - start) / self.scan_step).ceil().max(1.0) as usize;
        let mut out = Vec::new();
        let mut prev = (start, self.sine_endpoint(start)?.0);
        for i in 1..=n {
            let x = start + (end - start) * i as f64 / n as f64;
            let s = self.sine_endpoint(x)?.0;
            if (s > 0.0) != (prev.1 > 0.0) {
                let mut failure = None;
                let root = bisect(
                    |l| match self.sine_endpoint(l) {
                        Ok((s1, _)) => s1,
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    },
                    prev.0,
                    x,
                    EDGE_TOLERANCE,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                if root <= lambda_max + 1e-9 * lambda_max.abs().max(1.0) {
                    out.push(root);
                }
            }
            prev = (x, s);
        }
        Ok(out)
    }

    /// The unique `lambda` in `band` with `Delta(lambda) = w`.
    pub fn invert_on_band(&self, band: &HillBand, w: f64) -> Result<f64> {
        if !(w.abs() <= 1.0) {
            return Err(Error::Domain("discriminant level must lie in [-1, 1]"));
        }
        if let Some(edge) = band.edge_at_level(w) {
            return Ok(edge);
        }
        let fa = self.discriminant(band.alpha)? - w;
        let fb = self.discriminant(band.beta)? - w;
        self.invert_bracketed(band, w, band.alpha, band.beta, fa, fb)
    }

    fn invert_bracketed(
        &self,
        band: &HillBand,
        w: f64,
        a: f64,
        b: f64,
        fa: f64,
        fb: f64,
    ) -> Result<f64> {
        // the endpoints carry |Delta| = 1 only up to integration accuracy
        if (fa > 0.0) == (fb > 0.0) {
            let target_at_alpha = (w - band.delta_at_alpha()).abs() <= (w + band.delta_at_alpha()).abs();
            return Ok(if target_at_alpha { a } else { b });
        }
        let mut failure = None;
        let x = illinois(
            |l| match self.discriminant(l) {
                Ok(d) => d - w,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            a,
            b,
            fa,
            fb,
            INVERSION_TOLERANCE,
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(x),
        }
    }

    /// Zero of the discriminant inside `band`.
    pub fn dirac_point(&self, band: &HillBand) -> Result<f64> {
        self.invert_on_band(band, 0.0)
    }

    /// Tabulates the discriminant and its derivative over `band` so that
    /// repeated inversions start from an interpolated guess.
    pub fn band_table(&self, band: HillBand, nodes: usize) -> Result<BandTable> {
        let nodes = nodes.max(2);
        let mut lambdas = Vec::with_capacity(nodes + 1);
        let mut deltas = Vec::with_capacity(nodes + 1);
        let mut slopes = Vec::with_capacity(nodes + 1);
        for i in 0..=nodes {
            let l = band.alpha + band.width() * i as f64 / nodes as f64;
            let (d, dd) = self.discriminant_with_derivative(l)?;
            lambdas.push(l);
            deltas.push(d);
            slopes.push(dd);
        }
        Ok(BandTable {
            band,
            lambdas,
            deltas,
            slopes,
        })
    }

    /// Same as [`HillSolver::invert_on_band`], started from the cubic
    /// Hermite interpolant of `table` and polished by secant steps.
    pub fn invert_tabulated(&self, table: &BandTable, w: f64) -> Result<f64> {
        if !(w.abs() <= 1.0) {
            return Err(Error::Domain("discriminant level must lie in [-1, 1]"));
        }
        if let Some(edge) = table.band.edge_at_level(w) {
            return Ok(edge);
        }
        let decreasing = table.band.monotonicity == Monotonicity::Decreasing;
        // first node where the table has passed w
        let passed = |d: f64| if decreasing { d <= w } else { d >= w };
        let (i, j) = match table.deltas.iter().position(|&d| passed(d)) {
            Some(0) => (0, 1),
            Some(k) => (k - 1, k),
            None => (table.deltas.len() - 2, table.deltas.len() - 1),
        };
        let (a, b) = (table.lambdas[i], table.lambdas[j]);
        let (fa, fb) = (table.deltas[i] - w, table.deltas[j] - w);
        if fa == 0.0 {
            return Ok(a);
        }
        if fb == 0.0 {
            return Ok(b);
        }
        if (fa > 0.0) == (fb > 0.0) {
            return self.invert_bracketed(&table.band, w, a, b, fa, fb);
        }
        let (x0, slope) = table.hermite_root(i, w);
        match self.secant_polish(w, a, b, fa, x0, slope)? {
            Some(x) => Ok(x),
            None => self.invert_bracketed(&table.band, w, a, b, fa, fb),
        }
    }

    /// Secant iteration from `x0` kept inside the bracket `[a, b]`; `None`
    /// when it leaves the bracket or stalls.
    fn secant_polish(
        &self,
        w: f64,
        a: f64,
        b: f64,
        fa: f64,
        x0: f64,
        slope: f64,
    ) -> Result<Option<f64>> {
        let inside = |x: f64| x > a.min(b) && x < a.max(b);
        if !inside(x0) {
            return Ok(None);
        }
        let mut x_prev = x0;
        let mut f_prev = self.discriminant(x0)? - w;
        if f_prev.abs() <= INVERSION_TOLERANCE {
            return Ok(Some(x0));
        }
        let mut x = if slope != 0.0 { x0 - f_prev / slope } else { f64::NAN };
        if !inside(x) {
            x = if (f_prev > 0.0) == (fa > 0.0) { 0.5 * (x0 + b) } else { 0.5 * (a + x0) };
        }
        for _ in 0..12 {
            let f = self.discriminant(x)? - w;
            if f.abs() <= INVERSION_TOLERANCE {
                return Ok(Some(x));
            }
            if f == f_prev {
                break;
            }
            let next = x - f * (x - x_prev) / (f - f_prev);
            if !inside(next) {
                break;
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(Some(next));
            }
            (x_prev, f_prev, x) = (x, f, next);
        }
        Ok(None)
    }
}

/// Discriminant samples over one Hill band.
#[derive(Debug, Clone)]
pub struct BandTable {
    band: HillBand,
    lambdas: Vec<f64>,
    deltas: Vec<f64>,
    slopes: Vec<f64>,
}

impl BandTable {
    pub fn band(&self) -> &HillBand {
        &self.band
    }

    /// Root of the cubic Hermite interpolant minus `w` on cell `i`, found by
    /// bisection on the polynomial, and the interpolant's slope there.
    fn hermite_root(&self, i: usize, w: f64) -> (f64, f64) {
        let (x0, x1) = (self.lambdas[i], self.lambdas[i + 1]);
        let h = x1 - x0;
        let (y0, y1) = (self.deltas[i] - w, self.deltas[i + 1] - w);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let p = |t: f64| {
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
        };
        let dp = |t: f64| {
            let t2 = t * t;
            (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * m1
        };
        let t = bisect(p, 0.0, 1.0, 1e-15);
        (x0 + t * h, dp(t) / h)
    }
}

/// Monodromy data with step-doubling error control.
pub fn integrate_monodromy(v: &PotentialSpec, lambda: f64, steps: usize) -> Result<MonodromySolution> {
    HillSolver::new(v, steps)?.monodromy(lambda)
}

pub fn discriminant(v: &PotentialSpec, lambda: f64) -> Result<f64> {
    HillSolver::with_default_steps(v)?.discriminant(lambda)
}

pub fn hill_bands(v: &PotentialSpec, lambda_max: f64) -> Result<Vec<HillBand>> {
    HillSolver::with_default_steps(v)?.hill_bands(lambda_max)
}

pub fn dirichlet_eigenvalues(v: &PotentialSpec, lambda_max: f64) -> Result<Vec<f64>> {
    HillSolver::with_default_steps(v)?.dirichlet_eigenvalues(lambda_max)
}

pub fn invert_discriminant_on_band(v: &PotentialSpec, band: &HillBand, w: f64) -> Result<f64> {
    HillSolver::with_default_steps(v)?.invert_on_band(band, w)
}
