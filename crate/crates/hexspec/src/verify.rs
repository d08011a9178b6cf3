//! The invariant suite behind `hexspec verify`.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use hexspec_core::dynamics::{acceleration, floquet_exponent, lyapunov, CocycleConfig};
use hexspec_core::flux::gcd;
use hexspec_core::graph::{butterfly_fluxes, GraphContext};
use hexspec_core::jacobi::{build_mq, chambers_gq, chambers_gq_at, rational_spectrum, trace_dq};
use hexspec_core::linalg::{determinant, CMatrix};
use hexspec_core::loops::{double_hexagon_state, rank_t_phi, verify_vertex_conditions, LoopSpec};
use hexspec_core::qlambda::{q_norm_bound, q_spectrum};
use hexspec_core::{Flux, HillSolver, PotentialSpec, Result};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<44} {} [{:.2}s]", self.name, self.detail, self.seconds)
    }
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("hill/free-discriminant", free_discriminant),
    ("hill/wronskian", wronskian),
    ("hill/free-bands", free_bands),
    ("hill/dirichlet-at-band-edges", dirichlet_at_edges),
    ("jacobi/half-flux-spectrum", half_flux),
    ("jacobi/det-equals-trace", det_equals_trace),
    ("jacobi/chambers-phase-independence", chambers_independence),
    ("jacobi+q/measure-bounds-q<=50", measure_bounds),
    ("q/norm-gap", norm_gap),
    ("graph/dirac-points-and-dirichlet-lines", dirac_points),
    ("graph/local-symmetry", local_symmetry),
    ("loops/rank-dichotomy", rank_dichotomy),
    ("loops/alternating-phase-sum", alternating_sum),
    ("loops/double-hexagon-states", double_hexagon_states),
    ("dynamics/floquet-cross-check", floquet_cross_check),
    ("dynamics/off-spectrum-hyperbolicity", off_spectrum),
    ("dynamics/acceleration-quantized", acceleration_quantized),
    ("dynamics/golden-measures-decrease", golden_measures),
];

/// Runs every check, in parallel, and returns the results in a fixed order.
pub fn run_suite() -> Vec<CheckResult> {
    CHECKS
        .par_iter()
        .map(|&(name, check)| {
            let t = Instant::now();
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name,
                passed,
                detail,
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn free() -> Result<HillSolver> {
    HillSolver::with_default_steps(&PotentialSpec::Zero)
}

fn mathieu() -> Result<HillSolver> {
    HillSolver::with_default_steps(&PotentialSpec::Mathieu { amplitude: 20.0 })
}

fn max_by<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    let mut m = 0.0f64;
    for x in items {
        m = m.max(f(x)?);
    }
    Ok(m)
}

fn free_discriminant() -> Result<(bool, String)> {
    let s = free()?;
    let err = max_by(0..200, |i| {
        let l = 100.0 * i as f64 / 199.0;
        Ok((s.discriminant(l)? - l.sqrt().cos()).abs())
    })?;
    Ok((err <= 1e-8, format!("max |Delta - cos sqrt(lambda)| = {err:.2e}")))
}

fn wronskian() -> Result<(bool, String)> {
    let s = mathieu()?;
    let err = max_by(0..50, |i| {
        let l = -20.0 + 6.0 * i as f64;
        Ok((s.monodromy(l)?.wronskian() - 1.0).abs())
    })?;
    Ok((err <= 1e-9, format!("max |W - 1| = {err:.2e}")))
}

fn free_bands() -> Result<(bool, String)> {
    let bands = free()?.first_bands(5)?;
    let err = bands
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let (lo, hi) = ((PI * k as f64).powi(2), (PI * (k + 1) as f64).powi(2));
            (b.alpha - lo).abs().max((b.beta - hi).abs())
        })
        .fold(0.0, f64::max);
    Ok((bands.len() == 5 && err <= 1e-8, format!("max endpoint error {err:.2e}")))
}

fn dirichlet_at_edges() -> Result<(bool, String)> {
    let s = mathieu()?;
    let ev = s.first_dirichlet_eigenvalues(5)?;
    let err = max_by(ev.iter().copied(), |l| Ok((s.discriminant(l)?.abs() - 1.0).abs()))?;
    Ok((err <= 1e-8, format!("max ||Delta| - 1| = {err:.2e} over 5 eigenvalues")))
}

fn half_flux() -> Result<(bool, String)> {
    let sigma = rational_spectrum(1, 2)?;
    let err = (sigma.min().unwrap_or(f64::NAN) + 3.0)
        .abs()
        .max((sigma.max().unwrap_or(f64::NAN) - 3.0).abs());
    let gap_free = sigma.merged(1e-12).len() == 1;
    let qs = q_spectrum(&sigma)?;
    let (s1, s2) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());
    let expected = [(-s2, -s1), (-s1, 0.0), (0.0, s1), (s1, s2)];
    let q_err = if qs.bands.len() == 4 {
        qs.bands
            .iter()
            .zip(expected)
            .map(|(b, (lo, hi))| (b.lo - lo).abs().max((b.hi - hi).abs()))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok((
        err <= 1e-10 && gap_free && q_err <= 1e-10,
        format!("endpoint error {err:.2e}, Q endpoint error {q_err:.2e}"),
    ))
}

fn det_equals_trace() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (p, q) in [(1u64, 2u64), (1, 3), (2, 5), (3, 7), (5, 13), (8, 21)] {
        for k in 0..q.min(4) {
            let theta = 0.5 + k as f64 / q as f64;
            let m = build_mq(theta, p, q)?;
            for lambda in [-3.7, -0.4, 1.3, 4.9] {
                let n = q as usize;
                let det = determinant(CMatrix::identity(n, n) * Complex64::new(lambda, 0.0) - &m);
                let tr = trace_dq(lambda, theta, p, q);
                worst = worst.max(((det.re - tr).abs() + det.im.abs()) / tr.abs().max(1.0));
            }
        }
    }
    Ok((worst <= 1e-8, format!("max relative deviation {worst:.2e}")))
}

fn chambers_independence() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (p, q) in [(1u64, 3u64), (2, 7), (5, 12), (7, 19)] {
        for lambda in [-2.9, 0.1, 2.2, 5.5] {
            let g0 = chambers_gq(lambda, p, q);
            for k in 0..16 {
                let g = chambers_gq_at(lambda, p, q, 0.0173 + k as f64 / 16.0);
                worst = worst.max((g - g0).abs() / g0.abs().max(1.0));
            }
        }
    }
    Ok((worst <= 1e-8, format!("max relative spread {worst:.2e}")))
}

fn measure_bounds() -> Result<(bool, String)> {
    let fluxes = butterfly_fluxes(50);
    let results: Vec<Result<(bool, bool, bool)>> = fluxes
        .par_iter()
        .map(|&(p, q)| {
            let sigma = rational_spectrum(p, q)?;
            let qs = q_spectrum(&sigma)?;
            let qf = q as f64;
            let jac = sigma.measure() < 16.0 * PI / (3.0 * qf);
            let qb = qs.measure() <= 8.0 * (6.0 * PI).sqrt() / (9.0 * qf.sqrt());
            let sym = qs.bands.contains(0.0, 0.0) && qs.symmetry_defect() <= 1e-12;
            Ok((jac, qb, sym))
        })
        .collect();
    let (mut jac, mut qb, mut sym) = (0, 0, 0);
    for r in results {
        let (a, b, c) = r?;
        jac += usize::from(!a);
        qb += usize::from(!b);
        sym += usize::from(!c);
    }
    Ok((
        jac + qb + sym == 0,
        format!(
            "{} fluxes; violations: Jacobi {jac}, Q {qb}, symmetry/zero {sym}",
            fluxes.len()
        ),
    ))
}

fn norm_gap() -> Result<(bool, String)> {
    let worst = (1..40)
        .map(|k| q_norm_bound(2.0 * PI * k as f64 / 40.0))
        .fold(0.0, f64::max);
    Ok((worst < 1.0, format!("max bound {worst:.6}")))
}

fn dirac_points() -> Result<(bool, String)> {
    let ctx = GraphContext::new(free()?, 5)?;
    let dirac = ctx.dirac_points().to_vec();
    let mut missing = 0;
    let fluxes: Vec<(u64, u64)> = butterfly_fluxes(12).into_iter().filter(|&(_, q)| q > 0).collect();
    for &(p, q) in &fluxes {
        let rows = ctx.column(p, q)?;
        for (i, &d) in dirac.iter().enumerate() {
            let hit = rows
                .iter()
                .any(|r| r.hill_band == i + 1 && r.lo - 1e-9 <= d && d <= r.hi + 1e-9);
            missing += usize::from(!hit);
        }
    }
    let lines = ctx.dirichlet_eigenvalues();
    let line_err = lines
        .iter()
        .take(5)
        .enumerate()
        .map(|(k, l)| (l - (PI * (k + 1) as f64).powi(2)).abs())
        .fold(0.0, f64::max);
    Ok((
        missing == 0 && line_err <= 1e-8,
        format!("{} columns, {missing} missing Dirac points, Dirichlet line error {line_err:.2e}", fluxes.len()),
    ))
}

fn local_symmetry() -> Result<(bool, String)> {
    let ctx = GraphContext::new(mathieu()?, 3)?;
    let mut worst = 0.0f64;
    for (p, q) in [(1u64, 2u64), (1, 3), (2, 5), (3, 8), (4, 11)] {
        for index in 1..=3 {
            worst = worst.max(ctx.local_symmetry_check(p, q, index)?.max_defect);
        }
    }
    Ok((worst <= 1e-10, format!("max defect of Delta image {worst:.2e}")))
}

fn rank_dichotomy() -> Result<(bool, String)> {
    let lp = LoopSpec::double_hexagon((0, 0));
    let bad = (0..100)
        .filter(|&k| {
            let phi = 2.0 * PI * k as f64 / 100.0;
            let expected = if k % 50 == 0 { 9 } else { 10 };
            rank_t_phi(&lp, phi) != expected
        })
        .count();
    Ok((bad == 0, format!("{bad} of 100 grid points off the dichotomy")))
}

fn alternating_sum() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for q in 1..=6 {
        for g1 in -3..=3 {
            let lp = LoopSpec::hexagon_strip((g1, 2), q)?;
            for phi in [0.37, 1.9, -2.4] {
                let d = (lp.alternating_phase_sum(phi) - q as f64 * phi).rem_euclid(2.0 * PI);
                worst = worst.max(d.min(2.0 * PI - d));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max deviation from q Phi mod 2 pi {worst:.2e}")))
}

fn double_hexagon_states() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for solver in [free()?, mathieu()?] {
        for lambda in solver.first_dirichlet_eigenvalues(3)? {
            for phi in [0.0, PI / 2.0, PI] {
                let s = double_hexagon_state(&solver, phi, lambda, (0, 0))?;
                worst = worst.max(verify_vertex_conditions(&solver, &s, phi)?.max_violation());
                count += 1;
            }
        }
    }
    Ok((worst <= 1e-10, format!("{count} states, max violation {worst:.2e}")))
}

fn floquet_cross_check() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (p, q) in [(0u64, 1u64), (1, 2), (1, 3)] {
        let config = CocycleConfig::new(&Flux::rational(p, q)?)
            .with_max_n(1 << 12)
            .with_tolerance(1e-4);
        for lambda in [-4.0, 0.0, 1.5, 7.0] {
            let l = lyapunov(lambda, &config)?.value;
            worst = worst.max((l - floquet_exponent(lambda, p, q, 1 << 14)).abs());
        }
    }
    Ok((worst < 5e-3, format!("max |L - Floquet| {worst:.2e}")))
}

fn off_spectrum() -> Result<(bool, String)> {
    let config = CocycleConfig::new(&Flux::golden()).with_max_n(1 << 12);
    let l = lyapunov(10.0, &config)?;
    Ok((l.value > 0.2, format!("L(10) = {:.4}", l.value)))
}

fn acceleration_quantized() -> Result<(bool, String)> {
    let config = CocycleConfig::new(&Flux::golden()).with_max_n(1 << 12);
    let a = acceleration(0.0, 2.0, &config)?;
    let b = acceleration(0.0, -2.0, &config)?;
    Ok((
        (a.value - 1.0).abs() <= 0.02 && (b.value + 1.0).abs() <= 0.02,
        format!("omega(2) = {:.4}, omega(-2) = {:.4}", a.value, b.value),
    ))
}

fn golden_measures() -> Result<(bool, String)> {
    let g = Flux::golden();
    let mut prev = f64::INFINITY;
    let mut ok = true;
    let mut last = (0, 0.0);
    for n in 1..=10 {
        let (p, q) = g.convergent(n).unwrap_or((0, 1));
        ok &= gcd(p, q) == 1;
        let m = rational_spectrum(p, q)?.measure();
        ok &= m < prev;
        prev = m;
        last = (q, m);
    }
    Ok((ok, format!("measure at q = {} is {:.4}", last.0, last.1)))
}
