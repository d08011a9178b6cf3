//! Bracketing root finders.

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
/// Stops when the bracket is narrower than `xtol` or cannot shrink further.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Illinois-modified regula falsi with a bisection fallback.
///
/// Requires a sign change on `[a, b]`. Returns once `|f(x)| <= ftol` or the
/// bracket has collapsed to a few ulps.
pub fn illinois<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    ftol: f64,
) -> f64 {
    if fa.abs() <= ftol {
        return a;
    }
    if fb.abs() <= ftol {
        return b;
    }
    let mut side = 0i8;
    for iter in 0..200 {
        let width = (b - a).abs();
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return if fa.abs() < fb.abs() { a } else { b };
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        // every fourth step bisects so slow one-sided convergence cannot stall
        if !(x > a.min(b) && x < a.max(b)) || iter % 4 == 3 {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() <= ftol {
            return x;
        }
        if (fx > 0.0) == (fb > 0.0) {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}
