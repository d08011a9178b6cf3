//! Locale-free number formatting shared by every text artifact.

/// Formats like C's `%.15g`.
pub fn g15(x: f64) -> String {
    g(x, 15)
}

/// Formats like C's `%.{precision}g`.
pub fn g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let p = precision.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp >= -4 && exp < p as i32 {
        let fixed = format!("{:.*}", (p as i32 - 1 - exp) as usize, x);
        trim_zeros(&fixed).into()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (std::f64::consts::PI, "3.14159265358979"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (123456789012345.0, "123456789012345"),
            (1234567890123456.0, "1.23456789012346e+15"),
            (9.869604401089358, "9.86960440108936"),
            (1.0 / 3.0, "0.333333333333333"),
            (-1.5e300, "-1.5e+300"),
        ];
        for (x, s) in cases {
            assert_eq!(g15(x), s, "{x}");
        }
    }

    #[test]
    fn short_precision() {
        assert_eq!(g(0.000123456, 3), "0.000123");
        assert_eq!(g(99999.0, 3), "1e+05");
    }
}
