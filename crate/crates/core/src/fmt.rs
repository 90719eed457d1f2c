//! Text formatting shared by the CSV and JSON writers.

use num_complex::Complex64;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent notation outside `1e-4 ≤ |x| < 1e17`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    strip_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `re+imj` / `re-imj`, both parts through [`g17`].
pub fn complex(z: Complex64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    if im.is_sign_negative() {
        format!("{}-{}j", g17(re), g17(-im))
    } else {
        format!("{}+{}j", g17(re), g17(im))
    }
}

/// Serializes finite floats as numbers and `±inf`/`nan` as the strings
/// `"inf"`, `"-inf"`, `"nan"` (JSON has no non-finite numbers).
pub fn f64_or_tag<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&g17(*x))
    }
}

/// [`f64_or_tag`] for optional values.
pub fn opt_f64_or_tag<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => f64_or_tag(v, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-2.25), "-2.25");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(-0.0), "0");
        assert_eq!(g17(f64::INFINITY), "inf");
    }

    #[test]
    fn complex_format() {
        assert_eq!(complex(Complex64::new(1.0, 0.0)), "1+0j");
        assert_eq!(complex(Complex64::new(0.0, -0.0)), "0+0j");
        assert_eq!(complex(Complex64::new(0.25, -3.0)), "0.25-3j");
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -7.5e-300, 0.1 + 0.2] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
