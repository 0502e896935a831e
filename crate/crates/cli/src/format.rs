//! Number formatting shared by every CSV and console writer.

/// Six significant digits, `%g` style: plain notation for moderate
/// magnitudes, exponent form otherwise, trailing zeros removed.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // round first so that 999999.5 moves to exponent form like printf does
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let exp_sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{exp_sign}{:02}", trim(mantissa), exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn matches_printf_g() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.0 / 3.0), "0.333333");
        assert_eq!(num(120.0), "120");
        assert_eq!(num(123456.7), "123457");
        assert_eq!(num(1234567.0), "1.23457e+06");
        assert_eq!(num(999999.5), "1e+06");
        assert_eq!(num(0.0001234567), "0.000123457");
        assert_eq!(num(0.00001234567), "1.23457e-05");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(f64::NAN), "nan");
    }
}
