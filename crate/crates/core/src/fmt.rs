//! Fixed float formatting for result CSVs.

/// Format `x` with six significant digits, without exponent and without
/// trailing zeros. Non-finite values become `NaN`, `inf` or `-inf`.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Shortest representation that parses back to the same `f64`.
pub fn exact(x: f64) -> String {
    format!("{x}")
}

pub fn sig6_opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(57.615), "57.615");
        assert_eq!(sig6(0.707596253902185), "0.707596");
        assert_eq!(sig6(123456.789), "123457");
        assert_eq!(sig6(12.0), "12");
        assert_eq!(sig6(-0.000012345678), "-0.0000123457");
        assert_eq!(sig6(-0.0), "0");
    }

    #[test]
    fn sig6_is_idempotent_through_parse() {
        for x in [1.0 / 3.0, 2.0 / 7.0 * 1e5, 9.999995, 0.1 + 0.2, 1234.5678] {
            let once = sig6(x);
            let twice = sig6(once.parse().unwrap());
            assert_eq!(once, twice);
        }
    }
}
