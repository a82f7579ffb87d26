//! Locale-independent number formatting for CSV output.

/// Significant digits written for every floating-point field.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with exactly [`SIGNIFICANT_DIGITS`] significant digits: positional for
/// decimal exponents in `[-5, 12)`, scientific otherwise.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", SIGNIFICANT_DIGITS - 1, 0.0);
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    // exponent after rounding, so 9.9999999999996 lands in the right decade
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(sig12(150.0), "150.000000000");
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(0.999377), "0.999377000000");
        assert_eq!(sig12(-1.5), "-1.50000000000");
        assert_eq!(sig12(0.0), "0.00000000000");
        assert_eq!(sig12(1e-7), "1.00000000000e-7");
        assert_eq!(sig12(2.5e15), "2.50000000000e15");
    }

    #[test]
    fn rounding_across_a_decade() {
        assert_eq!(sig12(0.99999999999996), "1.00000000000");
        assert_eq!(sig12(9.9999999999996), "10.0000000000");
    }

    #[test]
    fn non_finite() {
        assert_eq!(sig12(f64::NAN), "nan");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
    }
}
