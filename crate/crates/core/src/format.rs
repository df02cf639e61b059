//! Number formatting shared by the CSV writers.

/// Shortest representation that parses back to the same `f64`, switching to
/// exponent notation for very small or large magnitudes. Never more than 17
/// significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(fmt_f64(1.0), "1.0");
        assert_eq!(fmt_f64(-0.25), "-0.25");
        assert_eq!(fmt_f64(1e-20), "1e-20");
        assert_eq!(fmt_f64(0.1 + 0.2), "0.30000000000000004");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let digits = s
                .split(['e', 'E'])
                .next()
                .unwrap()
                .chars()
                .filter(|c| c.is_ascii_digit())
                .collect::<String>();
            prop_assert!(digits.trim_start_matches('0').len() <= 17);
        }
    }
}
