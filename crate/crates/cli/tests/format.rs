use proptest::prelude::*;
use thermoform_cli::format_number;

fn significant_digits(s: &str) -> usize {
    let mantissa = s.split('e').next().unwrap();
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len().max(1)
}

proptest! {
    #[test]
    fn twelve_significant_digits_round_trip(x in prop::num::f64::NORMAL) {
        let s = format_number(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-12, "{} -> {}", x, s);
        if x.abs() >= 1.0 && x.abs() < 1e12 {
            prop_assert_eq!(significant_digits(&s), 12, "{}", s);
        }
    }
}
