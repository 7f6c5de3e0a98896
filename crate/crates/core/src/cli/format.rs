//! Number formatting and exact-value recognition.

/// Values printed with an exact annotation when a probability lands on one
/// of them.
fn known_values() -> [(f64, &'static str); 11] {
    let r2 = std::f64::consts::SQRT_2;
    [
        (1.0 / 12.0, "1/12"),
        (1.0 / 10.0, "1/10"),
        (1.0 / 6.0, "1/6"),
        (1.0 / 3.0, "1/3"),
        (1.0 / 2.0, "1/2"),
        (2.0 / 3.0, "2/3"),
        (3.0 / 4.0, "3/4"),
        (5.0 / 6.0, "5/6"),
        (9.0 / 10.0, "9/10"),
        (1.0 / (4.0 - 2.0 * r2), "1/(4-2√2)"),
        (1.0 / (4.0 + 2.0 * r2), "1/(4+2√2)"),
    ]
}

const SYMBOL_TOLERANCE: f64 = 1e-10;

pub fn symbolic(x: f64) -> Option<&'static str> {
    known_values()
        .into_iter()
        .find(|(v, _)| (x - v).abs() <= SYMBOL_TOLERANCE)
        .map(|(_, s)| s)
}

/// `x` rounded to `digits` significant digits, trailing zeros dropped.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    // round first so the exponent accounts for carries like 9.9999 → 10
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().expect("float");
    let exp = rounded.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        let s = format!("{:.*e}", digits - 1, rounded);
        let (m, e) = s.split_once('e').expect("exponent");
        return format!("{}e{}", trim_zeros(m), e);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{rounded:.decimals$}");
    let s = trim_zeros(&s);
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s.to_owned()
    }
}

/// JSON number rounded to `digits` significant digits.
pub fn json_number(x: f64, digits: usize) -> serde_json::Value {
    if !x.is_finite() {
        return serde_json::Value::Null;
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().expect("float");
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.0 / 12.0, 6), "0.0833333");
        assert_eq!(sig(0.75, 6), "0.75");
        assert_eq!(sig(0.75, 12), "0.75");
        assert_eq!(sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(sig(0.99999999, 6), "1");
        assert_eq!(sig(2.76e-4, 3), "0.000276");
        assert_eq!(sig(1.5e-9, 6), "1.5e-9");
        assert_eq!(sig(-1e-300, 6), "-1e-300");
        assert_eq!(sig(0.0, 6), "0");
        assert_eq!(sig(1234567.0, 3), "1230000");
    }

    #[test]
    fn json_numbers_round() {
        assert_eq!(json_number(1.0 / 12.0, 12).to_string(), "0.0833333333333");
        assert_eq!(json_number(0.75, 12).to_string(), "0.75");
        assert_eq!(json_number(f64::NAN, 12), serde_json::Value::Null);
    }

    #[test]
    fn recognizes_closed_set() {
        assert_eq!(symbolic(1.0 / 12.0), Some("1/12"));
        assert_eq!(symbolic(0.8535533905932737), Some("1/(4-2√2)"));
        assert_eq!(symbolic(0.1464466094067262), Some("1/(4+2√2)"));
        assert_eq!(symbolic(0.25), None);
        assert_eq!(symbolic(0.5 + 1e-6), None);
    }
}
