/// Plain decimal with 15 significant digits; scientific notation outside
/// `[1e-4, 1e15)`.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs();
    if !(1e-4..1e15).contains(&mag) {
        return format!("{x:.14e}");
    }
    // Exponent after rounding, so 0.99999999999999989 counts as 1.
    let sci = format!("{mag:.14e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (14 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig15).unwrap_or_default()
}

/// Joins fields into a CSV line; fields never contain commas or quotes.
pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

pub fn json_string<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(2.0), "2.00000000000000");
        assert_eq!(sig15(1.6225562489182657), "1.62255624891827");
        assert_eq!(sig15(0.001), "0.00100000000000000");
        assert_eq!(sig15(1.5e-5), "1.50000000000000e-5");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(0.999_999_999_999_999_9), "1.00000000000000");
        assert_eq!(sig15(3e-17), "3.00000000000000e-17");
        assert_eq!(sig15(-0.5), "-0.500000000000000");
    }
}
