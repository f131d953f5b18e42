//! Locale-free number formatting for CSV output.

/// Rounds half away from zero at `dp` decimals and formats with exactly `dp`
/// digits. Ties are detected on the decimal value, not the binary one, so
/// `0.12345` becomes `0.1235`. Negative zero prints as `0`.
pub fn round_half_up(x: f64, dp: usize) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let scale = 10f64.powi(dp as i32);
    let scaled = x.abs() * scale;
    // values a few ulps below a tie are decimal ties stored inexactly
    let nudge = scaled * 4.0 * f64::EPSILON;
    let mut r = (scaled + 0.5 + nudge).floor() / scale;
    if x < 0.0 && r != 0.0 {
        r = -r;
    }
    format!("{:.*}", dp, r)
}

/// Table cells: four decimals.
pub fn cell(x: f64) -> String {
    round_half_up(x, 4)
}

/// Shortest round-trip representation, empty for non-finite values.
pub fn exact(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

/// Parses `AxB` into two positive counts.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid {s:?} is not of the form AxB"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("grid {s:?}: {t:?} is not a positive integer"))
    };
    Ok((parse(a)?, parse(b)?))
}
