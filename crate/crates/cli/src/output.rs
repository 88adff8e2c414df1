//! Formatting helpers shared by every subcommand: fixed six-decimal
//! numbers for CSV, matching rounded values for JSON.

/// Fixed six-decimal rendering, with negative zero normalized away.
pub fn fmt6(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.6}")
}

/// Rounds to six decimals so JSON output mirrors the CSV columns.
pub fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Scientific notation for residuals, which would underflow a fixed
/// six-decimal format.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Joins values with semicolons for multi-valued CSV cells.
pub fn join6(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt6(v))
        .collect::<Vec<_>>()
        .join(";")
}
