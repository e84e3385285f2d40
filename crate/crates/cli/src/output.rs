//! Serialization: CSV with 12 significant digits, JSON with shortest
//! round-trip numbers.

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Metric columns that follow the swept parameters in every CSV row.
pub const METRIC_COLUMNS: [&str; 5] = ["concurrence", "fef", "fef_oracle", "teleport_fidelity", "fidelity_to_bell"];

/// `x` with 12 significant digits; `inf`, `-inf` and `nan` for non-finite
/// values.
pub fn csv_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

/// Empty cell for a missing value.
pub fn csv_optional(x: Option<f64>) -> String {
    x.map(csv_number).unwrap_or_default()
}

/// Header plus rows, LF line endings.
pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(csv_number(1.0), "1.00000000000e0");
        assert_eq!(csv_number(2.0 / 3.0), "6.66666666667e-1");
        assert_eq!(csv_number(-5.493061443340548e-3), "-5.49306144334e-3");
        assert_eq!(csv_number(f64::INFINITY), "inf");
        assert_eq!(csv_optional(None), "");
    }

    #[test]
    fn table_layout() {
        let t = csv_table(&["a".into(), "b".into()], &[vec!["1".into(), "2".into()]]);
        assert_eq!(t, "a,b\n1,2\n");
    }
}
