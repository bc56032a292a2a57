//! Locale-independent rendering of results as CSV and JSON.

use serde::Serialize;
use serde_json::Value;

use crate::analysis::DiscrepancyRecord;

pub const CSV_HEADER: &str = "x,A,vol_term,H1,H2,P,R";

/// `v` rounded to 15 significant digits.
pub fn round15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().expect("formatted float parses")
}

/// Shortest round-trip text of `v` after rounding to 15 significant digits.
pub fn fmt15(v: f64) -> String {
    format!("{}", round15(v))
}

pub fn records_to_csv(records: &[DiscrepancyRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let row = [fmt15(r.x), r.a.to_string(), fmt15(r.vol_term), fmt15(r.h1), fmt15(r.h2), fmt15(r.p), fmt15(r.r)];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round15(n.as_f64().unwrap());
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 15 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("valid json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round15(0.1 + 0.2), 0.3);
        assert_eq!(fmt15(1.48), "1.48");
        assert_eq!(fmt15(33.0), "33");
        assert_eq!(round15(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn csv_header_and_rows() {
        let r = DiscrepancyRecord::from_parts(2.0, 33, 10.5, 1.0, 0.5, 0.0);
        let csv = records_to_csv(&[r]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,A,vol_term,H1,H2,P,R"));
        assert_eq!(lines.next(), Some("2,33,10.5,1,0.5,22.5,21"));
    }
}
