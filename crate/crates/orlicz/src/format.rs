//! Number formatting and the CSV layouts of each report kind.
//!
//! Floats use the shortest representation that parses back to the same
//! value; infinities are written as `inf`/`-inf` (a JSON string). Every CSV
//! is rendered from the JSON report rows, so `report` reproduces the bytes
//! written by `run`.

use serde_json::{Map, Value};

use crate::error::CliError;

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn jnum(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(num(v)), Value::Number)
}

pub fn jopt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, jnum)
}

/// Inverse of [`jnum`].
pub fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// CSV column layout per report kind.
pub fn columns(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "norm-convergence" => &[
            "n",
            "p_minus",
            "p_plus",
            "norm",
            "sup_norm",
            "gap",
            "embedding_constant",
        ],
        "gamma-norm" => &[
            "n",
            "p_minus",
            "p_plus",
            "min_value",
            "oracle_value",
            "value_gap",
            "minimizer_L1_gap",
            "recovery_gap",
        ],
        "gamma-modular" => &[
            "field",
            "n",
            "p_minus",
            "p_plus",
            "sup_density",
            "log_energy",
            "closed_form_log",
        ],
        "envelope" => &["xi", "f", "q_inf_f", "reached_n"],
        "inequality-suite" => &["index", "family", "check", "lhs", "value", "rhs", "pass"],
        _ => return None,
    })
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Number(n)) => match n.as_u64() {
            Some(i) if !n.is_f64() => i.to_string(),
            _ => num(n.as_f64().unwrap_or(f64::NAN)),
        },
        Some(Value::String(s)) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Some(Value::String(s)) => s.clone(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(other) => other.to_string(),
    }
}

/// The CSV body of a JSON report `{"kind": .., "rows": [..], ..}`.
pub fn csv_from_report(report: &Value) -> Result<String, CliError> {
    let kind = report
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Config("report JSON has no \"kind\"".into()))?;
    let cols =
        columns(kind).ok_or_else(|| CliError::Config(format!("unknown report kind {kind:?}")))?;
    let rows = report
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Config("report JSON has no \"rows\" array".into()))?;
    let mut out = cols.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = cols.iter().map(|c| cell(row.get(*c))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_and_infinity_is_a_string() {
        for v in [0.1, 1.0, 1e-300, 2.0f64.sqrt(), 1e21, -3.5e-7] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
            assert_eq!(as_f64(&jnum(v)), Some(v));
        }
        assert_eq!(jnum(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(as_f64(&jnum(f64::INFINITY)), Some(f64::INFINITY));
    }

    #[test]
    fn csv_cells() {
        let report = object(vec![
            ("kind", "gamma-modular".into()),
            (
                "rows",
                Value::Array(vec![object(vec![
                    ("field", "a,b".into()),
                    ("n", 3u64.into()),
                    ("p_minus", jnum(8.0)),
                    ("log_energy", jnum(f64::INFINITY)),
                    ("closed_form_log", Value::Null),
                ])]),
            ),
        ]);
        let csv = csv_from_report(&report).unwrap();
        assert_eq!(
            csv,
            "field,n,p_minus,p_plus,sup_density,log_energy,closed_form_log\n\"a,b\",3,8.0,,,inf,\n"
        );
    }
}
