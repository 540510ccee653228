//! Output formats: canonical JSON, CSV and an aligned table.

use std::fmt::Write as _;

use rlc_core::relbound::BoundReport;
use rlc_core::sweep::SweepReport;
use serde::Serialize;
use serde_json::Value;

use crate::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Floats as `%.12e`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// Compact JSON with sorted keys and every float written as `%.12e`.
/// Integers stay integers; non-finite floats become `null`.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    write_value(&v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) if f.is_finite() => out.push_str(&fmt_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

const BOUND_HEADER: [&str; 8] = [
    "report",
    "bound",
    "raw",
    "clamped",
    "claimed",
    "oracle_tv_lower",
    "oracle_tv_upper",
    "dominated",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn bound_rows(label: &str, r: &BoundReport) -> Vec<Vec<String>> {
    let (lo, hi) = (opt(r.oracle_tv.map(|t| t.lower)), opt(r.oracle_tv.map(|t| t.upper)));
    let dominated = r.dominated.map(|d| d.to_string()).unwrap_or_default();
    let mut rows = Vec::new();
    let theorem = [
        ("bound_nu_side", r.bound_nu_side),
        ("bound_mu_side", r.bound_mu_side),
        ("simplified", r.simplified),
    ];
    for (name, value) in theorem {
        if let Some(v) = value {
            rows.push(vec![
                label.to_string(),
                name.to_string(),
                fmt_float(v),
                fmt_float(v.clamp(0.0, 1.0)),
                "true".into(),
                lo.clone(),
                hi.clone(),
                dominated.clone(),
            ]);
        }
    }
    for b in &r.corollary_bounds {
        rows.push(vec![
            label.to_string(),
            b.name.clone(),
            fmt_float(b.raw),
            fmt_float(b.clamped),
            b.claimed.to_string(),
            lo.clone(),
            hi.clone(),
            dominated.clone(),
        ]);
    }
    if rows.is_empty() {
        let reason = r.reason.clone().unwrap_or_else(|| "no bound".into());
        rows.push(vec![
            label.to_string(),
            format!("not applicable: {reason}"),
            String::new(),
            String::new(),
            "false".into(),
            lo,
            hi,
            dominated,
        ]);
    }
    rows
}

fn record_rows(rec: &Record) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let rows = rec.reports.iter().flat_map(|(label, r)| bound_rows(label, r)).collect();
    (BOUND_HEADER.to_vec(), rows)
}

fn sweep_rows(s: &SweepReport) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "suite",
        "seed",
        "instances",
        "dominance_passes",
        "dominance_failures",
        "worst_slack",
    ];
    let row = vec![
        s.suite.to_string(),
        s.seed.to_string(),
        s.instances.to_string(),
        s.dominance_passes.to_string(),
        s.dominance_failures.len().to_string(),
        opt(s.worst_slack),
    ];
    (header, vec![row])
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory writer");
    for row in rows {
        w.write_record(row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

fn to_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn emit_record(rec: &Record, format: Format) -> String {
    match format {
        Format::Json => canonical_json(rec) + "\n",
        Format::Csv => {
            let (h, rows) = record_rows(rec);
            to_csv(&h, &rows)
        }
        Format::Table => {
            let (h, rows) = record_rows(rec);
            to_table(&h, &rows)
        }
    }
}

pub fn emit_sweep(s: &SweepReport, format: Format) -> String {
    match format {
        Format::Json => canonical_json(s) + "\n",
        Format::Csv => {
            let (h, rows) = sweep_rows(s);
            to_csv(&h, &rows)
        }
        Format::Table => {
            let (h, rows) = sweep_rows(s);
            let mut out = to_table(&h, &rows);
            for f in &s.dominance_failures {
                out.push_str(&format!("failure {}: {}\n", f.index, canonical_json(f)));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rlc_core::sweep::Suite;

    #[test]
    fn floats_use_exponent_form() {
        assert_eq!(canonical_json(&vec![0.5, 3.0]), "[5.000000000000e-1,3.000000000000e0]");
        assert_eq!(canonical_json(&f64::NAN), "null");
        assert_eq!(canonical_json(&7u32), "7");
    }

    #[test]
    fn empty_sweep_report() {
        let json = canonical_json(&SweepReport::empty(Suite::Dominance, 3));
        assert!(
            json.starts_with(r#"{"dominance_failures":[],"dominance_passes":0,"instances":0,"#),
            "{json}"
        );
    }

    #[test]
    fn table_columns_align() {
        let t = to_table(&["a", "bbb"], &[vec!["long".into(), "x".into()]]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "a     bbb");
        assert_eq!(lines[2], "long  x");
    }
}
