//! Rendering of Monte Carlo tables as CSV, JSON and Markdown.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::experiments::{TableRow, TableSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Md,
}

/// Values are stored with six decimals everywhere.
fn six(x: f64) -> String {
    format!("{x:.6}")
}

pub fn csv_header(spec: &TableSpec) -> Vec<String> {
    let labels: Vec<String> = std::iter::once("sign_positive".to_string())
        .chain(spec.powers.iter().map(|m| format!("power_{m}")))
        .chain(std::iter::once("in_cn_prime".to_string()))
        .collect();
    std::iter::once("n".to_string())
        .chain(labels.iter().cloned())
        .chain(labels.iter().map(|l| format!("stderr_{l}")))
        .chain(std::iter::once("boundary_count".to_string()))
        .collect()
}

pub fn render_csv(spec: &TableSpec, rows: &[TableRow]) -> String {
    let mut out = csv_header(spec).join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = std::iter::once(row.n.to_string())
            .chain(row.portions().into_iter().map(|(_, p)| six(p)))
            .chain(row.stderrs().into_iter().map(|(_, s)| six(s)))
            .chain(std::iter::once(row.boundary_count.to_string()))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn rounded(x: f64) -> Value {
    // re-parse the printed form so JSON and CSV agree digit for digit
    let printed: f64 = six(x).parse().expect("formatted float parses");
    json!(printed)
}

pub fn to_json(spec: &TableSpec, rows: &[TableRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("n".into(), json!(row.n));
            for (label, p) in row.portions() {
                obj.insert(label, rounded(p));
            }
            for (label, s) in row.stderrs() {
                obj.insert(format!("stderr_{label}"), rounded(s));
            }
            obj.insert("boundary_count".into(), json!(row.boundary_count));
            Value::Object(obj)
        })
        .collect();
    json!({
        "spec": {
            "dims": spec.dims,
            "samples": spec.samples,
            "powers": spec.powers,
            "seed": spec.seed,
        },
        "rows": rows,
    })
}

pub fn render_json(spec: &TableSpec, rows: &[TableRow]) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(spec, rows)).expect("json values serialize");
    s.push('\n');
    s
}

/// Percentages with one decimal, laid out like the usual chain table.
pub fn render_markdown(spec: &TableSpec, rows: &[TableRow]) -> String {
    let mut header = vec!["n".to_string(), "±x>O".to_string()];
    header.extend(spec.powers.iter().map(|&m| {
        if m == 1 {
            "B>O".to_string()
        } else {
            format!("B^{m}>O")
        }
    }));
    header.push("x∈C_n'".to_string());

    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---:|".repeat(header.len()));
    for row in rows {
        let cells: Vec<String> = std::iter::once(format!("n={}", row.n))
            .chain(
                row.portions()
                    .into_iter()
                    .map(|(_, p)| format!("{:.1}%", 100.0 * p)),
            )
            .collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    let _ = writeln!(
        out,
        "\n{} samples per row, seed {}; boundary samples: {}",
        spec.samples,
        spec.seed,
        rows.iter().map(|r| r.boundary_count).sum::<u64>()
    );
    out
}

pub fn render(format: Format, spec: &TableSpec, rows: &[TableRow]) -> String {
    match format {
        Format::Csv => render_csv(spec, rows),
        Format::Json => render_json(spec, rows),
        Format::Md => render_markdown(spec, rows),
    }
}
