//! Table, CSV and JSON renderings of model results.

use std::fmt::Write as _;

use crate::analysis::{level_costs, Comparison, EnergyWeights, SweepSeries};
use crate::breakdown::{Accelerator, MovementBreakdown};
use crate::error::{ModelError, Result};
use crate::hygcn;
use crate::io::Format;
use crate::oracle::Discrepancy;

pub const CSV_HEADER: &str = "level,hierarchy,chunk_bits,iterations,data_movement_bits,payload_bits";

const UNDEFINED: &str = "undefined";

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}

fn ratio_text(r: Option<f64>) -> String {
    r.map_or_else(|| UNDEFINED.to_string(), |r| format!("{r:.6}"))
}

fn opt_text(v: Option<u128>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Aligned text table. The first `left` columns are left-aligned, the rest
/// right-aligned.
fn table(header: &[&str], rows: &[Vec<String>], left: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            if i < left {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "{cell:>w$}");
            }
        }
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&mut header.iter().copied());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&mut rule.iter().map(String::as_str)));
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

fn level_rows(b: &MovementBreakdown) -> Vec<Vec<String>> {
    b.levels
        .iter()
        .map(|l| {
            vec![
                l.label.clone(),
                l.table_hierarchy.clone(),
                l.chunk_bits.to_string(),
                l.iterations.to_string(),
                l.data_movement_bits.to_string(),
                l.payload_bits.to_string(),
            ]
        })
        .collect()
}

pub fn breakdown_csv(b: &MovementBreakdown) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for row in level_rows(b) {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "total,,,{},{},{}",
        b.total_iterations, b.total_dm_bits, b.total_payload_bits
    );
    out
}

pub fn breakdown_table(b: &MovementBreakdown) -> String {
    let header = [
        "level",
        "hierarchy",
        "chunk_bits",
        "iterations",
        "data_movement_bits",
        "payload_bits",
    ];
    let mut rows = level_rows(b);
    rows.push(vec![
        "total".into(),
        String::new(),
        String::new(),
        b.total_iterations.to_string(),
        b.total_dm_bits.to_string(),
        b.total_payload_bits.to_string(),
    ]);
    let mut out = format!("{} data movement\n\n", b.accelerator);
    out.push_str(&table(&header, &rows, 2));
    let _ = writeln!(out, "\nlargest level iterations: {}", b.max_level_iterations());
    if b.accelerator == Accelerator::Hygcn {
        let (agg, comb) = hygcn::phase_iterations(b);
        let _ = writeln!(
            out,
            "aggregation engine: {agg}, combination engine: {comb}, pipelined bound: {}",
            agg.max(comb)
        );
    }
    out
}

pub fn breakdown_json(b: &MovementBreakdown) -> String {
    json(b)
}

pub fn breakdown_from_json(text: &str) -> Result<MovementBreakdown> {
    serde_json::from_str(text).map_err(|e| ModelError::Config(format!("breakdown json: {e}")))
}

pub fn render_breakdown(b: &MovementBreakdown, format: Format) -> String {
    match format {
        Format::Table => breakdown_table(b),
        Format::Csv => breakdown_csv(b),
        Format::Json => breakdown_json(b),
    }
}

pub fn series_csv(s: &SweepSeries) -> String {
    let mut out = format!("{},{CSV_HEADER}\n", s.spec.parameter);
    for p in &s.points {
        for row in level_rows(&p.breakdown) {
            let _ = writeln!(out, "{},{}", p.value, row.join(","));
        }
        let b = &p.breakdown;
        let _ = writeln!(
            out,
            "{},total,,,{},{},{}",
            p.value, b.total_iterations, b.total_dm_bits, b.total_payload_bits
        );
    }
    out
}

pub fn series_table(s: &SweepSeries) -> String {
    let symbol = s.spec.parameter.symbol();
    let mut header = vec![symbol, "total_dm_bits", "total_iterations", "largest_level_iterations"];
    let hygcn = s.accelerator == Accelerator::Hygcn;
    if hygcn {
        header.push("pipelined_bound");
    }
    let rows: Vec<Vec<String>> = s
        .points
        .iter()
        .map(|p| {
            let b = &p.breakdown;
            let mut row = vec![
                p.value.to_string(),
                b.total_dm_bits.to_string(),
                b.total_iterations.to_string(),
                b.max_level_iterations().to_string(),
            ];
            if hygcn {
                let (agg, comb) = hygcn::phase_iterations(b);
                row.push(agg.max(comb).to_string());
            }
            row
        })
        .collect();
    let mut out = format!("{} sweep over {symbol}\n\n", s.accelerator);
    out.push_str(&table(&header, &rows, 0));
    out
}

pub fn render_series(s: &SweepSeries, format: Format) -> String {
    match format {
        Format::Table => series_table(s),
        Format::Csv => series_csv(s),
        Format::Json => json(s),
    }
}

fn comparison_rows(c: &Comparison) -> Vec<Vec<String>> {
    c.rows
        .iter()
        .chain(std::iter::once(&c.total))
        .map(|r| {
            vec![
                r.level.clone(),
                opt_text(r.engn_dm_bits),
                opt_text(r.hygcn_dm_bits),
                ratio_text(r.ratio),
            ]
        })
        .collect()
}

pub fn render_comparison(c: &Comparison, format: Format) -> String {
    let header = ["level", "engn_dm_bits", "hygcn_dm_bits", "hygcn_over_engn"];
    match format {
        Format::Table => {
            let mut out = String::from("data movement, hygcn vs engn\n\n");
            out.push_str(&table(&header, &comparison_rows(c), 1));
            out
        }
        Format::Csv => {
            let mut out = header.join(",");
            out.push('\n');
            for r in c.rows.iter().chain(std::iter::once(&c.total)) {
                let cell = |v: Option<u128>| v.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    r.level,
                    cell(r.engn_dm_bits),
                    cell(r.hygcn_dm_bits),
                    ratio_text(r.ratio)
                );
            }
            out
        }
        Format::Json => json(c),
    }
}

/// Weighted energy per level for one or more breakdowns.
pub fn render_energy(breakdowns: &[MovementBreakdown], weights: &EnergyWeights, format: Format) -> String {
    let reports: Vec<_> = breakdowns
        .iter()
        .map(|b| {
            let costs = level_costs(b, weights);
            let total: f64 = costs.iter().map(|c| c.cost).sum();
            (b, costs, total)
        })
        .collect();
    match format {
        Format::Json => json(&serde_json::json!({
            "weights": weights,
            "reports": reports
                .iter()
                .map(|(b, costs, total)| serde_json::json!({
                    "accelerator": b.accelerator,
                    "levels": costs,
                    "total_dm_bits": b.total_dm_bits,
                    "total": total,
                }))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("accelerator,level,hierarchy,data_movement_bits,weight,cost\n");
            for (b, costs, total) in &reports {
                for c in costs {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        b.accelerator,
                        c.level,
                        c.hierarchy.notation(),
                        c.data_movement_bits,
                        c.weight,
                        c.cost
                    );
                }
                let _ = writeln!(out, "{},total,,{},,{total}", b.accelerator, b.total_dm_bits);
            }
            out
        }
        Format::Table => {
            let header = ["level", "hierarchy", "data_movement_bits", "weight", "cost"];
            let mut out = String::new();
            for (i, (b, costs, total)) in reports.iter().enumerate() {
                let mut rows: Vec<Vec<String>> = costs
                    .iter()
                    .map(|c| {
                        vec![
                            c.level.clone(),
                            c.hierarchy.notation().to_string(),
                            c.data_movement_bits.to_string(),
                            c.weight.to_string(),
                            c.cost.to_string(),
                        ]
                    })
                    .collect();
                rows.push(vec![
                    "total".into(),
                    String::new(),
                    b.total_dm_bits.to_string(),
                    String::new(),
                    total.to_string(),
                ]);
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "{} energy estimate (relative units)\n", b.accelerator);
                out.push_str(&table(&header, &rows, 2));
            }
            out
        }
    }
}

/// Report of a `validate` run: one line per checked breakdown with problems.
pub fn render_discrepancies(checked: usize, found: &[(String, Discrepancy)], format: Format) -> String {
    match format {
        Format::Json => json(&serde_json::json!({
            "checked": checked,
            "discrepancies": found
                .iter()
                .map(|(case, d)| serde_json::json!({"case": case, "level": d.level, "issues": d.issues}))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("case,level,issue\n");
            for (case, d) in found {
                for issue in &d.issues {
                    let _ = writeln!(out, "{case},{},\"{}\"", d.level, issue.replace('"', "\"\""));
                }
            }
            out
        }
        Format::Table => {
            let mut out = format!("checked {checked} breakdowns, {} discrepancies\n", found.len());
            for (case, d) in found {
                let _ = writeln!(out, "{case} {}: {}", d.level, d.issues.join("; "));
            }
            out
        }
    }
}
