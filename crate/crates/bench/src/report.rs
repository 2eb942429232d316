//! CSV and markdown report writers.
//!
//! Raw records carry one row per run with a fixed column order. The summary
//! mirrors the comparison-table layout: instance, best known, one gap column
//! per algorithm (a `*` marking that the best known value was reached at
//! least once), then one time column per algorithm, and a final wins row.
//! Gap is `100 * (best_known - found) / best_known`.
//!
//! All numeric fields are written with fixed precision so that re-running a
//! plan reproduces the bytes exactly (wall-clock columns aside).

use std::io::Write;

use crate::harness::{ReportRow, RunRecord, WinsRow};
use crate::plan::Algorithm;

pub const RAW_HEADER: [&str; 11] = [
    "instance",
    "algorithm",
    "seed",
    "best_value",
    "gap",
    "evaluations",
    "generations",
    "randomizations",
    "seconds",
    "stop_reason",
    "weight_source",
];

fn fmt_gap(gap: Option<f64>) -> String {
    match gap {
        Some(g) => format!("{g:.6}"),
        None => String::new(),
    }
}

/// One raw record as CSV fields, in `RAW_HEADER` order.
pub fn raw_fields(r: &RunRecord) -> Vec<String> {
    vec![
        r.instance.clone(),
        r.algorithm.label().to_string(),
        r.seed.to_string(),
        r.best_value.to_string(),
        fmt_gap(r.gap),
        r.evaluations.to_string(),
        r.generations.to_string(),
        r.randomizations.to_string(),
        format!("{:.6}", r.seconds),
        r.stop_reason.as_str().to_string(),
        r.weight_source.as_str().to_string(),
    ]
}

pub fn write_raw_csv<W: Write>(records: &[RunRecord], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RAW_HEADER)?;
    for r in records {
        w.write_record(raw_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

fn gap_cell(summary: &crate::harness::AlgoSummary) -> String {
    match summary.mean_gap {
        Some(g) => {
            let star = if summary.star { "*" } else { "" };
            format!("{g:.3}{star}")
        }
        None => "n/a".to_string(),
    }
}

pub fn write_summary_csv<W: Write>(
    rows: &[ReportRow],
    wins: &WinsRow,
    algorithms: &[Algorithm],
    out: W,
) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["instance".to_string(), "best_known".to_string()];
    header.extend(algorithms.iter().map(|a| format!("gap_{}", a.label())));
    header.extend(algorithms.iter().map(|a| format!("time_{}", a.label())));
    header.extend(algorithms.iter().map(|a| format!("evals_{}", a.label())));
    w.write_record(&header)?;

    for row in rows {
        let mut fields = vec![
            row.instance.clone(),
            row.best_known.map(|b| b.to_string()).unwrap_or_default(),
        ];
        fields.extend(row.algorithms.iter().map(gap_cell));
        fields.extend(
            row.algorithms
                .iter()
                .map(|a| format!("{:.3}", a.mean_seconds)),
        );
        fields.extend(
            row.algorithms
                .iter()
                .map(|a| format!("{:.1}", a.mean_evaluations)),
        );
        w.write_record(&fields)?;
    }

    let mut fields = vec!["wins".to_string(), String::new()];
    fields.extend(wins.quality.iter().map(|q| q.to_string()));
    fields.extend(wins.time.iter().map(|t| t.to_string()));
    fields.extend(algorithms.iter().map(|_| String::new()));
    w.write_record(&fields)?;
    w.flush()?;
    Ok(())
}

/// Markdown table: `Instance | Best known | Gap ... | Time ...` plus the
/// wins row, with columns padded for plain-text reading.
pub fn write_summary_markdown<W: Write>(
    rows: &[ReportRow],
    wins: &WinsRow,
    algorithms: &[Algorithm],
    mut out: W,
) -> anyhow::Result<()> {
    let mut header = vec!["Instance".to_string(), "Best known".to_string()];
    header.extend(algorithms.iter().map(|a| format!("Gap {}", a.label())));
    header.extend(algorithms.iter().map(|a| format!("Time {}", a.label())));

    let mut body: Vec<Vec<String>> = Vec::new();
    for row in rows {
        let mut cells = vec![
            row.instance.clone(),
            row.best_known
                .map(|b| b.to_string())
                .unwrap_or_else(|| "-".to_string()),
        ];
        cells.extend(row.algorithms.iter().map(gap_cell));
        cells.extend(
            row.algorithms
                .iter()
                .map(|a| format!("{:.3}", a.mean_seconds)),
        );
        body.push(cells);
    }
    let mut wins_cells = vec!["wins".to_string(), String::new()];
    wins_cells.extend(wins.quality.iter().map(|q| q.to_string()));
    wins_cells.extend(wins.time.iter().map(|t| t.to_string()));
    body.push(wins_cells);

    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &body {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let print_row = |out: &mut W, cells: &[String]| -> std::io::Result<()> {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<width$}", width = widths[i]))
            .collect();
        writeln!(out, "| {} |", padded.join(" | "))
    };
    print_row(&mut out, &header)?;
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    writeln!(out, "|-{}-|", rule.join("-|-"))?;
    for row in &body {
        print_row(&mut out, row)?;
    }
    Ok(())
}
