//! Accuracy report: one row per model, one column per winner count, each cell
//! holding the mean (standard deviation) of per-voter leave-one-out accuracy.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::fitting::ModelKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportCell {
    pub winners: u32,
    pub voters: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    /// Supplementary partial-credit metric; not part of exact-match accuracy.
    pub jaccard_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportRow {
    pub model: ModelKind,
    pub cells: Vec<ReportCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AccuracyReport {
    pub winners: Vec<u32>,
    pub rows: Vec<ReportRow>,
}

impl AccuracyReport {
    pub fn row(&self, model: ModelKind) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn cell(&self, model: ModelKind, winners: u32) -> Option<&ReportCell> {
        self.row(model)?.cells.iter().find(|c| c.winners == winners)
    }

    pub fn mean(&self, model: ModelKind, winners: u32) -> Option<f64> {
        self.cell(model, winners)?.mean
    }

    /// Aligned text table, `mean% (sd%)` per cell, followed by the
    /// supplementary Jaccard block.
    pub fn to_text(&self) -> String {
        let header: Vec<String> = self
            .winners
            .iter()
            .map(|k| format!("{k} winner"))
            .collect();
        let name_w = self
            .rows
            .iter()
            .map(|r| r.model.display_name().len() + 1)
            .max()
            .unwrap_or(0);
        let col_w = 16;
        let mut out = String::new();
        let rule = "-".repeat(name_w + (col_w + 2) * header.len());
        let _ = write!(out, "{:name_w$}", "");
        for h in &header {
            let _ = write!(out, "  {h:>col_w$}");
        }
        out.push('\n');
        out.push_str(&rule);
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:name_w$}", format!("{}:", row.model.display_name()));
            for c in &row.cells {
                let cell = match (c.mean, c.sd) {
                    (Some(m), Some(s)) => format!("{:.1}% ({:.1}%)", m * 100.0, s * 100.0),
                    _ => "n/a".to_string(),
                };
                let _ = write!(out, "  {cell:>col_w$}");
            }
            out.push('\n');
        }
        out.push('\n');
        out.push_str("Supplementary: mean Jaccard similarity of held-out predictions\n");
        for row in &self.rows {
            let _ = write!(out, "{:name_w$}", format!("{}:", row.model.display_name()));
            for c in &row.cells {
                let cell = c
                    .jaccard_mean
                    .map_or_else(|| "n/a".to_string(), |j| format!("{j:.3}"));
                let _ = write!(out, "  {cell:>col_w$}");
            }
            out.push('\n');
        }
        let voters: Vec<String> = self
            .rows
            .first()
            .map(|r| r.cells.iter().map(|c| format!("k={}: {}", c.winners, c.voters)).collect())
            .unwrap_or_default();
        let _ = writeln!(out, "\nvoters per condition: {}", voters.join(", "));
        out
    }
}
