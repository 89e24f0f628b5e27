//! Tabular reports and their table, CSV and JSON renderings.
//!
//! Numbers are rounded for display only in the table rendering and in the
//! display column of the CSV rendering; CSV adds a `<column>_full` column
//! beside every numeric column and JSON always carries full precision.

use std::io::{self, Write};

use greenfabric_core::{KernelProfile, SweepResult};
use serde_json::{json, Value};

/// Decimals used to display CDC values and savings factors.
pub const VALUE_DECIMALS: usize = 2;
/// Decimals used to display fabric scale factors.
pub const SCALE_DECIMALS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num { value: f64, decimals: usize },
    Int(i64),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn value(value: f64) -> Self {
        Cell::Num {
            value,
            decimals: VALUE_DECIMALS,
        }
    }

    pub fn scale(value: f64) -> Self {
        Cell::Num {
            value,
            decimals: SCALE_DECIMALS,
        }
    }

    pub fn num(value: f64, decimals: usize) -> Self {
        Cell::Num { value, decimals }
    }

    /// Rounded display text; empty cells render as `-`.
    pub fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num { value, decimals } => format!("{value:.decimals$}"),
            Cell::Int(i) => i.to_string(),
            Cell::Empty => "-".to_string(),
        }
    }

    fn full(&self) -> String {
        match self {
            Cell::Num { value, .. } => value.to_string(),
            Cell::Empty => String::new(),
            other => other.display(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Num { value, .. } => json!(value),
            Cell::Int(i) => json!(i),
            Cell::Empty => Value::Null,
        }
    }

    fn right_aligned(&self) -> bool {
        !matches!(self, Cell::Text(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedReport {
    pub title: String,
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
    pub footnotes: Vec<String>,
}

impl RenderedReport {
    pub fn new<S: Into<String>>(title: impl Into<String>, headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            title: title.into(),
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            footnotes: Vec::new(),
        }
    }

    /// Appends a row.
    ///
    /// # Panics
    /// If the row width differs from the header width.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.headers.len(),
            "report rows must match the header width"
        );
        self.rows.push(row);
    }

    pub fn footnote(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.footnotes.contains(&note) {
            self.footnotes.push(note);
        }
    }

    /// Adds the estimated-inputs footnote if any of `kernels` is flagged.
    pub fn note_estimates<'a>(&mut self, kernels: impl IntoIterator<Item = &'a KernelProfile>) {
        if let Some(note) = estimated_footnote(kernels) {
            self.footnote(note);
        }
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    fn numeric_columns(&self) -> Vec<bool> {
        (0..self.headers.len())
            .map(|c| self.rows.iter().any(|r| matches!(r[c], Cell::Num { .. })))
            .collect()
    }
}

/// Footnote text for reports built on estimated kernel data.
pub fn estimated_footnote<'a>(kernels: impl IntoIterator<Item = &'a KernelProfile>) -> Option<String> {
    let names: Vec<&str> = kernels
        .into_iter()
        .filter(|k| k.estimated)
        .map(|k| k.name.as_str())
        .collect();
    if names.is_empty() {
        None
    } else {
        Some(format!(
            "estimated inputs: utilization of {} is estimated, not measured",
            names.join(", ")
        ))
    }
}

pub fn emit_table(report: &RenderedReport, format: OutputFormat, mut out: impl Write) -> io::Result<()> {
    match format {
        OutputFormat::Table => write_aligned(report, &mut out),
        OutputFormat::Csv => write_csv(report, &mut out),
        OutputFormat::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            let doc = json!({
                "title": report.title,
                "columns": report.headers,
                "rows": rows,
                "footnotes": report.footnotes,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")
        }
    }
}

fn write_aligned(report: &RenderedReport, out: &mut impl Write) -> io::Result<()> {
    let cells: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::display).collect())
        .collect();
    let widths: Vec<usize> = report
        .headers
        .iter()
        .enumerate()
        .map(|(c, h)| {
            cells
                .iter()
                .map(|r| r[c].chars().count())
                .chain([h.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let numeric = report.numeric_columns();

    if !report.title.is_empty() {
        writeln!(out, "{}", report.title)?;
    }
    let line = |out: &mut dyn Write, items: &[String], align: &dyn Fn(usize) -> bool| -> io::Result<()> {
        let parts: Vec<String> = items
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if align(c) {
                    format!("{s:>w$}", w = widths[c])
                } else {
                    format!("{s:<w$}", w = widths[c])
                }
            })
            .collect();
        writeln!(out, "{}", parts.join("  ").trim_end())
    };
    line(out, &report.headers, &|c| numeric[c])?;
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(out, &rule, &|_| false)?;
    for (row, text) in report.rows.iter().zip(&cells) {
        line(out, text, &|c| row[c].right_aligned())?;
    }
    for note in &report.footnotes {
        writeln!(out, "* {note}")?;
    }
    Ok(())
}

fn csv_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn write_csv(report: &RenderedReport, out: &mut impl Write) -> io::Result<()> {
    for note in &report.footnotes {
        writeln!(out, "# {note}")?;
    }
    let numeric = report.numeric_columns();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = Vec::new();
    for (h, &num) in report.headers.iter().zip(&numeric) {
        header.push(h.clone());
        if num {
            header.push(format!("{h}_full"));
        }
    }
    w.write_record(&header).map_err(csv_io)?;
    for row in &report.rows {
        let mut record = Vec::with_capacity(header.len());
        for (cell, &num) in row.iter().zip(&numeric) {
            record.push(match cell {
                Cell::Empty => String::new(),
                c => c.display(),
            });
            if num {
                record.push(cell.full());
            }
        }
        w.write_record(&record).map_err(csv_io)?;
    }
    w.flush()
}

/// One row per sample: series label, parameter, value, all at full precision.
pub fn emit_curve_csv(sweeps: &[SweepResult], out: impl Write) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["series", "parameter", "value"]).map_err(csv_io)?;
    for sweep in sweeps {
        for (p, v) in sweep.samples() {
            w.write_record([sweep.label(), &p.to_string(), &v.to_string()])
                .map_err(csv_io)?;
        }
    }
    w.flush()
}
