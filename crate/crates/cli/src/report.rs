use std::fmt::Write as _;

use clap::ValueEnum;
use ned_core::experiments::to_f64;
use ned_core::{CostBreakdown, Distance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
}

/// Exact rendering: `3` or `7/2`.
pub fn exact(d: &Distance) -> String {
    d.to_string()
}

/// Decimal rendering with trailing zeros trimmed.
pub fn decimal(d: &Distance) -> String {
    if d.is_integer() {
        return d.to_integer().to_string();
    }
    let s = format!("{:.6}", to_f64(d));
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `3`, or `7/2 (3.5)` when the value is not integral.
pub fn scalar(d: &Distance) -> String {
    if d.is_integer() {
        exact(d)
    } else {
        format!("{} ({})", exact(d), decimal(d))
    }
}

/// A header plus rows, rendered either as CSV or as aligned columns.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                for row in std::iter::once(&self.header).chain(&self.rows) {
                    let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Format::Plain => {
                let mut width: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (w, c) in width.iter_mut().zip(row) {
                        *w = (*w).max(c.len());
                    }
                }
                for row in std::iter::once(&self.header).chain(&self.rows) {
                    let mut line = String::new();
                    for (i, (c, w)) in row.iter().zip(&width).enumerate() {
                        if i > 0 {
                            line.push_str("  ");
                        }
                        let _ = write!(line, "{c:<w$}");
                    }
                    out.push_str(line.trim_end());
                    out.push('\n');
                }
            }
        }
        out
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// Per-level table of a TED* run followed by the totals.
pub fn breakdown(b: &CostBreakdown, format: Format, title: Option<&str>) -> String {
    let mut t = Table::new(["level", "size_left", "size_right", "padding", "matching_cost", "moves"]);
    for l in &b.levels {
        t.push(vec![
            l.level.to_string(),
            l.size_left.to_string(),
            l.size_right.to_string(),
            l.padding.to_string(),
            l.matching_min.to_string(),
            l.matching.to_string(),
        ]);
    }
    let mut out = String::new();
    if let Some(title) = title {
        let _ = writeln!(out, "# {title}");
    }
    out.push_str(&t.render(format));
    match format {
        Format::Csv => {
            let _ = writeln!(out, "# unit_total,{}", b.unit_total);
            let _ = writeln!(out, "# total,{},{}", exact(&b.total), decimal(&b.total));
        }
        Format::Plain => {
            let _ = writeln!(out, "unit total: {}", b.unit_total);
            let _ = writeln!(out, "total: {}", scalar(&b.total));
        }
    }
    out
}
