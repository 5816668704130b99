//! Rendering of results as one JSON or CSV document.

use serde_json::Value;

use crate::args::Format;

/// A flat table for the CSV rendering.
#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Result of one subcommand.
pub struct Outcome {
    pub doc: Value,
    pub table: Table,
    /// A requested search ran to its bounds without a witness.
    pub exhausted: bool,
}

/// Text cell for a CSV field; absent values are empty.
pub fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn render(outcome: &Outcome, format: Format) -> Result<String, String> {
    match format {
        Format::Json => serde_json::to_string_pretty(&outcome.doc).map(|s| s + "\n").map_err(|e| e.to_string()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&outcome.table.headers).map_err(|e| e.to_string())?;
            for row in &outcome.table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}
