//! CSV and JSON emission. CSV floats carry 17 significant digits so that
//! values round-trip exactly; missing values are empty fields.

use std::io::Write;

use serde::Serialize;

use crate::cli::Format;
use crate::error::{CliError, Result};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn optional(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// A record type that knows its CSV layout.
pub trait Tabular: Serialize {
    fn header(&self) -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}

pub fn write_table<T: Tabular>(rows: &[T], format: Format, out: &mut dyn Write, target: &str) -> Result<()> {
    let io = |e: std::io::Error| CliError::io(target, e);
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            if let Some(first) = rows.first() {
                writer.write_record(first.header()).map_err(|e| io(e.into()))?;
            }
            for row in rows {
                writer.write_record(row.fields()).map_err(|e| io(e.into()))?;
            }
            writer.flush().map_err(io)
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(|e| io(e.into()))?;
            writeln!(out).map_err(io)
        }
    }
}
