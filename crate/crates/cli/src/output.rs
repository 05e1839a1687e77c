//! Serialization of run artifacts as CSV or JSON lines.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// Writes `bytes` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Records as CSV with a header row and LF line endings, or one JSON object per line.
pub fn records<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            w.into_inner()
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        Format::JsonLines => {
            let mut out = Vec::new();
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.push(b'\n');
            }
            Ok(out)
        }
    }
}

/// Ordered key-value pairs as a two-column CSV or a single JSON object.
pub fn report(pairs: &[(&str, String)], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(["key", "value"])?;
            for (k, v) in pairs {
                w.write_record([k, v.as_str()])?;
            }
            w.into_inner()
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        Format::JsonLines => {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                .collect();
            let mut out = serde_json::to_vec(&map)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
