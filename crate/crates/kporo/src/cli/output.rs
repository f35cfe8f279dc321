//! Deterministic output writers: JSON with 17-significant-digit floats and
//! CSV with '.' decimals, '\n' line endings and a mandatory header.

use crate::error::{Error, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// serde_json formatter printing every float with 17 significant digits,
/// so identical runs produce identical bytes on every platform.
struct P17Formatter;

impl serde_json::ser::Formatter for P17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        debug_assert!(value.is_finite(), "output floats must be finite");
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes a document to JSON with the 17-digit float contract.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, P17Formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::format(format!("json serialization failed: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::format(format!("json not utf-8: {e}")))
}

/// Writes to the given path, or stdout when the path is `None` or "-".
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, content)?;
        }
        _ => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

/// CSV row assembly with '\n' endings; fields must already be escaped-free.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
