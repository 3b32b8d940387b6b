//! Artifact serialization: JSON with 17 significant digits, CSV with a fixed
//! header, and atomic file replacement.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::Failure;

/// Result of one command, ready to be written in either format.
pub struct Artifact {
    pub command: &'static str,
    pub params: Value,
    pub diagnostics: Value,
    pub data: Vec<Value>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::F)
    }
}

/// `d.dddddddddddddddde[-]x`, enough digits to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Compact JSON formatter writing every float with 17 significant digits.
struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// `{"meta": {...}, "data": [...]}`.
pub fn render_json(a: &Artifact) -> String {
    let doc = json!({
        "meta": {
            "command": a.command,
            "version": env!("CARGO_PKG_VERSION"),
            "params": a.params,
            "diagnostics": a.diagnostics,
        },
        "data": a.data,
    });
    to_json_string(&doc)
}

pub fn render_csv(a: &Artifact) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::config(format!("csv encoding failed: {e}"));
    w.write_record(&a.header).map_err(io)?;
    for row in &a.rows {
        debug_assert_eq!(row.len(), a.header.len());
        w.write_record(row.iter().map(|c| match c {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::B(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }))
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::config(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv fields are UTF-8"))
}

/// Writes `text` to stdout for `-`, otherwise through a temporary file in the
/// target directory that is renamed into place once complete.
pub fn write_atomic(target: &str, text: &str) -> Result<(), Failure> {
    if target == "-" {
        let mut out = io::stdout().lock();
        return out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Failure::config(format!("cannot write to stdout: {e}")));
    }
    let path = Path::new(target);
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: io::Error| Failure::config(format!("cannot write {target}: {e}"));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
