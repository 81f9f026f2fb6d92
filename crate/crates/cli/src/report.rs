//! Report serialization: JSON with 17 significant digits for every float, and
//! CSV for flat row lists.

use std::io::{self, Write};
use std::str::FromStr;

use heisenberg_core::{Error, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// `{:.16e}` is the shortest fixed form that always round-trips an f64.
fn float_text(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty printer that writes floats with 17 significant digits.
struct SigFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(float_text(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(report: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, SigFormatter(PrettyFormatter::new()));
    report
        .serialize(&mut ser)
        .map_err(|e| Error::invalid(format!("serializing report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_cell(v: &Value) -> Result<String> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => float_text(n.as_f64().expect("f64 number")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::UnsupportedFormat("csv cells must be scalars".into())),
    })
}

/// A list of flat records as CSV with a header taken from the first record.
pub fn to_csv<T: Serialize + ?Sized>(rows: &T) -> Result<Vec<u8>> {
    let value =
        serde_json::to_value(rows).map_err(|e| Error::invalid(format!("serializing rows: {e}")))?;
    let Value::Array(rows) = value else {
        return Err(Error::UnsupportedFormat(
            "csv output needs a list of rows".into(),
        ));
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Option<Vec<String>> = None;
    for row in &rows {
        let Value::Object(map) = row else {
            return Err(Error::UnsupportedFormat("csv rows must be objects".into()));
        };
        let keys: Vec<String> = map.keys().cloned().collect();
        match &header {
            None => {
                w.write_record(&keys).map_err(csv_err)?;
                header = Some(keys);
            }
            Some(h) if *h != keys => {
                return Err(Error::UnsupportedFormat(
                    "csv rows must share one schema".into(),
                ))
            }
            Some(_) => {}
        }
        let cells = map.values().map(csv_cell).collect::<Result<Vec<_>>>()?;
        w.write_record(&cells).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::invalid(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

/// Serializes a report; CSV needs the report to be a list of flat rows.
pub fn emit_report<T: Serialize + ?Sized>(report: &T, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}
