//! Result payloads, CSV tables and input loading shared by the subcommands.

use std::error::Error;
use std::path::Path;

use ordlab::io::{envelope_json, parse_dist_csv, parse_dist_json, read_text, to_csv, DistInput, ParseError};
use ordlab::scalar::{parse_rational, Scalar};
use serde_json::Value;

pub type Res<T> = Result<T, Box<dyn Error>>;

/// Headered rows for `--emit csv`.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// A command result: the JSON payload and, when the result has a natural
/// tabular form, its rows.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn json(json: Value) -> Self {
        Report { json, table: None }
    }

    pub fn with_table(json: Value, headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report { json, table: Some(Table { headers, rows }) }
    }

    pub fn render_json(&self, seed: u64) -> Res<String> {
        Ok(envelope_json(&self.json, seed)?)
    }

    /// The table, or `key,value` rows of the top-level fields when there is
    /// none.
    pub fn render_csv(&self) -> Res<String> {
        match &self.table {
            Some(t) => Ok(to_csv(&t.headers, &t.rows)?),
            None => {
                let rows = match &self.json {
                    Value::Object(map) => map.iter().map(|(k, v)| vec![k.clone(), cell(v)]).collect(),
                    other => vec![vec!["result".to_string(), cell(other)]],
                };
                Ok(to_csv(&["key", "value"], &rows)?)
            }
        }
    }
}

/// Strings unquoted, everything else as compact JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn num(x: f64) -> String {
    x.to_string()
}

/// A scalar as JSON: a number for floats, `"a/b"` for rationals.
pub fn scalar_value<T: Scalar>(v: &T) -> Value {
    v.serialize_value(serde_json::value::Serializer).expect("scalars serialize")
}

pub fn scalar_text<T: Scalar>(v: &T) -> String {
    cell(&scalar_value(v))
}

/// Parses a real given as a decimal or as `a/b`.
pub fn real(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .or_else(|| parse_rational(s).map(|r| r.as_f64()))
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("not a finite real: {s:?}"))
}

/// Text of an input argument with its source name. Arguments that start with
/// `[` or `{` are taken as inline JSON, anything else as a file path.
pub fn read_input(arg: &str) -> Res<(String, String)> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        Ok((arg.to_string(), "<inline>".to_string()))
    } else {
        Ok((read_text(Path::new(arg))?, arg.to_string()))
    }
}

pub fn is_csv(source: &str) -> bool {
    source.ends_with(".csv")
}

/// One distribution from JSON, or from a single-row CSV file.
pub fn load_dist(arg: &str) -> Res<DistInput> {
    let (text, source) = read_input(arg)?;
    if !is_csv(&source) {
        return Ok(parse_dist_json(&text, &source)?);
    }
    let mut rows = parse_dist_csv(&text, &source)?;
    if rows.len() != 1 {
        let e = ParseError {
            source_name: source,
            location: "file".into(),
            message: format!("expected one row, found {}", rows.len()),
        };
        return Err(e.into());
    }
    Ok(rows.remove(0))
}

/// Alias so clap parses a grid as one value rather than a list.
pub type Grid = Vec<f64>;

/// `min:max:step` as evenly spaced points, both ends included.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<f64> = s.split(':').map(real).collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected min:max:step, got {s:?}"));
    };
    if !(step > 0.0 && hi >= lo) {
        return Err(format!("grid {s:?} needs step > 0 and max >= min"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + k as f64 * step).collect())
}
