//! File formats: distributions, posets, chains, work samples, polynomials,
//! and CSV/JSON emission.

use std::path::Path;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::dist::{Dist, ExactDist, ScoreVector, PARSE_NORM_TOL};
use crate::fluct::{ExactChainSpec, MarkovChainSpec, Matrix};
use crate::poset::{from_relation, FinitePreorder};
use crate::scalar::parse_rational;

/// Malformed or invalid input, with the source name and a location such as
/// `line 3`, `mats[1]` or `pairs[0]`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("ParseError at {source_name}:{location}: {message}")]
pub struct ParseError {
    pub source_name: String,
    pub location: String,
    pub message: String,
}

fn perr(source: &str, location: impl Into<String>, message: impl ToString) -> ParseError {
    ParseError { source_name: source.to_string(), location: location.into(), message: message.to_string() }
}

fn json_err(source: &str, e: serde_json::Error) -> ParseError {
    perr(source, format!("line {} column {}", e.line(), e.column()), e)
}

/// Reads a file, reporting failures as a [`ParseError`].
pub fn read_text(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| perr(&path.display().to_string(), "file", e))
}

/// A distribution in either arithmetic backend.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DistInput {
    Float(Dist),
    Exact(ExactDist),
}

impl DistInput {
    pub fn to_f64(&self) -> Dist {
        match self {
            DistInput::Float(d) => d.clone(),
            DistInput::Exact(d) => d.to_f64(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DistInput::Float(d) => d.len(),
            DistInput::Exact(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

enum Cell {
    Num(f64, String),
    Text(String),
}

fn cells_of(source: &str, location: &str, v: &Value) -> Result<Vec<Cell>, ParseError> {
    let arr = v.as_array().ok_or_else(|| perr(source, location, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, c)| match c {
            Value::Number(n) => n
                .as_f64()
                .map(|f| Cell::Num(f, n.to_string()))
                .ok_or_else(|| perr(source, format!("{location}[{i}]"), "number out of range")),
            Value::String(s) => Ok(Cell::Text(s.clone())),
            _ => Err(perr(source, format!("{location}[{i}]"), "expected a number or an \"a/b\" string")),
        })
        .collect()
}

/// Any string entry switches the whole vector to exact rationals.
fn dist_from_cells(source: &str, location: &str, cells: Vec<Cell>) -> Result<DistInput, ParseError> {
    if cells.iter().any(|c| matches!(c, Cell::Text(_))) {
        let vals = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let text = match c {
                    Cell::Num(_, t) | Cell::Text(t) => t,
                };
                parse_rational(text)
                    .ok_or_else(|| perr(source, format!("{location}[{i}]"), format!("not a rational: {text:?}")))
            })
            .collect::<Result<Vec<BigRational>, _>>()?;
        ExactDist::new(vals).map(DistInput::Exact).map_err(|e| perr(source, location, e))
    } else {
        let vals: Vec<f64> = cells.iter().map(|c| if let Cell::Num(f, _) = c { *f } else { 0.0 }).collect();
        parse_float_dist(&vals).map_err(|e| perr(source, location, e))
    }
}

/// Float distributions are accepted within the looser input tolerance and
/// renormalised.
fn parse_float_dist(vals: &[f64]) -> Result<DistInput, crate::dist::DistError> {
    let sum: f64 = vals.iter().sum();
    if vals.is_empty() || (sum - 1.0).abs() > PARSE_NORM_TOL {
        return Dist::new(vals.to_vec()).map(DistInput::Float);
    }
    Dist::new(vals.iter().map(|v| v / sum).collect()).map(DistInput::Float)
}

/// `[0.5, 0.25, 0.25]` or `["1/2", "1/4", "1/4"]`.
pub fn parse_dist_json(text: &str, source: &str) -> Result<DistInput, ParseError> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_err(source, e))?;
    dist_from_cells(source, "$", cells_of(source, "$", &v)?)
}

/// One distribution per CSV row; entries are decimals or `a/b`.
pub fn parse_dist_csv(text: &str, source: &str) -> Result<Vec<DistInput>, ParseError> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let line = format!("line {}", row + 1);
        let rec = rec.map_err(|e| perr(source, line.clone(), e))?;
        let cells = rec
            .iter()
            .map(|f| match f.parse::<f64>() {
                Ok(x) if !f.contains('/') => Cell::Num(x, f.to_string()),
                _ => Cell::Text(f.to_string()),
            })
            .collect();
        out.push(dist_from_cells(source, &line, cells)?);
    }
    Ok(out)
}

/// A JSON array of finite reals.
pub fn parse_scores_json(text: &str, source: &str) -> Result<ScoreVector, ParseError> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(|e| json_err(source, e))?;
    ScoreVector::new(v).map_err(|e| perr(source, "$", e))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetFile {
    n: usize,
    #[serde(default)]
    pairs: Vec<(usize, usize)>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// `{"n": 3, "pairs": [[0, 2], [1, 2]], "labels": ["a", "b", "t"]}`; pairs
/// generate the preorder by reflexive-transitive closure.
pub fn parse_poset_json(text: &str, source: &str) -> Result<(FinitePreorder, Vec<String>), ParseError> {
    let f: PosetFile = serde_json::from_str(text).map_err(|e| json_err(source, e))?;
    if let Some(i) = f.pairs.iter().position(|&(a, b)| a >= f.n || b >= f.n) {
        return Err(perr(source, format!("pairs[{i}]"), format!("index out of range for n = {}", f.n)));
    }
    let labels = match f.labels {
        Some(l) if l.len() != f.n => {
            return Err(perr(source, "labels", format!("expected {} labels, got {}", f.n, l.len())))
        }
        Some(l) => l,
        None => (0..f.n).map(|i| i.to_string()).collect(),
    };
    let p = from_relation(f.n, &f.pairs).map_err(|e| perr(source, "pairs", e))?;
    Ok((p, labels))
}

/// A chain in either arithmetic backend.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainInput {
    Float(MarkovChainSpec),
    Exact(ExactChainSpec),
}

impl ChainInput {
    pub fn to_f64(&self) -> MarkovChainSpec {
        match self {
            ChainInput::Float(c) => c.clone(),
            ChainInput::Exact(c) => c.to_f64(),
        }
    }
}

fn fluct_location(e: &crate::fluct::FluctError) -> String {
    use crate::fluct::FluctError::*;
    match e {
        NotStochastic { matrix, column, .. } => format!("mats[{}] column {column}", matrix - 1),
        NegativeEntry { matrix, row, column, .. } => format!("mats[{}][{row}][{column}]", matrix - 1),
        DimensionMismatch { .. } => "mats".into(),
        _ => "$".into(),
    }
}

/// `{"p0": [...], "mats": [[[...]]]}`; any string entry selects exact mode.
pub fn parse_chain_json(text: &str, source: &str) -> Result<ChainInput, ParseError> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_err(source, e))?;
    let obj = v.as_object().ok_or_else(|| perr(source, "$", "expected an object with p0 and mats"))?;
    if let Some(k) = obj.keys().find(|k| *k != "p0" && *k != "mats") {
        return Err(perr(source, k.as_str(), "unknown field"));
    }
    let p0 = obj.get("p0").ok_or_else(|| perr(source, "p0", "missing field"))?;
    let mats = obj.get("mats").and_then(Value::as_array).ok_or_else(|| perr(source, "mats", "missing array"))?;
    let p0_cells = cells_of(source, "p0", p0)?;
    let mut mat_cells = Vec::with_capacity(mats.len());
    for (k, m) in mats.iter().enumerate() {
        let rows = m.as_array().ok_or_else(|| perr(source, format!("mats[{k}]"), "expected an array of rows"))?;
        let rows = rows
            .iter()
            .enumerate()
            .map(|(r, row)| cells_of(source, &format!("mats[{k}][{r}]"), row))
            .collect::<Result<Vec<_>, _>>()?;
        mat_cells.push(rows);
    }
    let exact = p0_cells.iter().chain(mat_cells.iter().flatten().flatten()).any(|c| matches!(c, Cell::Text(_)));
    let text_of = |c: &Cell| match c {
        Cell::Num(_, t) | Cell::Text(t) => t.clone(),
    };
    let dist = if exact {
        let cells = p0_cells.iter().map(|c| Cell::Text(text_of(c))).collect();
        dist_from_cells(source, "p0", cells)?
    } else {
        dist_from_cells(source, "p0", p0_cells)?
    };
    let fail = |e: crate::fluct::FluctError| perr(source, fluct_location(&e), e);
    match dist {
        DistInput::Exact(p0) => {
            let mut mats: Vec<Matrix<BigRational>> = Vec::new();
            for (k, m) in mat_cells.iter().enumerate() {
                let mut rows = Vec::new();
                for (r, row) in m.iter().enumerate() {
                    let parsed = row
                        .iter()
                        .enumerate()
                        .map(|(c, cell)| {
                            let t = text_of(cell);
                            parse_rational(&t).ok_or_else(|| {
                                perr(source, format!("mats[{k}][{r}][{c}]"), format!("not a rational: {t:?}"))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push(parsed);
                }
                mats.push(rows);
            }
            MarkovChainSpec::new(p0, mats).map(ChainInput::Exact).map_err(fail)
        }
        DistInput::Float(p0) => {
            let mats: Vec<Matrix> = mat_cells
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|row| row.iter().map(|c| if let Cell::Num(f, _) = c { *f } else { f64::NAN }).collect())
                        .collect()
                })
                .collect();
            MarkovChainSpec::new(p0, mats).map(ChainInput::Float).map_err(fail)
        }
    }
}

/// One real per line; blank lines and a non-numeric first line (header)
/// are skipped.
pub fn parse_samples_csv(text: &str, source: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(x) if x.is_finite() => out.push(x),
            Ok(_) => return Err(perr(source, format!("line {}", i + 1), "non-finite sample")),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(perr(source, format!("line {}", i + 1), format!("not a number: {field:?}"))),
        }
    }
    Ok(out)
}

/// `"[-2, 0, 1]"` (ascending degree) with integer, decimal or `a/b` entries.
pub fn parse_poly(text: &str, source: &str) -> Result<Vec<BigRational>, ParseError> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_err(source, e))?;
    let cells = cells_of(source, "$", &v)?;
    cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let t = match c {
                Cell::Num(_, t) | Cell::Text(t) => t,
            };
            parse_rational(t).ok_or_else(|| perr(source, format!("$[{i}]"), format!("not a rational: {t:?}")))
        })
        .collect()
}

/// Parses one rational argument such as `"1/1024"`.
pub fn parse_rational_arg(text: &str, name: &str) -> Result<BigRational, ParseError> {
    parse_rational(text).ok_or_else(|| perr(name, "$", format!("not a rational: {text:?}")))
}

/// `{"result": ..., "meta": {"seed": ..., "version": ...}}`, pretty printed
/// with a trailing newline.
pub fn envelope_json<T: Serialize>(result: &T, seed: u64) -> Result<String, serde_json::Error> {
    #[derive(Serialize)]
    struct Meta {
        seed: u64,
        version: &'static str,
    }
    #[derive(Serialize)]
    struct Envelope<'a, T: Serialize> {
        result: &'a T,
        meta: Meta,
    }
    let env = Envelope { result, meta: Meta { seed, version: env!("CARGO_PKG_VERSION") } };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

/// Headered CSV.
pub fn to_csv(headers: &[&str], rows: &[Vec<String>]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn dists() {
        assert!(matches!(parse_dist_json("[0.5, 0.5]", "p"), Ok(DistInput::Float(_))));
        match parse_dist_json(r#"["2/3", "1/6", 0.1666666666666666666]"#, "p") {
            Err(e) => assert!(e.message.contains("NotNormalized"), "{e}"),
            Ok(d) => panic!("{d:?}"),
        }
        let exact = parse_dist_json(r#"["2/3", "1/6", "1/6"]"#, "p").unwrap();
        assert_eq!(exact, DistInput::Exact(ExactDist::from_ratios(&[(2, 3), (1, 6), (1, 6)]).unwrap()));
        let e = parse_dist_json("[0.5, 0.6]", "p.json").unwrap_err();
        assert!(e.to_string().contains("NotNormalized") && e.source_name == "p.json");
        let e = parse_dist_json("[0.5,\n 0.5", "p").unwrap_err();
        assert!(e.location.starts_with("line 2"));
        // decimals within the input tolerance are renormalised
        let near = parse_dist_json("[0.3333333333, 0.3333333333, 0.3333333334]", "p").unwrap();
        assert!(matches!(near, DistInput::Float(_)));
    }

    #[test]
    fn dist_batches() {
        let rows = parse_dist_csv("0.5,0.5\n1/2,1/4,1/4\n", "b").unwrap();
        assert_eq!(rows.len(), 2);
        assert!(matches!(rows[1], DistInput::Exact(_)));
        let e = parse_dist_csv("0.5,0.5\n0.2,0.2\n", "b").unwrap_err();
        assert_eq!(e.location, "line 2");
    }

    #[test]
    fn posets() {
        let (p, labels) =
            parse_poset_json(r#"{"n": 3, "pairs": [[0, 2], [1, 2]], "labels": ["a", "b", "t"]}"#, "v").unwrap();
        assert!(p.leq(0, 2) && p.incomparable(0, 1));
        assert_eq!(labels, vec!["a", "b", "t"]);
        let e = parse_poset_json(r#"{"n": 2, "pairs": [[0, 5]]}"#, "v").unwrap_err();
        assert_eq!(e.location, "pairs[0]");
        assert!(parse_poset_json(r#"{"n": 2, "bogus": 1}"#, "v").is_err());
    }

    #[test]
    fn chains() {
        let c = parse_chain_json(r#"{"p0": [0.5, 0.5], "mats": [[[0.5, 0.5], [0.5, 0.5]]]}"#, "c").unwrap();
        assert!(matches!(c, ChainInput::Float(_)));
        let e = parse_chain_json(
            r#"{"p0": [0.5, 0.5], "mats": [[[0.5, 0.5], [0.5, 0.5]], [[0.49, 0.5], [0.49, 0.5]]]}"#,
            "c",
        )
        .unwrap_err();
        assert_eq!(e.location, "mats[1] column 0");
        assert!(e.message.contains("NotStochastic"));
        let exact =
            parse_chain_json(r#"{"p0": ["1/2", "1/2"], "mats": [[["2/3", "2/3"], ["1/3", "1/3"]]]}"#, "c").unwrap();
        match exact {
            ChainInput::Exact(spec) => assert_eq!(spec.mats[0][0][0], ratio(2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn samples_and_polys() {
        assert_eq!(parse_samples_csv("w\n0.5\n\n-1.25\n", "s").unwrap(), vec![0.5, -1.25]);
        assert_eq!(parse_samples_csv("0.5\nx\n", "s").unwrap_err().location, "line 2");
        assert_eq!(parse_poly("[-2, 0, 1]", "poly").unwrap(), vec![ratio(-2, 1), ratio(0, 1), ratio(1, 1)]);
        assert_eq!(parse_poly(r#"["-1/2", 1]"#, "poly").unwrap(), vec![ratio(-1, 2), ratio(1, 1)]);
    }

    #[test]
    fn emission() {
        let s = envelope_json(&vec![1, 2], 7).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["result"][1], 2);
        assert_eq!(to_csv(&["a", "b"], &[vec!["1".into(), "x".into()]]).unwrap(), "a,b\n1,x\n");
    }
}
