use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    UInt(u64),
    Float(f64),
    Str(String),
    Bool(bool),
    Floats(Vec<f64>),
    UInts(Vec<u64>),
}

impl Field {
    fn to_json(&self) -> Value {
        match self {
            Field::Int(x) => json!(x),
            Field::UInt(x) => json!(x),
            Field::Float(x) => json!(x),
            Field::Str(s) => json!(s),
            Field::Bool(b) => json!(b),
            Field::Floats(v) => json!(v),
            Field::UInts(v) => json!(v),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Int(x) => write!(f, "{x}"),
            Field::UInt(x) => write!(f, "{x}"),
            Field::Float(x) => write!(f, "{x}"),
            Field::Str(s) => f.write_str(s),
            Field::Bool(b) => write!(f, "{b}"),
            Field::Floats(_) | Field::UInts(_) => f.write_str(&self.to_json().to_string()),
        }
    }
}

macro_rules! field_from {
    ($($t:ty => $variant:ident as $cast:ty),* $(,)?) => {
        $(impl From<$t> for Field {
            fn from(x: $t) -> Self {
                Field::$variant(x as $cast)
            }
        })*
    };
}

field_from!(i64 => Int as i64, i32 => Int as i64, u64 => UInt as u64, u32 => UInt as u64,
    usize => UInt as u64, f64 => Float as f64);

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Str(s)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Str(s.to_owned())
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field::Floats(v)
    }
}

impl From<Vec<u64>> for Field {
    fn from(v: Vec<u64>) -> Self {
        Field::UInts(v)
    }
}

/// Result of one experiment. Every record ends with the `config_id` of the
/// configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub experiment: String,
    pub config_id: String,
    pub passed: bool,
    pub parameters: Vec<(String, Field)>,
    pub summary: Vec<(String, Field)>,
    columns: Vec<String>,
    records: Vec<Vec<Field>>,
}

impl EvalReport {
    pub fn new(experiment: &str, config_id: &str, columns: &[&str]) -> Self {
        let mut columns: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        columns.push("config_id".into());
        Self {
            experiment: experiment.into(),
            config_id: config_id.into(),
            passed: true,
            parameters: Vec::new(),
            summary: Vec::new(),
            columns,
            records: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Field>) {
        self.parameters.push((key.into(), value.into()));
    }

    pub fn stat(&mut self, key: &str, value: impl Into<Field>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn get_stat(&self, key: &str) -> Option<&Field> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn push(&mut self, mut row: Vec<Field>) {
        assert_eq!(row.len() + 1, self.columns.len(), "record width does not match columns");
        row.push(Field::Str(self.config_id.clone()));
        self.records.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn records(&self) -> &[Vec<Field>] {
        &self.records
    }

    /// Values of one column across all records.
    pub fn column(&self, name: &str) -> Option<Vec<&Field>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.records.iter().map(|r| &r[idx]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnsupportedFormat(other.into())),
        }
    }
}

fn object(pairs: &[(String, Field)]) -> Value {
    Value::Object(pairs.iter().map(|(k, v)| (k.clone(), v.to_json())).collect::<Map<_, _>>())
}

pub fn report_emit(report: &EvalReport, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let records: Vec<Value> = report
                .records
                .iter()
                .map(|row| {
                    Value::Object(
                        report.columns.iter().cloned().zip(row.iter().map(Field::to_json)).collect(),
                    )
                })
                .collect();
            let doc = json!({
                "experiment": report.experiment,
                "config_id": report.config_id,
                "passed": report.passed,
                "parameters": object(&report.parameters),
                "summary": object(&report.summary),
                "columns": report.columns,
                "records": records,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Experiment(e.to_string());
            w.write_record(&report.columns).map_err(io)?;
            for row in &report.records {
                w.write_record(row.iter().map(|f| f.to_string())).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Experiment(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid() {
        let r = EvalReport::new("empty", "00", &["a"]);
        let json: Value = serde_json::from_str(&report_emit(&r, Format::Json).unwrap()).unwrap();
        assert_eq!(json["records"].as_array().unwrap().len(), 0);
        assert_eq!(report_emit(&r, Format::Csv).unwrap(), "a,config_id\n");
    }

    #[test]
    fn stable_field_order() {
        let mut r = EvalReport::new("x", "abc", &["message_id", "hamming"]);
        r.param("repeats", 2u64);
        r.stat("max", 0u64);
        r.push(vec![0usize.into(), 0u32.into()]);
        let text = report_emit(&r, Format::Json).unwrap();
        let keys = ["\"experiment\"", "\"config_id\"", "\"passed\"", "\"parameters\"", "\"summary\""];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(report_emit(&r, Format::Csv).unwrap(), "message_id,hamming,config_id\n0,0,abc\n");
    }

    #[test]
    fn csv_quotes_awkward_text() {
        let mut r = EvalReport::new("x", "id", &["message"]);
        r.push(vec!["a,\"b\"".into()]);
        assert_eq!(report_emit(&r, Format::Csv).unwrap(), "message,config_id\n\"a,\"\"b\"\"\",id\n");
    }

    #[test]
    fn unsupported_format() {
        assert!(matches!("xml".parse::<Format>(), Err(Error::UnsupportedFormat(_))));
    }
}
