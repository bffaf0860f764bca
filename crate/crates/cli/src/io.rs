use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "v1";
const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Anything that stops a command before it can produce a result. Always exit code 2.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(wrapfloer::Error),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<wrapfloer::Error> for CliError {
    fn from(e: wrapfloer::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn input_error(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// A table for `--format csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command produced: the JSON document, an optional table, and whether its checks passed.
pub struct Output {
    pub json: Value,
    pub table: Option<Table>,
    pub pass: bool,
}

impl Output {
    pub fn new(body: impl Serialize) -> CliResult<Self> {
        let json = serde_json::to_value(body).map_err(|e| input_error(e.to_string()))?;
        Ok(Self { json, table: None, pass: true })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

/// Reads `--input`: inline JSON if it starts with `{` or `[`, stdin for `-`, else a file path.
pub fn read_json(arg: &str) -> CliResult<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(arg).map_err(|e| input_error(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| input_error(format!("bad JSON: {e}")))
}

pub fn parse_input<T: DeserializeOwned>(input: Option<&str>, what: &str) -> CliResult<T> {
    let arg = input.ok_or_else(|| input_error(format!("this command needs --input with {what}")))?;
    serde_json::from_value(read_json(arg)?).map_err(|e| input_error(format!("bad {what}: {e}")))
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// A float cell with 12 significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        round_sig(x).to_string()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x))) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Two-column `field,value` rows for documents without a natural table.
fn flatten(prefix: &str, v: &Value, table: &mut Table) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, x)| flatten(&key(k), x, table)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, table)),
        Value::Number(n) => {
            table.push(vec![prefix.into(), n.as_f64().filter(|_| n.is_f64()).map_or(n.to_string(), num)])
        }
        Value::String(s) => table.push(vec![prefix.into(), s.clone()]),
        other => table.push(vec![prefix.into(), other.to_string()]),
    }
}

pub fn emit(out: Output, format: Format, path: Option<&Path>) -> CliResult<()> {
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("schema".into(), Value::String(SCHEMA.into()));
            match out.json {
                Value::Object(o) => doc.extend(o),
                other => {
                    doc.insert("result".into(), other);
                }
            }
            let mut doc = Value::Object(doc);
            round_value(&mut doc);
            serde_json::to_writer(&mut buf, &doc).map_err(|e| input_error(e.to_string()))?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let table = out.table.unwrap_or_else(|| {
                let mut t = Table::new(&["field", "value"]);
                flatten("", &out.json, &mut t);
                t
            });
            let mut w = csv::Writer::from_writer(&mut buf);
            let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
            w.write_record(&table.header).map_err(io_err)?;
            for row in &table.rows {
                w.write_record(row).map_err(io_err)?;
            }
            w.flush()?;
        }
    }
    match path {
        Some(p) => fs::write(p, &buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
