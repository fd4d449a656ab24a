use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig, SCHEMA};
use crate::error::{CliError, CliResult};

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i32> for Cell {
    fn from(n: i32) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Long-format table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table { columns: columns.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (k, c) in self.columns.iter().zip(row) {
                        m.insert(k.clone(), c.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

fn header(cfg: &RunConfig) -> Value {
    json!({
        "schema": SCHEMA,
        "generator": concat!("isotriplet ", env!("CARGO_PKG_VERSION")),
        "config_hash": cfg.hash(),
        "tolerances": cfg.tolerances,
    })
}

fn create(path: &Path) -> CliResult<fs::File> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::File::create(path).map_err(|e| CliError::io(path, e))
}

/// CSV with a `#` comment header block.
pub fn write_csv(path: &Path, cfg: &RunConfig, table: &Table) -> CliResult<()> {
    let mut file = create(path)?;
    let h = header(cfg);
    let io = |e| CliError::io(path, e);
    writeln!(file, "# schema: {SCHEMA}").map_err(io)?;
    writeln!(file, "# generator: {}", h["generator"].as_str().unwrap_or_default()).map_err(io)?;
    writeln!(file, "# config_hash: {}", cfg.hash()).map_err(io)?;
    writeln!(file, "# tolerances: {}", serde_json::to_string(&cfg.tolerances)?).map_err(io)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::text))?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

/// JSON object: header fields, then `body`'s fields.
pub fn write_json(path: &Path, cfg: &RunConfig, body: Value) -> CliResult<()> {
    let mut out = header(cfg);
    let obj = out.as_object_mut().expect("header is an object");
    let mut shown = cfg.clone();
    shown.out = PathBuf::new();
    obj.insert("config".into(), serde_json::to_value(&shown)?);
    if let Value::Object(m) = body {
        obj.extend(m);
    } else {
        obj.insert("data".into(), body);
    }
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, &out)?;
    writeln!(file).map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Writes a table as `<stem>.csv` or `<stem>.json` under the output directory.
pub fn write_table(cfg: &RunConfig, stem: &str, table: &Table) -> CliResult<PathBuf> {
    let path = cfg.out.join(format!("{stem}.{}", cfg.format.ext()));
    match cfg.format {
        Format::Csv => write_csv(&path, cfg, table)?,
        Format::Json => write_json(&path, cfg, json!({ "columns": table.columns, "rows": table.to_json() }))?,
    }
    Ok(path)
}
