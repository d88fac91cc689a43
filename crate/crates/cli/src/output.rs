use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::cli::{Format, GlobalArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] dynlab::Error),
    #[error("{0}")]
    Violation(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(dynlab::Error::Invariant(_)) | CliError::Violation(_) => 3,
            CliError::Lib(dynlab::Error::TracingLeftRegion(_)) | CliError::Io { .. } => 4,
            CliError::Lib(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// A flat table, the CSV projection of a result.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Rows of a flat serializable struct, header from its field names.
    pub fn from_rows<T: Serialize>(rows: &[T]) -> Self {
        let values: Vec<Value> = rows.iter().map(|r| serde_json::to_value(r).expect("rows serialize")).collect();
        let header: Vec<String> = match values.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        let rows = values
            .iter()
            .map(|v| header.iter().map(|k| cell(&v[k.as_str()])).collect())
            .collect();
        Table { header, rows }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Result of one command: the canonical JSON document plus its CSV projection.
pub struct Artifact {
    pub name: &'static str,
    pub json: Value,
    pub table: Table,
    /// Set when the run completed but a checked property failed.
    pub violation: Option<String>,
}

impl Artifact {
    pub fn new<C: Serialize, R: Serialize>(name: &'static str, config: &C, result: &R, table: Table) -> Self {
        let json = serde_json::json!({
            "command": name,
            "config": config,
            "result": result,
        });
        Artifact {
            name,
            json,
            table,
            violation: None,
        }
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json).expect("json values serialize");
                out.push(b'\n');
                out
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header).expect("write to memory");
                for row in &self.table.rows {
                    w.write_record(row).expect("write to memory");
                }
                w.into_inner().expect("flush to memory")
            }
        }
    }
}

/// Where output goes: an explicit `--out`, a default name inside the
/// output directory, or standard output.
pub fn destination(global: &GlobalArgs, name: &str) -> Option<PathBuf> {
    let ext = match global.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    match (&global.out, &global.out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{name}.{ext}"))),
        (None, None) => None,
    }
}

pub fn emit(global: &GlobalArgs, artifact: &Artifact) -> CliResult<()> {
    let bytes = artifact.render(global.format);
    match destination(global, artifact.name) {
        Some(path) => write_file(&path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}
