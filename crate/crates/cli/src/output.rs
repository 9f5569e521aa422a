use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qalgebra::io::{sidecar_path, write_table, write_wavefunction};
use qalgebra::weyl::WaveFunction;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// One contracted check: `value` compared against `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Default, Clone, Serialize)]
pub struct Checks(Vec<Check>);

impl Checks {
    pub fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let passed = value <= tolerance;
        self.0.push(Check {
            name: name.into(),
            value,
            tolerance,
            passed,
        });
    }

    pub fn below(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let passed = value < tolerance;
        self.0.push(Check {
            name: name.into(),
            value,
            tolerance,
            passed,
        });
    }

    pub fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        let passed = value >= bound;
        self.0.push(Check {
            name: name.into(),
            value,
            tolerance: bound,
            passed,
        });
    }

    pub fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push(Check {
            name: name.into(),
            value: ok as u8 as f64,
            tolerance: 1.0,
            passed: ok,
        });
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.0.iter().find(|c| !c.passed)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(&self.0).expect("checks serialize")
    }
}

enum Payload {
    Json(Value),
    Csv { header: Vec<String>, rows: Vec<Vec<f64>> },
    Wave(WaveFunction),
}

/// Output files collected during a run and written together at the end.
pub struct Outputs {
    files: Vec<(String, Payload, Value)>,
    tolerances: BTreeMap<String, f64>,
}

/// Run identity stamped into every sidecar.
pub struct Stamp<'a> {
    pub command: &'a str,
    pub config_hash: &'a str,
    pub seed: u64,
}

impl Outputs {
    pub fn new() -> Self {
        Self {
            files: Vec::new(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) -> f64 {
        self.tolerances.insert(name.to_string(), value);
        value
    }

    pub fn json(&mut self, name: &str, value: Value) {
        self.files.push((name.to_string(), Payload::Json(value), json!({})));
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<f64>>) {
        let header = header.iter().map(|s| s.to_string()).collect();
        self.files
            .push((name.to_string(), Payload::Csv { header, rows }, json!({})));
    }

    pub fn wavefunction(&mut self, name: &str, psi: WaveFunction) {
        let grid = json!({ "grid": psi.grid() });
        self.files.push((name.to_string(), Payload::Wave(psi), grid));
    }

    /// Writes every file plus its sidecar; returns the paths written.
    pub fn write(self, dir: &Path, stamp: &Stamp) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, payload, extra) in self.files {
            let path = dir.join(&name);
            match payload {
                Payload::Json(v) => write_json(&path, &v)?,
                Payload::Csv { header, rows } => {
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    write_table(&path, &header, &rows)?
                }
                Payload::Wave(psi) => write_wavefunction(&path, &psi)?,
            }
            let mut side = json!({
                "command": stamp.command,
                "config_hash": stamp.config_hash,
                "seed": stamp.seed,
                "tolerances": self.tolerances,
            });
            if let (Value::Object(s), Value::Object(e)) = (&mut side, extra) {
                s.extend(e);
            }
            write_json(&sidecar_path(&path), &side)?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON value serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
