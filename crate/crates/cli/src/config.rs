use std::path::Path;

use serde::de::DeserializeOwned;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Raw config text, its SHA-256 and the parsed value.
pub struct Loaded<T> {
    pub value: T,
    pub hash: String,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<Loaded<T>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    let value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Loaded { value, hash })
}

pub fn require(ok: bool, field: &str, msg: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("field '{field}': {msg}")))
    }
}

pub fn matrix_field(v: &serde_json::Value, field: &str) -> CliResult<qalgebra::CMatrix> {
    qalgebra::io::matrix_from_value(v).map_err(|e| CliError::Config(format!("field '{field}': {e}")))
}

pub fn vector_field(v: &serde_json::Value, field: &str) -> CliResult<qalgebra::CVector> {
    qalgebra::io::vector_from_value(v).map_err(|e| CliError::Config(format!("field '{field}': {e}")))
}
