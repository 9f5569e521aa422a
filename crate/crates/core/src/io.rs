//! Serialization: matrices as JSON rows of `[re, im]` pairs, series as CSV.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classical::Trajectory;
use crate::dynamics::Sample;
use crate::error::{Error, Result};
use crate::gns::GnsResult;
use crate::linalg::{CMatrix, CVector};
use crate::spectral::SpectralMeasure;
use crate::weyl::{Grid1D, WaveFunction};

/// `Complex64` as `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Square or rectangular `CMatrix` as a row-major list of rows of `[re, im]`.
pub mod matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        rows_of(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let v = Value::deserialize(d)?;
        matrix_from_value(&v).map_err(serde::de::Error::custom)
    }
}

/// `CVector` as a list of `[re, im]`.
pub mod vector {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CVector, D::Error> {
        let v = Value::deserialize(d)?;
        vector_from_value(&v).map_err(serde::de::Error::custom)
    }
}

fn rows_of(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    json!(rows_of(m))
}

pub fn vector_to_value(v: &CVector) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn pair_from_value(v: &Value, at: impl Fn() -> String) -> Result<Complex64> {
    let bad = || {
        Error::Parse(format!(
            "{}: expected a [re, im] pair of finite numbers, found {v}",
            at()
        ))
    };
    let arr = v.as_array().ok_or_else(bad)?;
    if arr.len() != 2 {
        return Err(bad());
    }
    let re = arr[0].as_f64().filter(|x| x.is_finite()).ok_or_else(bad)?;
    let im = arr[1].as_f64().filter(|x| x.is_finite()).ok_or_else(bad)?;
    Ok(Complex64::new(re, im))
}

/// Parses rows of `[re, im]` pairs; errors name the offending row and column.
pub fn matrix_from_value(v: &Value) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("matrix: expected a list of rows, found {v}")))?;
    if rows.is_empty() {
        return Err(Error::Parse("matrix: no rows".into()));
    }
    let mut cols = None;
    let mut data = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("matrix row {r}: expected a list of [re, im] pairs")))?;
        match cols {
            None => cols = Some(entries.len()),
            Some(c) if c != entries.len() => {
                return Err(Error::Parse(format!(
                    "matrix row {r}: has {} entries, row 0 has {c}",
                    entries.len()
                )))
            }
            _ => {}
        }
        for (c, e) in entries.iter().enumerate() {
            data.push(pair_from_value(e, || format!("matrix row {r}, column {c}"))?);
        }
    }
    let cols = cols.unwrap_or(0);
    if cols == 0 {
        return Err(Error::Parse("matrix: empty rows".into()));
    }
    Ok(CMatrix::from_row_slice(rows.len(), cols, &data))
}

pub fn vector_from_value(v: &Value) -> Result<CVector> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("vector: expected a list of [re, im] pairs, found {v}")))?;
    let data = items
        .iter()
        .enumerate()
        .map(|(i, e)| pair_from_value(e, || format!("vector entry {i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(data))
}

/// Parses matrix JSON text; syntax errors carry line and column.
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("matrix JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    matrix_from_value(&v)
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    matrix_to_value(m).to_string()
}

/// `[{"lambda": [re, im], "weight": w}, …]`.
pub fn spectral_measure_to_json(m: &SpectralMeasure) -> String {
    serde_json::to_string(&m.atoms).expect("atoms serialize")
}

pub fn gns_result_to_value(g: &GnsResult) -> Value {
    json!({
        "hilbert_dim": g.hilbert_dim,
        "representation": g.rep.iter().map(matrix_to_value).collect::<Vec<_>>(),
        "cyclic_vector": vector_to_value(&g.cyclic_vector),
        "quotient_map": matrix_to_value(&g.quotient_map),
        "gram_rank_tol": g.gram_rank_tol,
    })
}

/// Path of the JSON sidecar written next to a data file (`data.csv` → `data.csv.json`).
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct WaveFunctionHeader {
    grid: Grid1D,
}

/// CSV `x,re,im` plus a sidecar `{"grid": {"N", "L"}}`.
pub fn write_wavefunction(path: &Path, psi: &WaveFunction) -> Result<()> {
    let grid = psi.grid();
    let header = ["x", "re", "im"].map(String::from);
    write_rows(
        path,
        &header,
        psi.samples()
            .iter()
            .enumerate()
            .map(|(j, z)| vec![grid.x(j), z.re, z.im]),
    )?;
    let meta = serde_json::to_string_pretty(&WaveFunctionHeader { grid })?;
    std::fs::write(sidecar_path(path), meta)?;
    Ok(())
}

pub fn read_wavefunction(path: &Path) -> Result<WaveFunction> {
    let meta = std::fs::read_to_string(sidecar_path(path))?;
    let header: WaveFunctionHeader = serde_json::from_str(&meta)?;
    let grid = header.grid;
    Grid1D::new(grid.len(), grid.length())?;
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let mut samples = Vec::with_capacity(grid.len());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let field = |k: usize| -> Result<f64> {
            rec.get(k).and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| {
                Error::Parse(format!(
                    "{}: data row {}, column {k}: not a number",
                    path.display(),
                    i + 1
                ))
            })
        };
        samples.push(Complex64::new(field(1)?, field(2)?));
    }
    WaveFunction::new(grid, samples)
}

/// CSV `t,q1..qn,p1..pn,H`.
pub fn write_classical_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let dof = traj.points.first().map_or(0, |z| z.q.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=dof).map(|i| format!("q{i}")));
    header.extend((1..=dof).map(|i| format!("p{i}")));
    header.push("H".into());
    let rows = traj
        .times
        .iter()
        .zip(&traj.points)
        .zip(&traj.energies)
        .map(|((t, z), e)| {
            let mut row = vec![*t];
            row.extend(&z.q);
            row.extend(&z.p);
            row.push(*e);
            row
        });
    write_rows(path, &header, rows)
}

/// CSV `t,X,P,H,norm`.
pub fn write_samples(path: &Path, samples: &[Sample]) -> Result<()> {
    let header = ["t", "X", "P", "H", "norm"].map(String::from);
    write_rows(
        path,
        &header,
        samples.iter().map(|s| vec![s.t, s.mean_x, s.mean_p, s.energy, s.norm]),
    )
}

/// Generic numeric CSV with the given column names.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_rows(path, &header, rows.iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{I, ONE};

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, I, -I, ONE * 2.5]);
        let text = matrix_to_json(&m);
        assert_eq!(text, "[[[1.0,0.0],[0.0,1.0]],[[-0.0,-1.0],[2.5,0.0]]]");
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }

    #[test]
    fn matrix_parse_diagnostics() {
        let e = parse_matrix("[[[1,0],[0,0]],\n [[0,0]]]").unwrap_err().to_string();
        assert!(e.contains("row 1"), "{e}");
        let e = parse_matrix("[[[1,0],[0,\"x\"]]]").unwrap_err().to_string();
        assert!(e.contains("row 0, column 1"), "{e}");
        let e = parse_matrix("[[[1,0]],\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(matches!(parse_matrix("[]"), Err(Error::Parse(_))));
    }

    #[test]
    fn wavefunction_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.csv");
        let grid = Grid1D::new(16, 8.0).unwrap();
        let psi = WaveFunction::gaussian(grid, 0.3, -1.2, 0.9).unwrap();
        write_wavefunction(&path, &psi).unwrap();
        let back = read_wavefunction(&path).unwrap();
        assert_eq!(back, psi);
        let meta: Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&path)).unwrap()).unwrap();
        assert_eq!(meta["grid"]["N"], 16);
        assert_eq!(meta["grid"]["L"], 8.0);
    }
}
