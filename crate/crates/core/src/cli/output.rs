use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Result;

/// Pretty JSON in struct field order with a trailing newline; non-finite
/// numbers become `null`.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Header plus rows of already formatted cells.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Dense matrix, one row per line, no header.
pub fn write_matrix(
    path: &Path,
    rows: usize,
    cols: usize,
    at: impl Fn(usize, usize) -> f64,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for i in 0..rows {
        let line: Vec<String> = (0..cols).map(|j| num(at(i, j))).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn inventory(dir: &Path, names: &[PathBuf]) -> Result<Vec<OutputFile>> {
    let mut out = Vec::new();
    for name in names {
        let path = dir.join(name);
        out.push(OutputFile {
            name: name.display().to_string(),
            bytes: std::fs::metadata(&path)?.len(),
            sha256: sha256_file(&path)?,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1e-300), "1e-300");
        assert_eq!(num(-2.0), "-2.0");
    }

    #[test]
    fn matrix_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_matrix(&p, 2, 2, |i, j| (i * 2 + j) as f64).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "0.0,1.0\n2.0,3.0\n");
    }
}
