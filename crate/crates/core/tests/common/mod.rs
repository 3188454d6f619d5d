#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use quasiloc::model::{AnalyticTorusFunction, FrequencyVector, Phase};
use quasiloc::operator::ModelParameters;

/// `λ = 10⁴`, `v = cos 2πx`, `w = sin² 2πy`, golden/silver `ω`.
pub fn calibration(energy: f64, phase: Phase) -> ModelParameters {
    ModelParameters::new(
        1e4,
        energy,
        AnalyticTorusFunction::cosine(),
        AnalyticTorusFunction::sin_squared(),
        FrequencyVector::golden_silver(),
        phase,
    )
    .unwrap()
}

pub fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// Runs the binary and returns `(exit code, stderr)`.
pub fn run_cli(command: &str, config: &Path, out: &Path) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_quasiloc"))
        .args([command, "--config"])
        .arg(config)
        .arg("--output")
        .arg(out)
        .output()
        .unwrap();
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
