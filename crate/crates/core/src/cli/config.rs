use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{FrequencyVector, FunctionSpec, Phase, Sampler};
use crate::msa::{MsaExponents, LAMBDA0_PROXY};
use crate::operator::{LatticeInterval, ModelParameters};
use crate::{Error, Result};

/// One experiment, read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda: f64,
    /// At most one of `energy`, `energies` and `energy_range` may be given;
    /// with none the energy is 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_range: Option<EnergyRange>,
    #[serde(default = "default_v")]
    pub v: FunctionSpec,
    #[serde(default = "default_w")]
    pub w: FunctionSpec,
    /// Defaults to `((√5 − 1)/2, √2 − 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dc_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dc_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Phase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
}

/// `points` equally spaced energies from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Explicit `[a, b]`; takes precedence over `half_width`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[i64; 2]>,
    /// `N` for `Λ = [−N, N]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<u64>,
    pub scales: Vec<usize>,
    pub exponents: MsaExponents,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub lambda0: f64,
    pub weight_floor: f64,
    pub lyapunov_steps: usize,
    /// Attach Lyapunov exponents to the per-vector decay table.
    pub match_lyapunov: bool,
    /// Defaults to the available parallelism; never affects numbers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            interval: None,
            half_width: None,
            scales: vec![20, 40, 80],
            exponents: MsaExponents::default(),
            budget: None,
            lambda0: LAMBDA0_PROXY,
            weight_floor: 1e-6,
            lyapunov_steps: 10_000,
            match_lyapunov: false,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

fn default_v() -> FunctionSpec {
    FunctionSpec::Builtin("cos".into())
}

fn default_w() -> FunctionSpec {
    FunctionSpec::Builtin("sin2".into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            Error::config(locate(text, e.span()), message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Field-level checks that do not need the full model.
    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if !m.lambda.is_finite() {
            return Err(Error::config("model.lambda", "must be finite"));
        }
        let given = [
            m.energy.is_some(),
            m.energies.is_some(),
            m.energy_range.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(Error::config(
                "model.energy",
                "give at most one of energy, energies, energy_range",
            ));
        }
        if let Some(r) = m.energy_range {
            if r.points == 0 || !(r.min <= r.max) || !r.min.is_finite() || !r.max.is_finite() {
                return Err(Error::config(
                    "model.energy_range",
                    "needs finite min ≤ max and points ≥ 1",
                ));
            }
        }
        if self.energies().iter().any(|e| !e.is_finite()) {
            return Err(Error::config("model.energies", "energies must be finite"));
        }
        self.frequency()?;
        m.v.build()
            .map_err(|e| Error::config("model.v", e.to_string()))?;
        m.w.build()
            .map_err(|e| Error::config("model.w", e.to_string()))?;
        if let Some(Sampler::Grid { resolution: 0 }) | Some(Sampler::MonteCarlo { points: 0, .. }) =
            m.sampler
        {
            return Err(Error::config("model.sampler", "needs at least one sample"));
        }
        let r = &self.run;
        if let Some([a, b]) = r.interval {
            if a > b {
                return Err(Error::config(
                    "run.interval",
                    format!("[{a}, {b}] is empty"),
                ));
            }
        }
        r.exponents
            .validate()
            .map_err(|e| Error::config("run.exponents", e.to_string()))?;
        if !(r.weight_floor > 0.0) {
            return Err(Error::config("run.weight_floor", "must be positive"));
        }
        if r.workers == Some(0) {
            return Err(Error::config("run.workers", "must be at least 1"));
        }
        Ok(())
    }

    pub fn frequency(&self) -> Result<FrequencyVector> {
        let d = FrequencyVector::golden_silver();
        FrequencyVector::new(
            self.model.omega.unwrap_or(d.omega),
            self.model.dc_constant.unwrap_or(d.dc_constant),
            self.model.dc_exponent.unwrap_or(d.dc_exponent),
        )
        .map_err(|e| match e {
            Error::Config { field, message } => Error::config(format!("model.{field}"), message),
            other => other,
        })
    }

    pub fn energies(&self) -> Vec<f64> {
        let m = &self.model;
        if let Some(e) = m.energy {
            vec![e]
        } else if let Some(list) = &m.energies {
            list.clone()
        } else if let Some(r) = m.energy_range {
            if r.points == 1 {
                vec![r.min]
            } else {
                let step = (r.max - r.min) / (r.points - 1) as f64;
                (0..r.points).map(|i| r.min + step * i as f64).collect()
            }
        } else {
            vec![0.0]
        }
    }

    /// Model at the first configured energy and the configured phase.
    pub fn parameters(&self) -> Result<ModelParameters> {
        let m = &self.model;
        let v =
            m.v.build()
                .map_err(|e| Error::config("model.v", e.to_string()))?;
        let w =
            m.w.build()
                .map_err(|e| Error::config("model.w", e.to_string()))?;
        ModelParameters::new(
            m.lambda,
            self.energies()[0],
            v,
            w,
            self.frequency()?,
            m.phase.unwrap_or_else(Phase::origin),
        )
        .map_err(|e| match e {
            Error::InvalidWeight(msg) => Error::config("model.w", msg),
            other => other,
        })
    }

    pub fn interval(&self) -> Result<LatticeInterval> {
        match (self.run.interval, self.run.half_width) {
            (Some([a, b]), _) => LatticeInterval::new(a, b),
            (None, Some(n)) => Ok(LatticeInterval::centered(n)),
            (None, None) => Err(Error::config(
                "run.interval",
                "set run.interval or run.half_width",
            )),
        }
    }

    pub fn sampler(&self) -> Sampler {
        self.model
            .sampler
            .unwrap_or(Sampler::Grid { resolution: 64 })
    }
}

/// Dotted path of the TOML key around a parse error, or `config`.
fn locate(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    let Some(span) = span else {
        return "config".into();
    };
    let before = &text[..span.start.min(text.len())];
    let table = before.lines().rev().find_map(|l| {
        l.trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .map(str::to_string)
    });
    let line = before.rsplit('\n').next().unwrap_or("");
    let key = line
        .split('=')
        .next()
        .map(str::trim)
        .filter(|k| !k.is_empty() && !line.trim().starts_with('['));
    match (table, key) {
        (Some(t), Some(k)) if line.contains('=') => format!("{t}.{k}"),
        (Some(t), _) => t,
        (None, Some(k)) if line.contains('=') => k.to_string(),
        _ => "config".into(),
    }
}
