use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for the Hermitian pairing `ĉ_{−k} = conj(ĉ_k)`.
const HERMITIAN_TOL: f64 = 1e-12;

/// A real 1-periodic analytic function stored as finitely many Fourier
/// modes, `f(t) = Σ_k ĉ_k e^{2πikt}`.
///
/// Modes are kept Hermitian so evaluations on the real line are real up to
/// rounding. The normalization `|ĉ_k| ≤ e^{−|k|}` is tracked but not
/// imposed: see [`AnalyticTorusFunction::normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticTorusFunction {
    modes: BTreeMap<i64, Complex64>,
}

impl AnalyticTorusFunction {
    /// Builds a function from its modes. Both `k` and `−k` must be present
    /// for every nonzero mode and satisfy the Hermitian pairing.
    pub fn new(modes: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in modes {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidArgument(format!("mode {k} is not finite")));
            }
            if c != Complex64::new(0.0, 0.0) {
                map.insert(k, c);
            }
        }
        for (&k, &c) in &map {
            let partner = map.get(&-k).copied().unwrap_or_default();
            let scale = 1.0 + c.norm();
            if (partner - c.conj()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "modes are not Hermitian at k = {k}: ĉ_k = {c}, ĉ_-k = {partner}"
                )));
            }
        }
        Ok(AnalyticTorusFunction { modes: map })
    }

    /// Builds a function from a cosine/sine table: `f(t) = a₀ + Σ_k (a_k cos 2πkt + b_k sin 2πkt)`.
    pub fn from_trig(a0: f64, cos_sin: &[(i64, f64, f64)]) -> Result<Self> {
        let mut modes = vec![(0, Complex64::new(a0, 0.0))];
        for &(k, a, b) in cos_sin {
            if k <= 0 {
                return Err(Error::InvalidArgument(format!(
                    "trig mode index {k} must be positive"
                )));
            }
            // a cos + b sin = (a − ib)/2 e^{iθ} + (a + ib)/2 e^{−iθ}
            modes.push((k, Complex64::new(a / 2.0, -b / 2.0)));
            modes.push((-k, Complex64::new(a / 2.0, b / 2.0)));
        }
        Self::new(merge(modes))
    }

    pub fn constant(value: f64) -> Self {
        Self::new([(0, Complex64::new(value, 0.0))]).expect("constant is Hermitian")
    }

    /// `cos(2πt)`.
    pub fn cosine() -> Self {
        Self::from_trig(0.0, &[(1, 1.0, 0.0)]).expect("cosine is Hermitian")
    }

    /// `sin²(2πt) = ½ − ½ cos(4πt)`.
    pub fn sin_squared() -> Self {
        Self::from_trig(0.5, &[(2, -0.5, 0.0)]).expect("sin² is Hermitian")
    }

    /// `1 + cos(2πt) = 2cos²(πt)`.
    pub fn one_plus_cosine() -> Self {
        Self::from_trig(1.0, &[(1, 1.0, 0.0)]).expect("1 + cos is Hermitian")
    }

    pub fn modes(&self) -> &BTreeMap<i64, Complex64> {
        &self.modes
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.modes.get(&k).copied().unwrap_or_default()
    }

    /// Largest stored `|k|`.
    pub fn band(&self) -> u64 {
        self.modes
            .keys()
            .map(|k| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `Σ_k |ĉ_k|`, a sup-norm bound on the real line.
    pub fn sup_bound(&self) -> f64 {
        self.modes.values().map(|c| c.norm()).sum()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.modes.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Full complex synthesis `Σ ĉ_k e^{2πikt}`.
    pub fn evaluate_complex(&self, t: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|(&k, &c)| {
                let (s, co) = (TAU * (k as f64 * t).rem_euclid(1.0)).sin_cos();
                c * Complex64::new(co, s)
            })
            .sum()
    }

    /// Real value of the synthesis at `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        let z = self.evaluate_complex(t);
        debug_assert!(z.im.abs() < 1e-10 * (1.0 + self.sup_bound()));
        z.re
    }

    /// `order`-th derivative at `t`.
    pub fn derivative(&self, t: f64, order: u32) -> f64 {
        self.modes
            .iter()
            .map(|(&k, &c)| {
                let (s, co) = (TAU * (k as f64 * t).rem_euclid(1.0)).sin_cos();
                let factor = Complex64::new(0.0, TAU * k as f64).powu(order);
                (c * factor * Complex64::new(co, s)).re
            })
            .sum()
    }

    /// Whether every stored mode obeys `|ĉ_k| ≤ e^{−|k|}`.
    pub fn is_normalized(&self) -> bool {
        self.normalization_excess() <= 1.0
    }

    /// `max_k |ĉ_k| e^{|k|}`; at most 1 for normalized functions.
    pub fn normalization_excess(&self) -> f64 {
        self.modes
            .iter()
            .map(|(&k, c)| c.norm() * (k.unsigned_abs() as f64).exp())
            .fold(0.0, f64::max)
    }

    /// Returns a rescaled copy obeying `|ĉ_k| ≤ e^{−|k|}` together with the
    /// factor applied. Callers that rescale `v` must absorb the factor into
    /// the coupling to keep the same operator.
    pub fn normalized(&self) -> (Self, f64) {
        let excess = self.normalization_excess();
        if excess <= 1.0 {
            return (self.clone(), 1.0);
        }
        let factor = 1.0 / excess;
        log::warn!("torus function violates |ĉ_k| ≤ e^(-|k|); rescaling by {factor:.6}");
        (self.scaled(factor), factor)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        AnalyticTorusFunction {
            modes: self
                .modes
                .iter()
                .map(|(&k, &c)| (k, c * factor))
                .filter(|(_, c)| c.norm() > 0.0)
                .collect(),
        }
    }

    /// `α f + β g`.
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Self {
        let mut modes: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&k, &c) in &f.modes {
            *modes.entry(k).or_default() += c * alpha;
        }
        for (&k, &c) in &g.modes {
            *modes.entry(k).or_default() += c * beta;
        }
        modes.retain(|_, c| c.norm() > 0.0);
        AnalyticTorusFunction { modes }
    }

    /// Keeps only the modes with `|k| ≤ band`.
    pub fn truncated(&self, band: u64) -> Self {
        AnalyticTorusFunction {
            modes: self
                .modes
                .iter()
                .filter(|(k, _)| k.unsigned_abs() <= band)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }
}

fn merge(modes: Vec<(i64, Complex64)>) -> Vec<(i64, Complex64)> {
    let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (k, c) in modes {
        *map.entry(k).or_default() += c;
    }
    map.into_iter().collect()
}

/// Trigonometric polynomial obtained by cutting the Fourier series.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFunction {
    pub polynomial: AnalyticTorusFunction,
    pub band: u64,
    /// Certified sup-norm bound `Σ_{|k| > band} |ĉ_k|` over the stored modes.
    pub error_bound: f64,
    /// `e^{−N³}`, the accuracy the degree-`N⁴` substitution aims for.
    pub target: f64,
    pub meets_target: bool,
}

/// Degree-`min(N⁴, cap)` trigonometric polynomial approximation of `f`.
pub fn fourier_truncate(
    f: &AnalyticTorusFunction,
    scale: u64,
    cap: Option<u64>,
) -> Result<TruncatedFunction> {
    if scale < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation scale must be ≥ 2, got {scale}"
        )));
    }
    let degree = scale.saturating_pow(4);
    let band = cap.map_or(degree, |c| c.min(degree));
    let error_bound: f64 = f
        .modes
        .iter()
        .filter(|(k, _)| k.unsigned_abs() > band)
        .map(|(_, c)| c.norm())
        .sum();
    let target = (-(scale as f64).powi(3)).exp();
    Ok(TruncatedFunction {
        polynomial: f.truncated(band),
        band,
        error_bound,
        target,
        meets_target: error_bound <= target,
    })
}

/// Declarative description of a torus function as it appears in run
/// configurations: a builtin name, a constant, or an explicit mode table
/// `{k = [re, im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Builtin(String),
    Constant { constant: f64 },
    Modes { modes: BTreeMap<String, [f64; 2]> },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<AnalyticTorusFunction> {
        match self {
            FunctionSpec::Builtin(name) => match name.as_str() {
                "cos" => Ok(AnalyticTorusFunction::cosine()),
                "sin2" => Ok(AnalyticTorusFunction::sin_squared()),
                "const" => Ok(AnalyticTorusFunction::constant(1.0)),
                "one_plus_cos" => Ok(AnalyticTorusFunction::one_plus_cosine()),
                other => Err(Error::InvalidArgument(format!(
                    "unknown builtin function `{other}` (expected cos, sin2, const, one_plus_cos)"
                ))),
            },
            FunctionSpec::Constant { constant } => Ok(AnalyticTorusFunction::constant(*constant)),
            FunctionSpec::Modes { modes } => {
                let mut parsed = Vec::with_capacity(modes.len());
                for (key, [re, im]) in modes {
                    let k: i64 = key.trim().parse().map_err(|_| {
                        Error::InvalidArgument(format!("mode key `{key}` is not an integer"))
                    })?;
                    parsed.push((k, Complex64::new(*re, *im)));
                }
                AnalyticTorusFunction::new(parsed)
            }
        }
    }
}
