use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponents shared by the multiscale pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MsaExponents {
    /// Measure exponent: exceptional sets are compared against `e^{−N^κ}`.
    pub kappa: f64,
    /// Norm exponent: good Green's functions satisfy `‖G_N‖ < e^{N^b}`.
    pub b: f64,
    /// Scale-step exponent: `N_{j+1} ≤ N_j^{1/δ²}`.
    pub delta: f64,
    /// Off-diagonal rate in `|G(m,n)| < 10 e^{−γ|m−n|}`.
    pub gamma: f64,
}

impl Default for MsaExponents {
    fn default() -> Self {
        MsaExponents {
            kappa: 0.04,
            b: 0.9,
            delta: 0.35,
            gamma: 0.5,
        }
    }
}

impl MsaExponents {
    /// `κ, b, δ ∈ (0,1)`, `2κ < b < 1`, `b > 1 − δ²`, `γ > 0`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("b", self.b), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::LadderViolation(format!(
                    "{name} = {v} must lie in (0, 1)"
                )));
            }
        }
        if !(2.0 * self.kappa < self.b) {
            return Err(Error::LadderViolation(format!(
                "need 2κ < b, got κ = {}, b = {}",
                self.kappa, self.b
            )));
        }
        if !(self.b > 1.0 - self.delta * self.delta) {
            return Err(Error::LadderViolation(format!(
                "need b > 1 − δ², got b = {}, δ = {}",
                self.b, self.delta
            )));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::LadderViolation(format!(
                "gamma = {} must be positive",
                self.gamma
            )));
        }
        Ok(())
    }

    /// `e^{−N^κ}`.
    pub fn threshold(&self, scale: usize) -> f64 {
        (-(scale as f64).powf(self.kappa)).exp()
    }

    /// Sub-interval size `M₀ = ⌈N^{δ/5}⌉ ∈ [N^{δ/5}, 2N^{δ/5}]`.
    pub fn sub_scale(&self, scale: usize) -> usize {
        ((scale as f64).powf(self.delta / 5.0).ceil() as usize).max(1)
    }

    /// Allowed number of disjoint bad sub-intervals, `N^{1−δ}`.
    pub fn bad_budget(&self, scale: usize) -> f64 {
        (scale as f64).powf(1.0 - self.delta)
    }
}

/// Increasing scales `N₀ < N₁ < …` with `N_{j+1} ≤ N_j^{1/δ²}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    pub scales: Vec<usize>,
    pub exponents: MsaExponents,
}

impl ScaleLadder {
    pub fn new(scales: Vec<usize>, exponents: MsaExponents) -> Result<Self> {
        exponents.validate()?;
        if scales.is_empty() {
            return Err(Error::LadderViolation("ladder has no scales".into()));
        }
        if scales[0] == 0 {
            return Err(Error::LadderViolation("scales must be positive".into()));
        }
        let step = 1.0 / (exponents.delta * exponents.delta);
        for w in scales.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::LadderViolation(format!(
                    "scales {} and {} are not increasing",
                    w[0], w[1]
                )));
            }
            let limit = (w[0] as f64).powf(step);
            if w[1] as f64 > limit {
                return Err(Error::LadderViolation(format!(
                    "scale {} exceeds {}^(1/δ²) = {limit:.3}",
                    w[1], w[0]
                )));
            }
        }
        Ok(ScaleLadder { scales, exponents })
    }
}
