use serde::{Deserialize, Serialize};

use super::ladder::MsaExponents;
use crate::greens::{greens_of, verify_goodness, GoodnessCriteria, GoodnessVerdict};
use crate::operator::{scaled_h, LatticeInterval, ModelParameters, Regime};
use crate::{Error, Result};

/// Default stand-in for the unknown coupling threshold `λ₀(v, w)`.
pub const LAMBDA0_PROXY: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialScaleVerdict {
    pub regime: Regime,
    pub scale: usize,
    /// `e^{−N^{4κ/3}}`.
    pub threshold: f64,
    /// `min_{|n|≤N}` of the normalized diagonal, `|v − (E/λ)w|` or `|(λ/E)v − w|`.
    pub min_diagonal: f64,
    /// Every normalized diagonal entry clears the threshold.
    pub escapes: bool,
    /// Bounds on the normalized Green's function: `‖G̃‖ < e^{N^b}` and
    /// `|G̃(m,n)| < 10 e^{−|m−n|}` for `|m−n| > N/10`; `None` when singular.
    pub verdict: Option<GoodnessVerdict>,
}

impl InitialScaleVerdict {
    /// Escaping phases must also be good.
    pub fn consistent(&self) -> bool {
        !self.escapes || self.verdict.is_some_and(|v| v.is_good())
    }
}

/// Picks the regime for `(λ, E)` and checks `N` against its window:
/// `|E| ≤ |λ|` needs `N ≤ (log|λ|)^{1/(2κ)}`; otherwise the unit interval
/// around `E` must satisfy `d_I = |E| − ½ ≥ |λ|` and `N ≤ (log d_I)^{1/(2κ)}`.
pub fn regime_for(
    lambda: f64,
    energy: f64,
    scale: usize,
    kappa: f64,
    lambda0: f64,
) -> Result<Regime> {
    if !(lambda.abs() >= lambda0) {
        return Err(Error::RegimeWindow(format!(
            "|λ| = {} is below λ₀ = {lambda0}",
            lambda.abs()
        )));
    }
    let (regime, base) = if energy.abs() <= lambda.abs() {
        (Regime::Coupling, lambda.abs())
    } else {
        let d = energy.abs() - 0.5;
        if d < lambda.abs() {
            return Err(Error::RegimeWindow(format!(
                "energy {energy} lies between the two regimes (d_I = {d} < |λ|)"
            )));
        }
        (Regime::Energy, d)
    };
    let window = base.ln().powf(1.0 / (2.0 * kappa));
    if scale as f64 > window {
        return Err(Error::RegimeWindow(format!(
            "scale {scale} exceeds the regime window {window:.3e}"
        )));
    }
    Ok(regime)
}

/// Initial-scale dichotomy at one phase: either some normalized diagonal
/// entry on `[−N, N]` falls below `e^{−N^{4κ/3}}`, or `G̃_N` is good.
pub fn initial_scale_check(
    p: &ModelParameters,
    scale: usize,
    exponents: &MsaExponents,
    lambda0: f64,
) -> Result<InitialScaleVerdict> {
    let regime = regime_for(p.lambda, p.energy, scale, exponents.kappa, lambda0)?;
    let interval = LatticeInterval::centered(scale as u64);
    let h = scaled_h(p, interval, regime)?;
    let threshold = (-(scale as f64).powf(4.0 * exponents.kappa / 3.0)).exp();
    let min_diagonal = h.diagonal.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    let criteria = GoodnessCriteria::ldt(scale as f64, exponents.b, 1.0);
    let verdict = match greens_of(&h, interval) {
        Ok(g) => Some(verify_goodness(&g, &criteria)),
        Err(Error::Singular { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(InitialScaleVerdict {
        regime,
        scale,
        threshold,
        min_diagonal,
        escapes: min_diagonal >= threshold,
        verdict,
    })
}
