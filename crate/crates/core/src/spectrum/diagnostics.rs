use serde::Serialize;

use crate::greens::{fit_log_decay, fit_log_decay_above, DecayFit};
use crate::linalg::LogVector;
use crate::{Error, Result};

/// Lower bound on the decay rate of generalized eigenvectors.
pub const DECAY_RATE_FLOOR: f64 = 1.0 / 18.0;
/// Sites within this distance of the center are excluded from decay fits.
pub const CORE_RADIUS: usize = 5;
const NORM_TOL: f64 = 1e-10;

/// `Σ|ψ(n)|⁴` of an `ℓ²`-normalized vector.
pub fn ipr(psi: &[f64]) -> Result<f64> {
    let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(psi.iter().map(|x| x.powi(4)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvectorDecay {
    pub fit: DecayFit,
    /// `fit.rate ≥ DECAY_RATE_FLOOR`.
    pub above_floor: bool,
    pub lyapunov: Option<f64>,
    /// `fit.rate / lyapunov`.
    pub lyapunov_ratio: Option<f64>,
}

/// Fits `log|ψ(n)|` against `|n − center|` for `|n − center| > CORE_RADIUS`;
/// `center` is an index into `psi`.
pub fn decay_rate_of_eigenvector(
    psi: &[f64],
    center: usize,
    lyapunov: Option<f64>,
) -> Result<EigenvectorDecay> {
    check_center(center, psi.len())?;
    let samples = psi
        .iter()
        .enumerate()
        .map(|(i, x)| (i.abs_diff(center) as f64, x.abs().ln()));
    Ok(summarize(
        fit_log_decay(samples, CORE_RADIUS as f64)?,
        lyapunov,
    ))
}

/// Same fit on a log-form vector, with no magnitude floor.
pub fn decay_of_log_vector(psi: &LogVector, center: usize) -> Result<DecayFit> {
    check_center(center, psi.len())?;
    let samples = psi
        .log_abs
        .iter()
        .enumerate()
        .map(|(i, &l)| (i.abs_diff(center) as f64, l));
    fit_log_decay_above(samples, CORE_RADIUS as f64, f64::NEG_INFINITY)
}

/// Attaches the floor comparison and the Lyapunov ratio to a fit.
pub fn summarize(fit: DecayFit, lyapunov: Option<f64>) -> EigenvectorDecay {
    EigenvectorDecay {
        fit,
        above_floor: fit.rate >= DECAY_RATE_FLOOR,
        lyapunov,
        lyapunov_ratio: lyapunov.map(|g| fit.rate / g),
    }
}

fn check_center(center: usize, len: usize) -> Result<()> {
    if center >= len {
        return Err(Error::InvalidArgument(format!(
            "center index {center} outside a vector of length {len}"
        )));
    }
    Ok(())
}
