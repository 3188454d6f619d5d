use serde::Serialize;

use super::matrix::GreensMatrix;
use crate::{Error, Result};

/// Magnitudes below this are excluded from log fits.
pub const FIT_FLOOR: f64 = 1e-300;
/// A fit is reliable when its rate is positive and `r² ≥ RELIABLE_R2`.
pub const RELIABLE_R2: f64 = 0.9;

/// `log|f(d)| ≈ log â − γ̂ d` fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    /// Largest absolute deviation in log space.
    pub residual: f64,
    pub r_squared: f64,
    /// Distances `≤ cutoff` are outside the fit region.
    pub cutoff: f64,
    pub points: usize,
    /// Points dropped for lying below [`FIT_FLOOR`].
    pub below_floor: usize,
    pub reliable: bool,
}

/// Least-squares line through `(distance, log magnitude)` pairs with
/// `distance > cutoff`; `log_magnitude` values below `ln FIT_FLOOR` are dropped.
pub fn fit_log_decay(
    samples: impl IntoIterator<Item = (f64, f64)>,
    cutoff: f64,
) -> Result<DecayFit> {
    fit_log_decay_above(samples, cutoff, FIT_FLOOR.ln())
}

/// As [`fit_log_decay`] with an explicit log floor; pass `f64::NEG_INFINITY`
/// for samples that never passed through `f64` magnitudes.
pub fn fit_log_decay_above(
    samples: impl IntoIterator<Item = (f64, f64)>,
    cutoff: f64,
    floor: f64,
) -> Result<DecayFit> {
    let mut pts = Vec::new();
    let mut below_floor = 0;
    for (d, l) in samples {
        if d <= cutoff {
            continue;
        }
        if !(l >= floor && l > f64::NEG_INFINITY) {
            below_floor += 1;
            continue;
        }
        pts.push((d, l));
    }
    if pts.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "{} admissible points beyond distance {cutoff} ({below_floor} below the floor)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(
            "all admissible points share one distance".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    let r_squared = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    let rate = -slope;
    Ok(DecayFit {
        rate,
        prefactor: intercept.exp(),
        residual,
        r_squared,
        cutoff,
        points: pts.len(),
        below_floor,
        reliable: rate > 0.0 && r_squared >= RELIABLE_R2,
    })
}

/// Off-diagonal decay of `G` over `|m−n| > |Λ|/10`.
pub fn decay_fit(g: &GreensMatrix) -> Result<DecayFit> {
    let n = g.size();
    let cutoff = n as f64 / 10.0;
    let samples = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    fit_log_decay(
        samples.map(|(i, j)| ((j - i) as f64, g.entries[(i, j)].abs().ln())),
        cutoff,
    )
}
