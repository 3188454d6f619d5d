use serde::{Deserialize, Serialize};

use super::weight::torus_distance;
use crate::{Error, Result};

/// Rotation vector `ω = (ω₁, ω₂)` with the Diophantine constants it is
/// expected to satisfy, `‖l·ω‖ > c₀′ |l|^{−A}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector {
    pub omega: [f64; 2],
    pub dc_constant: f64,
    pub dc_exponent: f64,
}

impl FrequencyVector {
    pub fn new(omega: [f64; 2], dc_constant: f64, dc_exponent: f64) -> Result<Self> {
        for (i, &w) in omega.iter().enumerate() {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::config(
                    format!("omega[{i}]"),
                    format!("{w} is outside (0, 1)"),
                ));
            }
        }
        if !(dc_constant > 0.0 && dc_constant.is_finite()) {
            return Err(Error::config(
                "dc_constant",
                format!("{dc_constant} must be positive"),
            ));
        }
        if !(dc_exponent >= 3.0 && dc_exponent.is_finite()) {
            return Err(Error::config(
                "dc_exponent",
                format!("{dc_exponent} must be ≥ 3"),
            ));
        }
        Ok(FrequencyVector {
            omega,
            dc_constant,
            dc_exponent,
        })
    }

    /// `ω = ((√5 − 1)/2, √2 − 1)` with `A = 3`.
    pub fn golden_silver() -> Self {
        FrequencyVector {
            omega: [(5f64.sqrt() - 1.0) / 2.0, 2f64.sqrt() - 1.0],
            dc_constant: 1e-3,
            dc_exponent: 3.0,
        }
    }

    /// Same rotation without range checks, for rational test frequencies
    /// such as `(1/2, 1/2)`.
    pub fn unchecked(omega: [f64; 2]) -> Self {
        FrequencyVector {
            omega,
            dc_constant: 1e-3,
            dc_exponent: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiophantineMargin {
    /// Minimizing `l`, first found in shell order.
    pub worst: [i64; 2],
    /// `min_{0<|l|≤L} ‖l·ω‖ · |l|^A` with `|l| = |l₁| + |l₂|`.
    pub margin: f64,
    pub radius: u64,
    /// `margin > c₀′`.
    pub certified: bool,
}

/// Exhaustive scan of `0 < |l₁| + |l₂| ≤ L`, one representative per `±l`.
pub fn diophantine_margin(omega: &FrequencyVector, radius: u64) -> Result<DiophantineMargin> {
    if radius == 0 {
        return Err(Error::InvalidArgument(
            "Diophantine radius must be ≥ 1".into(),
        ));
    }
    let [w1, w2] = omega.omega;
    let a = omega.dc_exponent;
    let mut best = DiophantineMargin {
        worst: [0, 0],
        margin: f64::INFINITY,
        radius,
        certified: false,
    };
    for s in 1..=radius as i64 {
        let weight = (s as f64).powf(a);
        let mut visit = |l1: i64, l2: i64| {
            let value = torus_distance(l1 as f64 * w1 + l2 as f64 * w2, 0.0) * weight;
            if value < best.margin {
                best.margin = value;
                best.worst = [l1, l2];
            }
        };
        for l1 in 1..=s {
            let l2 = s - l1;
            visit(l1, l2);
            if l2 > 0 {
                visit(l1, -l2);
            }
        }
        visit(0, s);
    }
    best.certified = best.margin > omega.dc_constant;
    Ok(best)
}

/// `min_{0<|k|≤K, k≠−k₀} ‖y₀ + (k₀+k)ω₂ − y_i‖ · |k₀+k|^A` over the weight
/// zeros `y_i`: the margin of the orbit of `y₀` against the weight zeros.
pub fn zero_avoidance_margin(
    y0: f64,
    omega2: f64,
    zeros: &[f64],
    k0: i64,
    radius: u64,
    exponent: f64,
) -> f64 {
    let mut margin = f64::INFINITY;
    let r = radius as i64;
    for k in -r..=r {
        let shift = k0 + k;
        if k == 0 || shift == 0 {
            continue;
        }
        let y = super::phase::rotate(y0, omega2, shift);
        for &z in zeros {
            margin =
                margin.min(torus_distance(y, z) * (shift.unsigned_abs() as f64).powf(exponent));
        }
    }
    margin
}
