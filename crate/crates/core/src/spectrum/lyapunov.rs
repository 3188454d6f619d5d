use serde::Serialize;

use crate::operator::ModelParameters;
use crate::{Error, Result};

pub const MIN_STEPS: usize = 1000;
const RENORMALIZE_EVERY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub exponent: f64,
    pub steps: usize,
    pub renormalizations: usize,
}

/// Top Lyapunov exponent of `u_{n+1} = (λv_n − E w_n) u_n − u_{n−1}` along
/// the orbit of `p.phase`, from `steps` transfer matrices with periodic
/// QR renormalization.
pub fn lyapunov(p: &ModelParameters, energy: f64, steps: usize) -> Result<LyapunovEstimate> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "lyapunov needs at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    if !energy.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "energy {energy} is not finite"
        )));
    }
    // columns (a0, a1) and (b0, b1) of the running product
    let (mut a0, mut a1, mut b0, mut b1) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    let mut log_growth = 0.0;
    let mut renormalizations = 0;
    for n in 0..steps {
        let d = p.lambda * p.v_at(n as i64) - energy * p.w_at(n as i64);
        (a0, a1) = (d * a0 - a1, a0);
        (b0, b1) = (d * b0 - b1, b0);
        let last = n + 1 == steps;
        if (n + 1) % RENORMALIZE_EVERY == 0 || last || a0.abs().max(a1.abs()) > 1e150 {
            let r11 = a0.hypot(a1);
            if !(r11 > 0.0 && r11.is_finite()) {
                return Err(Error::Numerical(format!(
                    "transfer product degenerated at step {n}"
                )));
            }
            (a0, a1) = (a0 / r11, a1 / r11);
            let dot = a0 * b0 + a1 * b1;
            (b0, b1) = (b0 - dot * a0, b1 - dot * a1);
            let r22 = b0.hypot(b1);
            if r22 > 0.0 {
                (b0, b1) = (b0 / r22, b1 / r22);
            } else {
                (b0, b1) = (-a1, a0);
            }
            log_growth += r11.ln();
            renormalizations += 1;
        }
    }
    Ok(LyapunovEstimate {
        energy,
        exponent: log_growth / steps as f64,
        steps,
        renormalizations,
    })
}
