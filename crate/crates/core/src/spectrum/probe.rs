use serde::Serialize;

use super::eigen::pencil_eigensolve;
use super::poisson::{poisson_check, PoissonCheck};
use crate::operator::{assemble_h0, weight_diagonal, LatticeInterval, ModelParameters};
use crate::{Error, Result};

/// Polynomially bounded generalized eigenvector normalized by `ψ(k₀) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedEigenvectorProbe {
    pub energy: f64,
    pub anchor: i64,
    pub support: LatticeInterval,
    /// Smallest `C` with `|ψ(n)| ≤ C (1 + |n|)^{C′}` on the support.
    pub c_psi: f64,
    pub c_prime_psi: f64,
    /// Poisson reconstruction on the middle half of the support; `None` if
    /// that window is singular at this energy.
    pub poisson: Option<PoissonCheck>,
    pub psi: Vec<f64>,
}

/// Takes the `k`-th Dirichlet eigenvector of `H₀ψ = EWψ` on `support` and
/// rescales it to `ψ(anchor) = 1`.
pub fn probe_generalized_eigenvector(
    p: &ModelParameters,
    support: LatticeInterval,
    k: usize,
    anchor: i64,
    c_prime: f64,
) -> Result<GeneralizedEigenvectorProbe> {
    if !support.contains(anchor) {
        return Err(Error::InvalidArgument(format!(
            "anchor {anchor} outside {support:?}"
        )));
    }
    if k >= support.size() {
        return Err(Error::InvalidArgument(format!(
            "eigen index {k} out of range for size {}",
            support.size()
        )));
    }
    if !(c_prime >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "polynomial exponent {c_prime} must be non-negative"
        )));
    }
    let sol = pencil_eigensolve(&assemble_h0(p, support), &weight_diagonal(p, support))?;
    let z = &sol.vectors[k];
    let i0 = support.index(anchor);
    let shift = z.log_abs[i0];
    if !shift.is_finite() {
        return Err(Error::Numerical(format!(
            "eigenvector vanishes at anchor {anchor}"
        )));
    }
    let psi: Vec<f64> = z
        .log_abs
        .iter()
        .zip(&z.sign)
        .map(|(l, s)| s * z.sign[i0] * (l - shift).exp())
        .collect();
    let c_psi = support
        .sites()
        .zip(&z.log_abs)
        .map(|(n, l)| (l - shift - c_prime * (1.0 + n.unsigned_abs() as f64).ln()).exp())
        .fold(0.0, f64::max);
    let energy = sol.eigenvalues[k];
    let quarter = support.size() as i64 / 4;
    let poisson = if quarter >= 1 {
        let window = LatticeInterval::new(support.a + quarter, support.b - quarter)?;
        match poisson_check(&p.with_energy(energy), &psi, support, window) {
            Ok(c) => Some(c),
            Err(Error::Singular { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(GeneralizedEigenvectorProbe {
        energy,
        anchor,
        support,
        c_psi,
        c_prime_psi: c_prime,
        poisson,
        psi,
    })
}
