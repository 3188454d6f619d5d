use serde::Serialize;

use crate::greens::{greens, GreensMatrix, SINGULAR_CONDITION};
use crate::operator::{LatticeInterval, ModelParameters};
use crate::{Error, Result};

/// `ψ_Λ = ψ(a−1) G_Λ δ_a + ψ(b+1) G_Λ δ_b` for `Λ = [a, b]`.
pub fn poisson_reconstruct(g: &GreensMatrix, psi_left: f64, psi_right: f64) -> Result<Vec<f64>> {
    if !(g.condition_estimate <= SINGULAR_CONDITION) {
        return Err(Error::Singular {
            condition: g.condition_estimate,
        });
    }
    let n = g.size();
    Ok((0..n)
        .map(|i| psi_left * g.entries[(i, 0)] + psi_right * g.entries[(i, n - 1)])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCheck {
    pub window: LatticeInterval,
    /// `‖ψ_Λ − reconstruction‖₂`.
    pub residual: f64,
    /// `‖ψ_Λ‖₂`.
    pub norm: f64,
}

impl PoissonCheck {
    pub fn relative(&self) -> f64 {
        self.residual / self.norm
    }
}

/// Compares `ψ` on `window` with its Poisson reconstruction from the two
/// neighbouring values. `psi` lives on `support`, is zero outside it and
/// solves `H₀ψ = EWψ` there with `E = p.energy`.
pub fn poisson_check(
    p: &ModelParameters,
    psi: &[f64],
    support: LatticeInterval,
    window: LatticeInterval,
) -> Result<PoissonCheck> {
    if psi.len() != support.size() {
        return Err(Error::DimensionMismatch {
            expected: support.size(),
            found: psi.len(),
        });
    }
    if !support.contains_interval(&window) {
        return Err(Error::InvalidArgument(format!(
            "window {window:?} is not inside {support:?}"
        )));
    }
    let at = |n: i64| {
        if support.contains(n) {
            psi[support.index(n)]
        } else {
            0.0
        }
    };
    let g = greens(p, window)?;
    let rebuilt = poisson_reconstruct(&g, at(window.a - 1), at(window.b + 1))?;
    let (mut residual, mut norm) = (0.0, 0.0);
    for (n, r) in window.sites().zip(&rebuilt) {
        residual += (at(n) - r).powi(2);
        norm += at(n).powi(2);
    }
    Ok(PoissonCheck {
        window,
        residual: residual.sqrt(),
        norm: norm.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnalyticTorusFunction, FrequencyVector, Phase};
    use crate::operator::{assemble_h0, weight_diagonal};
    use crate::spectrum::pencil_eigensolve;

    fn params() -> ModelParameters {
        ModelParameters::new(
            1.5,
            0.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::one_plus_cosine(),
            FrequencyVector::golden_silver(),
            Phase::new(0.21, 0.37),
        )
        .unwrap()
    }

    #[test]
    fn single_site_window() {
        let p = params().with_energy(0.7);
        let g = greens(&p, LatticeInterval::new(0, 0).unwrap()).unwrap();
        let r = poisson_reconstruct(&g, 0.3, -1.1).unwrap();
        let d = p.lambda * p.v_at(0) - 0.7 * p.w_at(0);
        assert!((r[0] - (0.3 - 1.1) / d).abs() < 1e-15);
    }

    #[test]
    fn eigenvectors_are_reconstructed() {
        let p = params();
        let support = LatticeInterval::new(0, 60).unwrap();
        let sol =
            pencil_eigensolve(&assemble_h0(&p, support), &weight_diagonal(&p, support)).unwrap();
        let mut checked = 0;
        for k in (0..61).step_by(7) {
            let pe = p.with_energy(sol.eigenvalues[k]);
            let psi = sol.vector(k);
            match poisson_check(&pe, &psi, support, LatticeInterval::new(10, 40).unwrap()) {
                Ok(c) => {
                    assert!(
                        c.residual < 1e-8 * c.norm.max(1e-300) || c.residual < 1e-12,
                        "{c:?}"
                    );
                    checked += 1;
                }
                Err(Error::Singular { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(checked >= 5);
    }

    #[test]
    fn window_outside_support() {
        let p = params();
        let support = LatticeInterval::new(0, 5).unwrap();
        assert!(
            poisson_check(&p, &[0.0; 6], support, LatticeInterval::new(3, 8).unwrap()).is_err()
        );
    }
}
