use nalgebra::DMatrix;

use crate::linalg::{ql_eigenvalues, tridiagonal_inverse, TridiagonalLu};
use crate::operator::{assemble_h, LatticeInterval, ModelParameters, TridiagonalMatrix};
use crate::{Error, Result};

/// Largest accepted `max|μ| / min|μ|` before `H_Λ` counts as singular.
pub const SINGULAR_CONDITION: f64 = 1.0 / (10.0 * f64::EPSILON);

/// `G_Λ = H_Λ^{-1}` with its norms attached.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensMatrix {
    pub entries: DMatrix<f64>,
    pub interval: LatticeInterval,
    /// `‖G_Λ‖`, spectral norm.
    pub operator_norm: f64,
    /// `‖G_Λ‖_HS`.
    pub hs_norm: f64,
    /// `max|μ| / min|μ|` over the eigenvalues `μ` of `H_Λ`.
    pub condition_estimate: f64,
}

impl GreensMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// `G(m, n)` addressed by lattice sites.
    pub fn at(&self, m: i64, n: i64) -> f64 {
        self.entries[(self.interval.index(m), self.interval.index(n))]
    }

    /// Wraps an arbitrary symmetric matrix; the norm comes from a dense
    /// symmetric eigen-decomposition.
    pub fn from_entries(entries: DMatrix<f64>, interval: LatticeInterval) -> Result<Self> {
        if entries.nrows() != interval.size() || entries.ncols() != interval.size() {
            return Err(Error::DimensionMismatch {
                expected: interval.size(),
                found: entries.nrows(),
            });
        }
        let eig = entries.clone().symmetric_eigenvalues();
        let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let hs_norm = entries.norm();
        Ok(GreensMatrix {
            entries,
            interval,
            operator_norm: max,
            hs_norm,
            condition_estimate: if min > 0.0 { max / min } else { f64::INFINITY },
        })
    }

    /// `max_{ij} |(H G − I)_{ij}|`.
    pub fn residual(&self, h: &TridiagonalMatrix) -> f64 {
        inverse_residual(h, &self.entries)
    }
}

/// Green's function of `H(λ, E, x, y, ω)` restricted to `Λ`.
pub fn greens(p: &ModelParameters, interval: LatticeInterval) -> Result<GreensMatrix> {
    greens_of(&assemble_h(p, interval), interval)
}

/// Inverse of an assembled symmetric tridiagonal matrix.
///
/// Entries come from the two-sided (twisted) factorization, which keeps
/// off-diagonal entries relatively accurate far into the decay; if that
/// route leaves a residual above `10⁻¹¹·‖G‖·|Λ|` the partial-pivoting LU
/// inverse replaces it. The spectral norm is `1 / min|μ|`.
pub fn greens_of(h: &TridiagonalMatrix, interval: LatticeInterval) -> Result<GreensMatrix> {
    let n = h.size();
    if n != interval.size() {
        return Err(Error::DimensionMismatch {
            expected: interval.size(),
            found: n,
        });
    }
    let mu = ql_eigenvalues(&h.diagonal, &h.off_diagonal)?;
    let max = mu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = mu.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= SINGULAR_CONDITION) {
        return Err(Error::Singular { condition });
    }
    let operator_norm = 1.0 / min;

    let raw = tridiagonal_inverse(&h.diagonal, &h.off_diagonal);
    let mut entries = DMatrix::from_row_slice(n, n, &raw);
    let tolerance = 1e-11 * operator_norm * n as f64;
    if entries.iter().any(|x| !x.is_finite()) || inverse_residual(h, &entries) > tolerance {
        log::debug!("twisted inverse residual too large on {interval:?}; using pivoted LU");
        let lu = TridiagonalLu::factor(&h.diagonal, &h.off_diagonal)?;
        let dense = lu.inverse();
        entries = DMatrix::from_fn(n, n, |i, j| {
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            dense[r * n + c]
        });
    }
    let hs_norm = entries.norm();
    Ok(GreensMatrix {
        entries,
        interval,
        operator_norm,
        hs_norm,
        condition_estimate: condition,
    })
}

fn inverse_residual(h: &TridiagonalMatrix, g: &DMatrix<f64>) -> f64 {
    let n = h.size();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let mut s = h.diagonal[i] * g[(i, j)];
            if i > 0 {
                s += h.off_diagonal[i - 1] * g[(i - 1, j)];
            }
            if i + 1 < n {
                s += h.off_diagonal[i] * g[(i + 1, j)];
            }
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.abs());
        }
    }
    worst
}
