use serde::Serialize;

use crate::linalg::{refined_eigenvalues, TridiagonalLu};
use crate::operator::{assemble_jacobi, LatticeInterval, ModelParameters};
use crate::Result;
use nalgebra::DMatrix;

/// Relative agreement demanded between the two distance estimates.
pub const DISTANCE_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralDistance {
    pub energy: f64,
    /// `min_j |E − E_j|` over the eigenvalues of `H_{1,Λ}`.
    pub distance: f64,
    pub nearest: Option<f64>,
    /// `1 / ‖(H_{1,Λ} − E)^{-1}‖` from a dense LU inverse; 0 when singular.
    pub resolvent_distance: f64,
    /// The two estimates differ by at most `1e-8` relative, plus rounding
    /// of order `ε · ‖H_{1,Λ} − E‖`.
    pub agrees: bool,
}

/// `dist(E, σ(H_{1,Λ}))`, cross-checked against the inverse norm of the
/// shifted matrix.
pub fn distance_to_spectrum(
    p: &ModelParameters,
    interval: LatticeInterval,
    energy: f64,
    floor: f64,
) -> Result<SpectralDistance> {
    let h1 = assemble_jacobi(p, interval, floor)?;
    let eig = refined_eigenvalues(&h1.diagonal, &h1.off_diagonal)?;
    let nearest = eig
        .iter()
        .copied()
        .min_by(|a, b| (a - energy).abs().total_cmp(&(b - energy).abs()));
    let distance = nearest.map_or(f64::INFINITY, |e| (e - energy).abs());
    let a: Vec<f64> = h1.diagonal.iter().map(|d| d - energy).collect();
    let resolvent_distance = match TridiagonalLu::factor(&a, &h1.off_diagonal) {
        Ok(lu) => {
            let n = a.len();
            let inv = DMatrix::from_row_slice(n, n, &lu.inverse());
            let sym = (&inv + inv.transpose()) * 0.5;
            let norm = sym
                .symmetric_eigenvalues()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            if norm.is_finite() && norm > 0.0 {
                1.0 / norm
            } else {
                0.0
            }
        }
        Err(_) => 0.0,
    };
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 2.0;
    let slack = DISTANCE_AGREEMENT * distance.max(resolvent_distance) + 64.0 * f64::EPSILON * scale;
    Ok(SpectralDistance {
        energy,
        distance,
        nearest,
        resolvent_distance,
        agrees: (distance - resolvent_distance).abs() <= slack,
    })
}
