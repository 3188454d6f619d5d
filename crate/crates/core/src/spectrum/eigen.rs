use serde::Serialize;

use super::diagnostics::{decay_of_log_vector, ipr};
use crate::greens::DecayFit;
use crate::linalg::{bisect_all, refined_eigenvalues, twisted_null_vector, LogVector};
use crate::operator::{
    assemble_h0, assemble_jacobi, weight_diagonal, LatticeInterval, ModelParameters,
    TridiagonalMatrix,
};
use crate::{Error, Result};

/// Weight floor used by the pencil fallback.
pub const PENCIL_FLOOR: f64 = 1e-8;
/// Eigenvalues closer than this relative gap are treated as a cluster
/// and their vectors re-orthogonalized.
const CLUSTER_GAP: f64 = 1e-3;
/// Overlaps below this are left alone so that tails are not polluted.
const OVERLAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveRoute {
    Jacobi,
    Pencil,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorDiagnostics {
    pub eigenvalue: f64,
    pub ipr: f64,
    /// Site of `argmax |ψ′|`.
    pub center: i64,
    /// Fit of `log|ψ(n)|` against `|n − center|` outside the core, for
    /// `ψ = W^{-1/2}ψ′`; `None` when nothing lies above the floor.
    pub decay: Option<DecayFit>,
    /// `‖H₁ψ′ − Eψ′‖ / max(1, |E|)`.
    pub residual: f64,
}

/// Eigen-decomposition of `H_{1,Λ}` with per-vector localization data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenReport {
    pub interval: LatticeInterval,
    pub route: SolveRoute,
    pub floor: f64,
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors `ψ′` of `H_{1,Λ}`, first nonzero entry positive.
    pub eigenvectors: Vec<Vec<f64>>,
    pub diagnostics: Vec<VectorDiagnostics>,
    /// Largest scaled residual over all pairs.
    pub max_residual: f64,
    /// `max |⟨ψ′_i, ψ′_j⟩ − δ_ij|`.
    pub orthogonality_error: f64,
    /// Sites whose weight lies below the Jacobi floor (pencil route only).
    pub flagged_sites: Vec<i64>,
    /// `ψ = W^{-1/2}ψ′` in log form, entries far below the `f64` range kept.
    #[serde(skip)]
    pub generalized: Vec<LogVector>,
}

impl EigenReport {
    /// Index of the eigenvalue nearest to `e`.
    pub fn nearest(&self, e: f64) -> Option<usize> {
        (0..self.eigenvalues.len()).min_by(|&i, &j| {
            (self.eigenvalues[i] - e)
                .abs()
                .total_cmp(&(self.eigenvalues[j] - e).abs())
        })
    }
}

/// Generalized eigenpairs of `H₀ψ = EWψ`, `W`-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilSolution {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<LogVector>,
}

impl PencilSolution {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors[k].to_f64()
    }
}

/// Full decomposition of the Jacobi operator `W^{-1/2} H₀ W^{-1/2}` on `Λ`.
pub fn eigensolve_jacobi(
    p: &ModelParameters,
    interval: LatticeInterval,
    floor: f64,
) -> Result<EigenReport> {
    let h1 = assemble_jacobi(p, interval, floor)?;
    let w = weight_diagonal(p, interval);
    let eigenvalues = refined_eigenvalues(&h1.diagonal, &h1.off_diagonal)?;
    let mut vectors: Vec<LogVector> = eigenvalues
        .iter()
        .map(|&e| {
            let a: Vec<f64> = h1.diagonal.iter().map(|d| d - e).collect();
            let (mut z, _) = twisted_null_vector(&a, &h1.off_diagonal);
            z.normalize(None);
            z.fix_sign();
            z
        })
        .collect();
    reorthogonalize_clusters(&eigenvalues, &mut vectors);
    Ok(build_report(
        interval,
        SolveRoute::Jacobi,
        floor,
        &h1,
        &w,
        eigenvalues,
        vectors,
        Vec::new(),
    ))
}

/// Solves `H₀ψ = EWψ` by inertia bisection on `H₀ − EW` and twisted
/// null vectors; every weight entry must be positive.
pub fn pencil_eigensolve(h0: &TridiagonalMatrix, w: &[f64]) -> Result<PencilSolution> {
    let n = h0.size();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.len(),
        });
    }
    if let Some((i, &value)) = w.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::InvalidWeight(format!(
            "weight entry {value:e} at index {i} is not positive"
        )));
    }
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
    let dmax = h0.diagonal.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let emax = 2.0 * h0.off_diagonal.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let bound = (dmax + emax) / wmin * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    let eigenvalues = bisect_all(&h0.diagonal, &h0.off_diagonal, Some(w), -bound, bound);
    let mut vectors: Vec<LogVector> = eigenvalues
        .iter()
        .map(|&e| {
            let a: Vec<f64> = h0
                .diagonal
                .iter()
                .zip(w)
                .map(|(d, wi)| d - e * wi)
                .collect();
            let (mut z, _) = twisted_null_vector(&a, &h0.off_diagonal);
            z.normalize(Some(w));
            z.fix_sign();
            z
        })
        .collect();
    // W-orthogonality inside clusters, through ψ′ = W^{1/2}ψ
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut primed: Vec<LogVector> = vectors.iter().map(|z| scale_log(z, &sqrt_w)).collect();
    if reorthogonalize_clusters(&eigenvalues, &mut primed) {
        let inv: Vec<f64> = sqrt_w.iter().map(|s| 1.0 / s).collect();
        vectors = primed.iter().map(|z| scale_log(z, &inv)).collect();
    }
    Ok(PencilSolution {
        eigenvalues,
        vectors,
    })
}

/// Jacobi route, falling back to the pencil route with weight floor
/// [`PENCIL_FLOOR`] when a weight sample lies below `floor`.
pub fn eigensolve_robust(
    p: &ModelParameters,
    interval: LatticeInterval,
    floor: f64,
) -> Result<EigenReport> {
    match eigensolve_jacobi(p, interval, floor) {
        Err(Error::NearDegenerateWeight { site, value, .. }) => {
            log::warn!(
                "weight {value:e} at site {site} below floor {floor:e}; using the pencil route"
            );
            let w = weight_diagonal(p, interval);
            let flagged: Vec<i64> = interval
                .sites()
                .zip(&w)
                .filter(|(_, &x)| x < floor)
                .map(|(n, _)| n)
                .collect();
            if let Some((i, &value)) = w.iter().enumerate().find(|(_, &x)| !(x >= PENCIL_FLOOR)) {
                return Err(Error::NearDegenerateWeight {
                    site: interval.a + i as i64,
                    value,
                    floor: PENCIL_FLOOR,
                });
            }
            let h0 = assemble_h0(p, interval);
            let sol = pencil_eigensolve(&h0, &w)?;
            let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
            let primed: Vec<LogVector> =
                sol.vectors.iter().map(|z| scale_log(z, &sqrt_w)).collect();
            let h1 = assemble_jacobi(p, interval, PENCIL_FLOOR)?;
            Ok(build_report(
                interval,
                SolveRoute::Pencil,
                PENCIL_FLOOR,
                &h1,
                &w,
                sol.eigenvalues,
                primed,
                flagged,
            ))
        }
        other => other,
    }
}

/// Component-wise `z_i · s_i` in log form.
fn scale_log(z: &LogVector, s: &[f64]) -> LogVector {
    LogVector {
        log_abs: z.log_abs.iter().zip(s).map(|(l, si)| l + si.ln()).collect(),
        sign: z.sign.clone(),
    }
}

/// Modified Gram–Schmidt inside clusters of close eigenvalues, applied only
/// to overlaps above [`OVERLAP_TOL`]. Returns whether anything changed.
fn reorthogonalize_clusters(eigenvalues: &[f64], vectors: &mut [LogVector]) -> bool {
    let mut changed = false;
    let mut start = 0;
    for k in 1..=eigenvalues.len() {
        let split = k == eigenvalues.len()
            || (eigenvalues[k] - eigenvalues[k - 1]).abs()
                > CLUSTER_GAP * eigenvalues[k].abs().max(1.0);
        if !split {
            continue;
        }
        if k - start > 1 {
            let mut dense: Vec<Vec<f64>> = vectors[start..k].iter().map(|z| z.to_f64()).collect();
            for i in 1..dense.len() {
                let mut touched = false;
                for j in 0..i {
                    let dot: f64 = dense[i].iter().zip(&dense[j]).map(|(a, b)| a * b).sum();
                    if dot.abs() > OVERLAP_TOL {
                        let (head, tail) = dense.split_at_mut(i);
                        for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                            *x -= dot * y;
                        }
                        touched = true;
                    }
                }
                if touched {
                    let norm = dense[i].iter().map(|x| x * x).sum::<f64>().sqrt();
                    dense[i].iter_mut().for_each(|x| *x /= norm);
                    let mut z = LogVector::from_f64(&dense[i]);
                    z.fix_sign();
                    vectors[start + i] = z;
                    changed = true;
                }
            }
        }
        start = k;
    }
    changed
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    interval: LatticeInterval,
    route: SolveRoute,
    floor: f64,
    h1: &TridiagonalMatrix,
    w: &[f64],
    eigenvalues: Vec<f64>,
    vectors: Vec<LogVector>,
    flagged_sites: Vec<i64>,
) -> EigenReport {
    let inv_sqrt_w: Vec<f64> = w.iter().map(|x| 1.0 / x.sqrt()).collect();
    let eigenvectors: Vec<Vec<f64>> = vectors.iter().map(|z| z.to_f64()).collect();
    let generalized: Vec<LogVector> = vectors.iter().map(|z| scale_log(z, &inv_sqrt_w)).collect();
    let diagnostics: Vec<VectorDiagnostics> = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .zip(&generalized)
        .map(|((&e, psi), gen)| {
            let r = h1.apply(psi);
            let residual = r
                .iter()
                .zip(psi)
                .map(|(hx, x)| (hx - e * x).powi(2))
                .sum::<f64>()
                .sqrt()
                / e.abs().max(1.0);
            let center_index = psi
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            VectorDiagnostics {
                eigenvalue: e,
                ipr: ipr(psi).unwrap_or(f64::NAN),
                center: interval.a + center_index as i64,
                decay: decay_of_log_vector(gen, center_index).ok(),
                residual,
            }
        })
        .collect();
    let max_residual = diagnostics.iter().map(|d| d.residual).fold(0.0, f64::max);
    let orthogonality_error = orthogonality_error(&eigenvectors);
    EigenReport {
        interval,
        route,
        floor,
        eigenvalues,
        eigenvectors,
        diagnostics,
        max_residual,
        orthogonality_error,
        flagged_sites,
        generalized,
    }
}

fn orthogonality_error(vectors: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..vectors.len() {
        for j in i..vectors.len() {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnalyticTorusFunction, FrequencyVector, Phase};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn params(
        lambda: f64,
        v: AnalyticTorusFunction,
        w: AnalyticTorusFunction,
        phase: Phase,
    ) -> ModelParameters {
        ModelParameters::new(lambda, 0.0, v, w, FrequencyVector::golden_silver(), phase).unwrap()
    }

    #[test]
    fn free_laplacian() {
        let one = AnalyticTorusFunction::constant(1.0);
        let p = params(0.0, AnalyticTorusFunction::cosine(), one, Phase::origin());
        let n = 40;
        let r = eigensolve_jacobi(&p, LatticeInterval::new(1, n).unwrap(), 1e-6).unwrap();
        for k in 0..n as usize {
            let exact = -2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((r.eigenvalues[k] - exact).abs() < 1e-13);
        }
        assert!(r.orthogonality_error < 1e-10);
        assert!(r.max_residual < 1e-12);
    }

    #[test]
    fn single_site() {
        let p = params(
            3.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.1, 0.2),
        );
        let r = eigensolve_jacobi(&p, LatticeInterval::new(0, 0).unwrap(), 1e-6).unwrap();
        let expect = 3.0 * (2.0 * PI * 0.1).cos() / (2.0 * PI * 0.2).sin().powi(2);
        assert!((r.eigenvalues[0] - expect).abs() < 1e-13 * expect.abs());
        assert_eq!(r.eigenvectors[0], vec![1.0]);
    }

    #[test]
    fn pencil_with_identity_weight() {
        let h0 = TridiagonalMatrix::new(vec![1.0, -2.0, 0.5, 3.0], vec![-1.0; 3]).unwrap();
        let sol = pencil_eigensolve(&h0, &[1.0; 4]).unwrap();
        let mut oracle: Vec<f64> = h0
            .to_dense()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        oracle.sort_by(f64::total_cmp);
        for (a, b) in sol.eigenvalues.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pencil_two_by_two_quadratic() {
        // det([[d0 − E w0, −1], [−1, d1 − E w1]]) = 0
        let (d0, d1, w0, w1) = (2.0, -1.0, 0.5, 3.0);
        let h0 = TridiagonalMatrix::new(vec![d0, d1], vec![-1.0]).unwrap();
        let sol = pencil_eigensolve(&h0, &[w0, w1]).unwrap();
        let (a, b, c) = (w0 * w1, -(d0 * w1 + d1 * w0), d0 * d1 - 1.0);
        let disc = (b * b - 4.0 * a * c).sqrt();
        let roots = [(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)];
        for (x, y) in sol.eigenvalues.iter().zip(&roots) {
            assert!((x - y).abs() < 1e-14 * y.abs().max(1.0));
        }
        // W-normalized
        for k in 0..2 {
            let v = sol.vector(k);
            let wn = w0 * v[0] * v[0] + w1 * v[1] * v[1];
            assert!((wn - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dual_routes_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 20 {
            let p = params(
                rng.gen_range(0.5..50.0),
                AnalyticTorusFunction::cosine(),
                AnalyticTorusFunction::sin_squared(),
                Phase::new(rng.gen(), rng.gen()),
            );
            let n: i64 = rng.gen_range(2..80);
            let interval = LatticeInterval::new(0, n - 1).unwrap();
            let jac = match eigensolve_jacobi(&p, interval, 1e-6) {
                Ok(r) => r,
                Err(Error::NearDegenerateWeight { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let sol = pencil_eigensolve(&assemble_h0(&p, interval), &weight_diagonal(&p, interval))
                .unwrap();
            for (k, (a, b)) in jac.eigenvalues.iter().zip(&sol.eigenvalues).enumerate() {
                assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300), "{a} vs {b}");
                // ψ = W^{-1/2}ψ′ up to sign
                let from_jacobi = jac.generalized[k].to_f64();
                let direct = sol.vector(k);
                let s = if from_jacobi
                    .iter()
                    .zip(&direct)
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    < 0.0
                {
                    -1.0
                } else {
                    1.0
                };
                let scale = direct.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                for (x, y) in from_jacobi.iter().zip(&direct) {
                    assert!((x - s * y).abs() < 1e-6 * scale);
                }
            }
            assert!(jac.max_residual < 1e-8);
            assert!(jac.orthogonality_error < 1e-8);
            checked += 1;
        }
    }

    #[test]
    fn robust_falls_back_to_pencil() {
        let p = params(
            2.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.3, 0.001),
        );
        let interval = LatticeInterval::new(0, 9).unwrap();
        assert!(eigensolve_jacobi(&p, interval, 1e-3).is_err());
        let r = eigensolve_robust(&p, interval, 1e-3).unwrap();
        assert_eq!(r.route, SolveRoute::Pencil);
        assert_eq!(r.flagged_sites, vec![0]);
        let direct = eigensolve_jacobi(&p, interval, 1e-8).unwrap();
        for (a, b) in r.eigenvalues.iter().zip(&direct.eigenvalues) {
            assert!((a - b).abs() <= 1e-8 * a.abs());
        }
    }
}
