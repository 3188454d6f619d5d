//! Finite restrictions of `H(λ, E, x, y, ω)` and the Jacobi transform.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::{rotate, AnalyticTorusFunction, FrequencyVector, Phase};
use crate::{Error, Result};

/// Grid used to confirm that a weight is nonnegative and not identically zero.
const WEIGHT_CHECK_POINTS: usize = 10_000;

/// `(λ, E, v, w, ω, phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    pub lambda: f64,
    pub energy: f64,
    pub v: AnalyticTorusFunction,
    pub w: AnalyticTorusFunction,
    pub omega: FrequencyVector,
    pub phase: Phase,
}

impl ModelParameters {
    pub fn new(
        lambda: f64,
        energy: f64,
        v: AnalyticTorusFunction,
        w: AnalyticTorusFunction,
        omega: FrequencyVector,
        phase: Phase,
    ) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::config("lambda", format!("{lambda} is not finite")));
        }
        if !energy.is_finite() {
            return Err(Error::config("energy", format!("{energy} is not finite")));
        }
        let values: Vec<f64> = (0..WEIGHT_CHECK_POINTS)
            .map(|j| w.evaluate(j as f64 / WEIGHT_CHECK_POINTS as f64))
            .collect();
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max > 0.0) {
            return Err(Error::InvalidWeight(
                "weight is identically zero or nonpositive".into(),
            ));
        }
        if let Some(j) = values.iter().position(|&x| x < -1e-12 * max) {
            return Err(Error::InvalidWeight(format!(
                "negative value {:e} at y = {}",
                values[j],
                j as f64 / WEIGHT_CHECK_POINTS as f64
            )));
        }
        Ok(ModelParameters {
            lambda,
            energy,
            v,
            w,
            omega,
            phase: Phase::new(phase.x, phase.y),
        })
    }

    pub fn with_energy(&self, energy: f64) -> Self {
        ModelParameters {
            energy,
            ..self.clone()
        }
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        ModelParameters {
            phase: Phase::new(phase.x, phase.y),
            ..self.clone()
        }
    }

    /// `v(x + nω₁)`.
    pub fn v_at(&self, n: i64) -> f64 {
        self.v
            .evaluate(rotate(self.phase.x, self.omega.omega[0], n))
    }

    /// `w(y + nω₂)`.
    pub fn w_at(&self, n: i64) -> f64 {
        self.w
            .evaluate(rotate(self.phase.y, self.omega.omega[1], n))
    }

    /// `(v_n, w_n)` for `n ∈ Λ`.
    pub fn samples(&self, interval: LatticeInterval) -> (Vec<f64>, Vec<f64>) {
        interval
            .sites()
            .map(|n| (self.v_at(n), self.w_at(n)))
            .unzip()
    }
}

/// `Λ = [a, b] ∩ ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeInterval {
    pub a: i64,
    pub b: i64,
}

impl LatticeInterval {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::InvalidArgument(format!(
                "empty lattice interval [{a}, {b}]"
            )));
        }
        Ok(LatticeInterval { a, b })
    }

    /// `[−N, N]`.
    pub fn centered(n: u64) -> Self {
        LatticeInterval {
            a: -(n as i64),
            b: n as i64,
        }
    }

    pub fn size(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.a..=self.b
    }

    pub fn contains(&self, n: i64) -> bool {
        self.a <= n && n <= self.b
    }

    pub fn contains_interval(&self, other: &LatticeInterval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn shifted(&self, k: i64) -> Self {
        LatticeInterval {
            a: self.a + k,
            b: self.b + k,
        }
    }

    /// Index of site `n` within the interval.
    pub fn index(&self, n: i64) -> usize {
        (n - self.a) as usize
    }
}

/// Symmetric tridiagonal storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::InvalidArgument(
                "matrix must have at least one row".into(),
            ));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::DimensionMismatch {
                expected: diagonal.len() - 1,
                found: off_diagonal.len(),
            });
        }
        if diagonal.iter().chain(&off_diagonal).any(|x| !x.is_finite()) {
            return Err(Error::Numerical("matrix entry is not finite".into()));
        }
        Ok(TridiagonalMatrix {
            diagonal,
            off_diagonal,
        })
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diagonal[i]
            } else if i + 1 == j {
                self.off_diagonal[i]
            } else if j + 1 == i {
                self.off_diagonal[j]
            } else {
                0.0
            }
        })
    }

    /// `T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * x[i];
                if i > 0 {
                    s += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off_diagonal[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TridiagonalMatrix {
            diagonal: self.diagonal.iter().map(|d| d * factor).collect(),
            off_diagonal: self.off_diagonal.iter().map(|e| e * factor).collect(),
        }
    }

    /// `T − s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        TridiagonalMatrix {
            diagonal: self.diagonal.iter().map(|d| d - s).collect(),
            off_diagonal: self.off_diagonal.clone(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.diagonal
            .iter()
            .chain(&self.off_diagonal)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `H_Λ = R_Λ H R_Λ`: diagonal `λ v(x+nω₁) − E w(y+nω₂)`, hopping `−1`.
pub fn assemble_h(p: &ModelParameters, interval: LatticeInterval) -> TridiagonalMatrix {
    let diagonal = interval
        .sites()
        .map(|n| p.lambda * p.v_at(n) - p.energy * p.w_at(n))
        .collect();
    TridiagonalMatrix {
        diagonal,
        off_diagonal: vec![-1.0; interval.size() - 1],
    }
}

/// `(H₀)_Λ`, the restriction at `E = 0`.
pub fn assemble_h0(p: &ModelParameters, interval: LatticeInterval) -> TridiagonalMatrix {
    let diagonal = interval.sites().map(|n| p.lambda * p.v_at(n)).collect();
    TridiagonalMatrix {
        diagonal,
        off_diagonal: vec![-1.0; interval.size() - 1],
    }
}

/// Diagonal of `W_Λ`.
pub fn weight_diagonal(p: &ModelParameters, interval: LatticeInterval) -> Vec<f64> {
    interval.sites().map(|n| p.w_at(n)).collect()
}

/// `H_{1,Λ} = W_Λ^{-1/2} (H₀)_Λ W_Λ^{-1/2}`; every `w_n` must reach `floor`.
pub fn assemble_jacobi(
    p: &ModelParameters,
    interval: LatticeInterval,
    floor: f64,
) -> Result<TridiagonalMatrix> {
    if !(floor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "weight floor must be positive, got {floor}"
        )));
    }
    let w = weight_diagonal(p, interval);
    if let Some((i, &value)) = w.iter().enumerate().find(|(_, &x)| !(x >= floor)) {
        return Err(Error::NearDegenerateWeight {
            site: interval.a + i as i64,
            value,
            floor,
        });
    }
    let diagonal = interval
        .sites()
        .zip(&w)
        .map(|(n, wn)| p.lambda * p.v_at(n) / wn)
        .collect();
    let off_diagonal = w
        .windows(2)
        .map(|pair| -1.0 / (pair[0] * pair[1]).sqrt())
        .collect();
    Ok(TridiagonalMatrix {
        diagonal,
        off_diagonal,
    })
}

/// `Σ_n u_n h_n w_n`.
pub fn weighted_inner_product(u: &[f64], h: &[f64], w: &[f64]) -> Result<f64> {
    if u.len() != h.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: h.len(),
        });
    }
    if u.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: w.len(),
        });
    }
    Ok(u.iter().zip(h).zip(w).map(|((a, b), c)| a * b * c).sum())
}

/// Which parameter normalizes `H_Λ` in the initial-scale estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `λ^{-1} H_Λ`.
    Coupling,
    /// `E^{-1} H_Λ`.
    Energy,
}

pub fn scaled_h(
    p: &ModelParameters,
    interval: LatticeInterval,
    regime: Regime,
) -> Result<TridiagonalMatrix> {
    let s = match regime {
        Regime::Coupling => p.lambda,
        Regime::Energy => p.energy,
    };
    if s == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{regime:?} scaling parameter is zero"
        )));
    }
    Ok(assemble_h(p, interval).scaled(1.0 / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(
        lambda: f64,
        energy: f64,
        v: AnalyticTorusFunction,
        w: AnalyticTorusFunction,
        phase: Phase,
    ) -> ModelParameters {
        ModelParameters::new(
            lambda,
            energy,
            v,
            w,
            FrequencyVector::golden_silver(),
            phase,
        )
        .unwrap()
    }

    #[test]
    fn single_site() {
        let p = params(
            5.0,
            1.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.0, 0.25),
        );
        let h = assemble_h(&p, LatticeInterval::new(0, 0).unwrap());
        assert!((h.diagonal[0] - 4.0).abs() < 1e-14);
        assert!(h.off_diagonal.is_empty());
    }

    #[test]
    fn pure_hopping_and_constants() {
        let p = params(
            0.0,
            0.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.3, 0.1),
        );
        let h = assemble_h(&p, LatticeInterval::new(0, 2).unwrap());
        assert_eq!(h.diagonal, vec![0.0; 3]);
        assert_eq!(h.off_diagonal, vec![-1.0; 2]);

        let one = AnalyticTorusFunction::constant(1.0);
        let p = params(2.0, 1.0, one.clone(), one, Phase::new(0.3, 0.1));
        let h = assemble_h(&p, LatticeInterval::new(0, 1).unwrap());
        assert_eq!(h.diagonal, vec![1.0, 1.0]);
        assert_eq!(h.off_diagonal, vec![-1.0]);
    }

    #[test]
    fn jacobi_with_unit_weight_is_h0() {
        let p = params(
            3.0,
            0.7,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::constant(1.0),
            Phase::new(0.2, 0.4),
        );
        let i = LatticeInterval::new(-4, 6).unwrap();
        assert_eq!(
            assemble_jacobi(&p, i, 1e-6).unwrap(),
            assemble_h(&p.with_energy(0.0), i)
        );
    }

    #[test]
    fn jacobi_hand_arithmetic() {
        // ω = (½, ½) alternates the samples: w = (4, 1), λv = (8, 3)
        let v = AnalyticTorusFunction::from_trig(5.5, &[(1, 2.5, 0.0)]).unwrap();
        let w = AnalyticTorusFunction::from_trig(2.5, &[(1, 1.5, 0.0)]).unwrap();
        let p = ModelParameters::new(
            1.0,
            0.0,
            v,
            w,
            FrequencyVector::unchecked([0.5, 0.5]),
            Phase::origin(),
        )
        .unwrap();
        let h1 = assemble_jacobi(&p, LatticeInterval::new(0, 1).unwrap(), 1e-6).unwrap();
        assert!((h1.diagonal[0] - 2.0).abs() < 1e-15);
        assert!((h1.diagonal[1] - 3.0).abs() < 1e-14);
        assert!((h1.off_diagonal[0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn jacobi_rejects_small_weight() {
        let p = params(
            1.0,
            0.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.0, 0.0),
        );
        match assemble_jacobi(&p, LatticeInterval::new(-2, 2).unwrap(), 1e-8) {
            Err(Error::NearDegenerateWeight { site, .. }) => assert_eq!(site, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conjugation_identity() {
        let p = params(
            2.5,
            0.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.13, 0.29),
        );
        let i = LatticeInterval::new(0, 30).unwrap();
        let h1 = assemble_jacobi(&p, i, 1e-6).unwrap().to_dense();
        let w = weight_diagonal(&p, i);
        let s = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            31,
            w.iter().map(|x| x.sqrt()),
        ));
        let back = &s * h1 * &s;
        let h0 = assemble_h0(&p, i).to_dense();
        assert!((back - h0).amax() < 1e-10);
    }

    #[test]
    fn weighted_product() {
        assert_eq!(
            weighted_inner_product(&[1.0, 0.0], &[1.0, 0.0], &[3.0, 7.0]).unwrap(),
            3.0
        );
        assert_eq!(
            weighted_inner_product(&[1.0, 2.0], &[3.0, 4.0], &[1.0, 1.0]).unwrap(),
            11.0
        );
        assert!(weighted_inner_product(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
        // ⟨W^{-1/2}u′, W^{-1/2}u′⟩_w = ⟨u′, u′⟩
        let w = [0.3f64, 2.0, 5.5, 1e-3];
        let up = [1.0, -2.0, 0.5, 3.0];
        let u: Vec<f64> = up.iter().zip(&w).map(|(a, b)| a / b.sqrt()).collect();
        let lhs = weighted_inner_product(&u, &u, &w).unwrap();
        let rhs: f64 = up.iter().map(|x| x * x).sum();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn scaled_regimes() {
        let one = AnalyticTorusFunction::constant(1.0);
        let p = params(
            2.0,
            0.0,
            AnalyticTorusFunction::constant(2.0),
            one.clone(),
            Phase::origin(),
        );
        let s = scaled_h(&p, LatticeInterval::new(0, 0).unwrap(), Regime::Coupling).unwrap();
        assert_eq!(s.diagonal, vec![2.0]);
        assert!(scaled_h(&p, LatticeInterval::new(0, 0).unwrap(), Regime::Energy).is_err());
        let p = params(1.0, 10.0, one.clone(), one, Phase::origin());
        let s = scaled_h(&p, LatticeInterval::new(0, 3).unwrap(), Regime::Energy).unwrap();
        assert!(s.off_diagonal.iter().all(|e| (e.abs() - 0.1).abs() < 1e-16));
    }

    #[test]
    fn translation_covariance() {
        use crate::model::orbit;
        let p = params(
            7.0,
            1.3,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            Phase::new(0.41, 0.77),
        );
        let i = LatticeInterval::new(-10, 10).unwrap();
        for &k in &[1i64, -17, 1000, 123_456] {
            let shifted = p.with_phase(orbit(p.phase, &p.omega, k));
            let a = assemble_h(&shifted, i);
            let b = assemble_h(&p, i.shifted(k));
            for (x, y) in a.diagonal.iter().zip(&b.diagonal) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_negative_weight() {
        let r = ModelParameters::new(
            1.0,
            0.0,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::cosine(),
            FrequencyVector::golden_silver(),
            Phase::origin(),
        );
        assert!(matches!(r, Err(Error::InvalidWeight(_))));
    }
}
