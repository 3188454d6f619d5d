use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::Phase;
use super::torus::AnalyticTorusFunction;
use crate::{Error, Result};

/// How a subset of `𝕋²` is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    /// `resolution` rows at cell centers `y_j = (j + ½)/R`; each row is
    /// integrated along `x`.
    Grid { resolution: usize },
    /// `points` uniform samples from a ChaCha8 stream seeded with `seed`.
    MonteCarlo { points: usize, seed: u64 },
}

impl Sampler {
    /// Sampled phases: cell centers in row-major order (`y` outer) for a
    /// grid, the seeded stream for Monte Carlo.
    pub fn phases(&self) -> Vec<Phase> {
        match *self {
            Sampler::Grid { resolution } => {
                let r = resolution as f64;
                (0..resolution)
                    .flat_map(|j| {
                        (0..resolution)
                            .map(move |i| Phase::new((i as f64 + 0.5) / r, (j as f64 + 0.5) / r))
                    })
                    .collect()
            }
            Sampler::MonteCarlo { points, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..points)
                    .map(|_| Phase::new(rng.gen(), rng.gen()))
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Sampler::Grid { resolution } => resolution * resolution,
            Sampler::MonteCarlo { points, .. } => points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::Grid { resolution: 2048 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SublevelEstimate {
    pub measure: f64,
    pub std_error: f64,
    pub samples: u64,
    pub sampler: Sampler,
}

/// Estimate of `mes{(x, y) : |v(x) − ratio·w(y)| < ε}`.
///
/// On a grid each row is integrated exactly up to bisection of the level
/// crossings between neighboring `x` nodes; sets narrower than one `x`
/// cell that touch no node are missed.
pub fn sublevel_measure(
    v: &AnalyticTorusFunction,
    w: &AnalyticTorusFunction,
    ratio: f64,
    eps: f64,
    sampler: Sampler,
) -> Result<SublevelEstimate> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {eps}"
        )));
    }
    match sampler {
        Sampler::Grid { resolution } => {
            if resolution < 2 {
                return Err(Error::InvalidArgument("grid resolution must be ≥ 2".into()));
            }
            let r = resolution;
            let xs: Vec<f64> = (0..=r).map(|i| i as f64 / r as f64).collect();
            let vs: Vec<f64> = xs.iter().map(|&x| v.evaluate(x)).collect();
            let rows: Vec<f64> = (0..r)
                .into_par_iter()
                .map(|j| {
                    let c = ratio * w.evaluate((j as f64 + 0.5) / r as f64);
                    row_measure(v, &xs, &vs, c, eps)
                })
                .collect();
            let mean = rows.iter().sum::<f64>() / r as f64;
            let var = rows.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (r as f64 - 1.0);
            Ok(SublevelEstimate {
                measure: mean,
                std_error: (var / r as f64).sqrt(),
                samples: (r * r) as u64,
                sampler,
            })
        }
        Sampler::MonteCarlo { points, seed } => {
            if points == 0 {
                return Err(Error::InvalidArgument(
                    "Monte Carlo needs at least one point".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hits = (0..points)
                .filter(|_| {
                    let (x, y): (f64, f64) = (rng.gen(), rng.gen());
                    (v.evaluate(x) - ratio * w.evaluate(y)).abs() < eps
                })
                .count();
            let p = hits as f64 / points as f64;
            Ok(SublevelEstimate {
                measure: p,
                std_error: (p * (1.0 - p) / points as f64).sqrt(),
                samples: points as u64,
                sampler,
            })
        }
    }
}

fn row_measure(v: &AnalyticTorusFunction, xs: &[f64], vs: &[f64], c: f64, eps: f64) -> f64 {
    let g = |val: f64| (val - c).abs() - eps;
    let mut total = 0.0;
    for i in 0..xs.len() - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let (ga, gb) = (g(vs[i]), g(vs[i + 1]));
        if ga < 0.0 && gb < 0.0 {
            total += b - a;
        } else if ga < 0.0 || gb < 0.0 {
            let root = bisect(|x| g(v.evaluate(x)), a, b, ga);
            total += if ga < 0.0 { root - a } else { b - root };
        }
    }
    total
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg_left = fa < 0.0;
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) < 0.0) == neg_left {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// Fitted exponent `c` in `mes ≈ C ε^c`.
    pub exponent: f64,
    pub prefactor: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least-squares fit of `log mes` against `log ε`; reported, never asserted.
pub fn sublevel_power_law(
    v: &AnalyticTorusFunction,
    w: &AnalyticTorusFunction,
    ratio: f64,
    thresholds: &[f64],
    sampler: Sampler,
) -> Result<PowerLawFit> {
    let mut points = Vec::new();
    for &eps in thresholds {
        let m = sublevel_measure(v, w, ratio, eps, sampler)?.measure;
        if m > 0.0 {
            points.push((eps, m));
        }
    }
    if points.len() < 2 {
        return Err(Error::DegenerateFit(
            "fewer than two thresholds with positive measure".into(),
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0.ln() - mx) * (p.1.ln() - my))
        .sum();
    let sxx: f64 = points.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("thresholds are all equal".into()));
    }
    let exponent = sxy / sxx;
    Ok(PowerLawFit {
        exponent,
        prefactor: (my - exponent * mx).exp(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sampler_phases() {
        let g = Sampler::Grid { resolution: 4 }.phases();
        assert_eq!(g.len(), 16);
        assert_eq!((g[1].x, g[1].y), (0.375, 0.125));
        let mc = Sampler::MonteCarlo {
            points: 10,
            seed: 3,
        };
        assert_eq!(mc.phases(), mc.phases());
        assert_eq!(mc.len(), 10);
    }

    #[test]
    fn constant_potential_misses_zero() {
        let one = AnalyticTorusFunction::constant(1.0);
        let w = AnalyticTorusFunction::sin_squared();
        let m = sublevel_measure(&one, &w, 0.0, 0.5, Sampler::default()).unwrap();
        assert_eq!(m.measure, 0.0);
    }

    #[test]
    fn cosine_level_width() {
        let v = AnalyticTorusFunction::cosine();
        let w = AnalyticTorusFunction::sin_squared();
        let eps = 1e-2;
        let m = sublevel_measure(&v, &w, 0.0, eps, Sampler::default()).unwrap();
        let oracle = 2.0 / PI * eps.asin();
        assert!(
            (m.measure - oracle).abs() <= 1e-3 * oracle,
            "{} vs {}",
            m.measure,
            oracle
        );
    }

    #[test]
    fn large_threshold_covers_torus() {
        let v = AnalyticTorusFunction::cosine();
        let w = AnalyticTorusFunction::sin_squared();
        let ratio = 0.7;
        let m = sublevel_measure(&v, &w, ratio, 2.0 + ratio * 1.0, Sampler::default()).unwrap();
        assert_eq!(m.measure, 1.0);
    }

    #[test]
    fn monte_carlo_is_seeded_and_consistent() {
        let v = AnalyticTorusFunction::cosine();
        let w = AnalyticTorusFunction::sin_squared();
        let s = Sampler::MonteCarlo {
            points: 20_000,
            seed: 7,
        };
        let a = sublevel_measure(&v, &w, 0.5, 0.1, s).unwrap();
        let b = sublevel_measure(&v, &w, 0.5, 0.1, s).unwrap();
        assert_eq!(a, b);
        let g = sublevel_measure(&v, &w, 0.5, 0.1, Sampler::Grid { resolution: 512 }).unwrap();
        assert!((a.measure - g.measure).abs() < 5.0 * a.std_error + 1e-3);
    }

    #[test]
    fn cosine_power_law_is_linear() {
        let v = AnalyticTorusFunction::cosine();
        let w = AnalyticTorusFunction::sin_squared();
        let fit = sublevel_power_law(
            &v,
            &w,
            0.0,
            &[1e-3, 3e-3, 1e-2],
            Sampler::Grid { resolution: 256 },
        )
        .unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.05);
    }
}
