use serde::Serialize;

use super::phase::canonical;
use super::torus::AnalyticTorusFunction;
use crate::{Error, Result};

/// Grid values below this fraction of the maximum count as rounding noise
/// rather than genuine negativity.
const NEGATIVE_TOL: f64 = 1e-12;
/// A refined local minimum is a zero when `w(y*) ≤ ZERO_TOL · max w`.
const ZERO_TOL: f64 = 1e-10;
/// Largest dyadic radius used for order estimation.
const ORDER_RADIUS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightZero {
    pub location: f64,
    pub order: u32,
}

/// A nonnegative analytic weight together with its real zeros and the
/// constants of the lower bound `w(y) ≥ c_w · min_i ‖y − y_i‖^{C_w}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    pub base: AnalyticTorusFunction,
    pub zeros: Vec<WeightZero>,
    /// `C_w`, the largest zero order; 0 when `w` has no zeros.
    pub max_order: u32,
    /// `c_w`.
    pub lower_constant: f64,
    pub grid_resolution: f64,
}

impl WeightFunction {
    pub fn evaluate(&self, y: f64) -> f64 {
        self.base.evaluate(y)
    }

    /// `min_i ‖y − y_i‖`; 1 when there are no zeros.
    pub fn distance_to_zeros(&self, y: f64) -> f64 {
        distance_to_set(y, self.zeros.iter().map(|z| z.location))
    }

    /// `c_w · min_i ‖y − y_i‖^{C_w}`.
    pub fn lower_bound(&self, y: f64) -> f64 {
        self.lower_constant * self.distance_to_zeros(y).powi(self.max_order as i32)
    }

    /// Grid points of `{j / points}` where `w(y) < c_w · dist^{C_w} − slack`.
    /// `slack` absorbs evaluation rounding where both sides vanish.
    pub fn lower_bound_violations(&self, points: usize, slack: f64) -> Vec<f64> {
        (0..points)
            .map(|j| j as f64 / points as f64)
            .filter(|&y| self.evaluate(y) < self.lower_bound(y) - slack)
            .collect()
    }
}

/// Torus distance from `y` to the nearest point of `set`; 1 for an empty set.
pub fn distance_to_set(y: f64, set: impl IntoIterator<Item = f64>) -> f64 {
    set.into_iter()
        .map(|z| torus_distance(y, z))
        .fold(1.0, f64::min)
}

/// `‖a − b‖`, distance to the nearest integer.
pub fn torus_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Locates the real zeros of `w`, estimates their orders and computes
/// `c_w` on a grid of spacing at most `grid_resolution`.
pub fn weight_zero_analysis(
    w: &AnalyticTorusFunction,
    grid_resolution: f64,
) -> Result<WeightFunction> {
    if !(grid_resolution > 0.0 && grid_resolution <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must lie in (0, 0.5], got {grid_resolution}"
        )));
    }
    let n = (1.0 / grid_resolution).ceil() as usize;
    let grid: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&y| w.evaluate(y)).collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::InvalidWeight(
            "weight is identically zero or nonpositive".into(),
        ));
    }
    if let Some((j, &v)) = values
        .iter()
        .enumerate()
        .find(|(_, &v)| v < -NEGATIVE_TOL * max)
    {
        return Err(Error::InvalidWeight(format!(
            "negative value {v:e} at y = {}",
            grid[j]
        )));
    }

    let h = 1.0 / n as f64;
    let mut locations: Vec<f64> = Vec::new();
    for j in 0..n {
        let prev = values[(j + n - 1) % n];
        let next = values[(j + 1) % n];
        if values[j] > prev || values[j] > next || values[j] > 1e-3 * max {
            continue;
        }
        let y = canonical(refine_minimum(w, grid[j] - h, grid[j] + h));
        if w.evaluate(y) <= ZERO_TOL * max
            && locations.iter().all(|&z| torus_distance(z, y) > 2.0 * h)
        {
            locations.push(y);
        }
    }
    locations.sort_by(f64::total_cmp);

    let zeros: Vec<WeightZero> = locations
        .iter()
        .map(|&y| {
            let others = distance_to_set(y, locations.iter().copied().filter(|&z| z != y));
            WeightZero {
                location: y,
                order: estimate_order(w, y, ORDER_RADIUS.min(others / 4.0)),
            }
        })
        .collect();
    let max_order = zeros.iter().map(|z| z.order).max().unwrap_or(0);

    let ratio = |y: f64| {
        w.evaluate(y) / distance_to_set(y, locations.iter().copied()).powi(max_order as i32)
    };
    // values at rounding level carry no information about the ratio
    let noise = 64.0 * f64::EPSILON * w.sup_bound();
    let mut best = (f64::INFINITY, 0.0);
    for (&y, &v) in grid.iter().zip(&values) {
        let d = distance_to_set(y, locations.iter().copied());
        if d <= 1e-9 || v <= noise {
            continue;
        }
        let r = v / d.powi(max_order as i32);
        if r < best.0 {
            best = (r, y);
        }
    }
    // golden-section polish so the constant also holds between grid points
    let polished = golden_min(&ratio, best.1 - h, best.1 + h, 60);
    let lower_constant = best.0.min(polished.1);
    if !(lower_constant > 0.0) {
        return Err(Error::InvalidWeight(format!(
            "lower-bound constant is not positive ({lower_constant:e})"
        )));
    }
    Ok(WeightFunction {
        base: w.clone(),
        zeros,
        max_order,
        lower_constant,
        grid_resolution: h,
    })
}

/// Bisection on `w′` when it changes sign on `[lo, hi]`, otherwise golden section on `w`.
fn refine_minimum(w: &AnalyticTorusFunction, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    if w.derivative(a, 1) < 0.0 && w.derivative(b, 1) > 0.0 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if w.derivative(m, 1) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    }
    golden_min(&|y| w.evaluate(y), lo, hi, 100).0
}

fn golden_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Log-log slope of the symmetric average `(w(y+r) + w(y−r))/2` over the
/// radii `r₀, r₀/2, r₀/4`, rounded to the nearest integer with ties upward.
fn estimate_order(w: &AnalyticTorusFunction, y: f64, r0: f64) -> u32 {
    let radii = [r0, r0 / 2.0, r0 / 4.0];
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let m = 0.5 * (w.evaluate(y + r) + w.evaluate(y - r));
            (r.ln(), m.max(f64::MIN_POSITIVE).ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    ((slope + 0.5).floor() as i64).max(1) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_squared_zeros() {
        let wf = weight_zero_analysis(&AnalyticTorusFunction::sin_squared(), 1e-4).unwrap();
        assert_eq!(wf.zeros.len(), 2);
        assert!(
            torus_distance(wf.zeros[0].location, 0.0) < 1e-8,
            "{:?}",
            wf.zeros
        );
        assert!((wf.zeros[1].location - 0.5).abs() < 1e-8);
        assert!(wf.zeros.iter().all(|z| z.order == 2));
        assert_eq!(wf.max_order, 2);
    }

    #[test]
    fn one_plus_cosine_zero() {
        let wf = weight_zero_analysis(&AnalyticTorusFunction::one_plus_cosine(), 1e-4).unwrap();
        assert_eq!(wf.zeros.len(), 1);
        assert!((wf.zeros[0].location - 0.5).abs() < 1e-8);
        assert_eq!(wf.zeros[0].order, 2);
    }

    #[test]
    fn sin_squared_constant_matches_grid_oracle() {
        let wf = weight_zero_analysis(&AnalyticTorusFunction::sin_squared(), 1e-4).unwrap();
        let n = 100_000;
        let oracle = (0..n)
            .map(|j| j as f64 / n as f64)
            .filter_map(|y| {
                let d = y.min(1.0 - y).min((y - 0.5).abs());
                (d > 0.0).then(|| (2.0 * std::f64::consts::PI * y).sin().powi(2) / (d * d))
            })
            .fold(f64::INFINITY, f64::min);
        assert!((wf.lower_constant - oracle).abs() <= 0.05 * oracle);
        assert!(wf.lower_constant <= oracle * (1.0 + 1e-12));
    }

    #[test]
    fn lower_bound_holds_on_grid() {
        let wf = weight_zero_analysis(&AnalyticTorusFunction::sin_squared(), 1e-4).unwrap();
        assert!(wf.lower_bound_violations(10_000, 1e-15).is_empty());
    }

    #[test]
    fn positive_weight_has_no_zeros() {
        let w = AnalyticTorusFunction::from_trig(2.0, &[(1, 0.5, 0.0)]).unwrap();
        let wf = weight_zero_analysis(&w, 1e-3).unwrap();
        assert!(wf.zeros.is_empty());
        assert_eq!(wf.max_order, 0);
        assert!((wf.lower_constant - 1.5).abs() < 1e-6);
    }

    #[test]
    fn quartic_zero_order() {
        // sin⁴(πy) = 3/8 − ½cos(2πy) + ⅛cos(4πy)
        let w =
            AnalyticTorusFunction::from_trig(0.375, &[(1, -0.5, 0.0), (2, 0.125, 0.0)]).unwrap();
        let wf = weight_zero_analysis(&w, 1e-4).unwrap();
        assert_eq!(wf.zeros.len(), 1);
        assert_eq!(wf.zeros[0].order, 4);
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(matches!(
            weight_zero_analysis(&AnalyticTorusFunction::constant(0.0), 1e-3),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            weight_zero_analysis(&AnalyticTorusFunction::cosine(), 1e-3),
            Err(Error::InvalidWeight(_))
        ));
    }
}
