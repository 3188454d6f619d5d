use serde::{Deserialize, Serialize};

use super::matrix::GreensMatrix;

/// Bounds a Green's matrix is tested against:
/// `‖G‖ < e^{log_norm_bound}` and
/// `|G(m,n)| < prefactor · e^{−rate |m−n|}` for `|m−n| > cutoff`.
/// With `strict = false` both comparisons are `≤`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessCriteria {
    pub log_norm_bound: f64,
    pub prefactor: f64,
    pub rate: f64,
    pub cutoff: f64,
    pub strict: bool,
    /// Norm exponent `b` when the bound has the form `N^b`.
    pub exponent: Option<f64>,
}

impl GoodnessCriteria {
    /// `‖G_N‖ < e^{N^b}`, `|G_N(m,n)| < 10 e^{−γ|m−n|}` for `|m−n| > N/10`.
    pub fn ldt(scale: f64, b: f64, gamma: f64) -> Self {
        GoodnessCriteria {
            log_norm_bound: scale.powf(b),
            prefactor: 10.0,
            rate: gamma,
            cutoff: scale / 10.0,
            strict: true,
            exponent: Some(b),
        }
    }

    /// Sub-interval hypothesis of the pasting lemma at size `M`:
    /// `‖G‖ ≤ e^{M^b}`, `|G| ≤ 10 e^{−|m−n|/2}` for `|m−n| > M/10`.
    pub fn pasting_hypothesis(m: usize, b: f64) -> Self {
        GoodnessCriteria {
            log_norm_bound: (m as f64).powf(b),
            prefactor: 10.0,
            rate: 0.5,
            cutoff: m as f64 / 10.0,
            strict: false,
            exponent: Some(b),
        }
    }

    /// Pasted conclusion on an interval of size `N` covered at scale `M`:
    /// `‖G‖ ≤ e^M`, `|G| ≤ e^{−|m−n|/4}` for `|m−n| > N/10`.
    pub fn pasting_conclusion(n: usize, m: usize) -> Self {
        GoodnessCriteria {
            log_norm_bound: m as f64,
            prefactor: 1.0,
            rate: 0.25,
            cutoff: n as f64 / 10.0,
            strict: false,
            exponent: None,
        }
    }

    fn holds(&self, excess: f64) -> bool {
        if self.strict {
            excess < 0.0
        } else {
            excess <= 0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessVerdict {
    pub norm_ok: bool,
    pub decay_ok: bool,
    pub criteria: GoodnessCriteria,
    /// `log ‖G‖`.
    pub log_norm: f64,
    /// Pair in the cutoff region maximizing `log|G(m,n)| − log(prefactor) + rate·|m−n|`.
    pub worst_pair: Option<(i64, i64)>,
    /// That maximum; negative means the decay bound holds with margin.
    pub worst_excess: f64,
}

impl GoodnessVerdict {
    pub fn is_good(&self) -> bool {
        self.norm_ok && self.decay_ok
    }
}

/// Large-deviation bounds at scale `N`: `‖G‖ < e^{N^b}` and
/// `|G(m,n)| < 10 e^{−γ|m−n|}` for `|m−n| > N/10`.
pub fn verify_ldt_bounds(g: &GreensMatrix, scale: f64, b: f64, gamma: f64) -> GoodnessVerdict {
    verify_goodness(g, &GoodnessCriteria::ldt(scale, b, gamma))
}

/// Checks both bounds in the log domain, so underflowed entries pass and
/// nothing overflows.
pub fn verify_goodness(g: &GreensMatrix, criteria: &GoodnessCriteria) -> GoodnessVerdict {
    let n = g.size();
    let log_pref = criteria.prefactor.ln();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = (j - i) as f64;
            if d <= criteria.cutoff {
                continue;
            }
            let excess = g.entries[(i, j)].abs().ln() - log_pref + criteria.rate * d;
            if excess > worst || worst_pair.is_none() {
                worst = excess;
                worst_pair = Some((g.interval.a + i as i64, g.interval.a + j as i64));
            }
        }
    }
    let log_norm = g.operator_norm.ln();
    GoodnessVerdict {
        norm_ok: criteria.holds(log_norm - criteria.log_norm_bound),
        decay_ok: worst_pair.is_none() || criteria.holds(worst),
        criteria: *criteria,
        log_norm,
        worst_pair,
        worst_excess: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::LatticeInterval;
    use nalgebra::DMatrix;

    #[test]
    fn exponential_entries_are_good() {
        let interval = LatticeInterval::centered(50);
        let n = interval.size();
        let e = DMatrix::from_fn(n, n, |i, j| (-(i.abs_diff(j) as f64)).exp());
        let g = GreensMatrix::from_entries(e, interval).unwrap();
        let v = verify_ldt_bounds(&g, 50.0, 0.9, 0.5);
        assert!(v.norm_ok && v.decay_ok);
    }

    #[test]
    fn large_identity_fails_norm() {
        let interval = LatticeInterval::centered(10);
        let n = interval.size();
        let g = GreensMatrix::from_entries(DMatrix::identity(n, n) * 1e6, interval).unwrap();
        let v = verify_ldt_bounds(&g, 10.0, 0.5, 0.5);
        assert!(!v.norm_ok);
        assert!(v.decay_ok);
    }

    #[test]
    fn verdict_is_recomputable() {
        let interval = LatticeInterval::new(0, 39).unwrap();
        let e = DMatrix::from_fn(40, 40, |i, j| 20.0 * (-0.4 * i.abs_diff(j) as f64).exp());
        let g = GreensMatrix::from_entries(e, interval).unwrap();
        let v = verify_ldt_bounds(&g, 40.0, 0.9, 0.5);
        let brute_decay = (0..40usize).all(|i| {
            (0..40usize).all(|j| {
                let d: f64 = i.abs_diff(j) as f64;
                d <= 4.0 || g.entries[(i, j)].abs() < 10.0 * (-0.5 * d).exp()
            })
        });
        assert_eq!(v.decay_ok, brute_decay);
        assert_eq!(v.norm_ok, g.operator_norm < 40f64.powf(0.9).exp());
        assert!(!v.decay_ok);
        // slowest decay sits at the largest distance
        assert_eq!(v.worst_pair, Some((0, 39)));
    }
}
