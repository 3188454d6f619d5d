use serde::Serialize;

use super::goodness::{verify_goodness, GoodnessCriteria, GoodnessVerdict};
use super::matrix::{greens, greens_of};
use crate::operator::{LatticeInterval, ModelParameters, TridiagonalMatrix};
use crate::{Error, Result};

/// Inputs of the perturbation estimate: `T = D + S`, `T′ = D′ + S` on `Λ`
/// with `‖G_Λ‖ < B`, `|G_Λ(m,n)| < a e^{−γ|m−n|}` for `|m−n| > K` and
/// `|D′ − D| < ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationInstance {
    pub diagonal: Vec<f64>,
    pub perturbed_diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    pub interval: LatticeInterval,
    pub norm_bound: f64,
    pub range: f64,
    pub rate: f64,
    pub prefactor: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationVerdict {
    /// `ε 𝒩 B² e^{2γK}`.
    pub condition_value: f64,
    /// `condition_value < 1/2`.
    pub condition_holds: bool,
    /// `‖G′_Λ‖ < 2B`.
    pub norm_ok: bool,
    /// `|G′_Λ(m,n)| < (a+1) e^{−γ|m−n|}` for `|m−n| > K`.
    pub decay_ok: bool,
    pub norm: f64,
    pub perturbed_norm: f64,
    /// `max log(|G′(m,n)| e^{γ|m−n|} / (a+1))` over `|m−n| > K`.
    pub worst_decay_excess: f64,
}

/// Checks the hypotheses numerically, then the conclusions.
///
/// Besides the stated bounds the instance must satisfy `B e^{γK} ≥ 1` and
/// `a ≤ B e^{γK}`, under which `|G(m,n)| ≤ B e^{γK} e^{−γ|m−n|}` for all
/// pairs and the Neumann series argument is exact. A failed conclusion
/// under a satisfied smallness condition is a falsification.
pub fn perturbation_verify(inst: &PerturbationInstance) -> Result<PerturbationVerdict> {
    let n = inst.interval.size();
    for (name, len) in [
        ("diagonal", inst.diagonal.len()),
        ("perturbed diagonal", inst.perturbed_diagonal.len()),
    ] {
        if len != n {
            log::debug!("{name} length {len} against |Λ| = {n}");
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    if inst.off_diagonal.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: inst.off_diagonal.len(),
        });
    }
    let (b, k, gamma, a, eps) = (
        inst.norm_bound,
        inst.range,
        inst.rate,
        inst.prefactor,
        inst.epsilon,
    );
    if !(b > 0.0 && gamma > 0.0 && a > 0.0 && eps >= 0.0 && k >= 0.0) {
        return Err(Error::HypothesisNotSatisfied(
            "B, γ, a must be positive and ε, K nonnegative".into(),
        ));
    }
    if let Some(i) = (0..n).find(|&i| {
        !((inst.perturbed_diagonal[i] - inst.diagonal[i]).abs() < eps
            || eps == 0.0 && inst.perturbed_diagonal[i] == inst.diagonal[i])
    }) {
        return Err(Error::HypothesisNotSatisfied(format!(
            "|D′ − D| ≥ ε at site {}",
            inst.interval.a + i as i64
        )));
    }
    let log_envelope = b.ln() + gamma * k;
    if log_envelope < 0.0 {
        return Err(Error::HypothesisNotSatisfied("B e^{γK} < 1".into()));
    }
    if a.ln() > log_envelope {
        return Err(Error::HypothesisNotSatisfied("a > B e^{γK}".into()));
    }

    let t = TridiagonalMatrix::new(inst.diagonal.clone(), inst.off_diagonal.clone())?;
    let g = greens_of(&t, inst.interval)?;
    let before = verify_goodness(
        &g,
        &GoodnessCriteria {
            log_norm_bound: b.ln(),
            prefactor: a,
            rate: gamma,
            cutoff: k,
            strict: true,
            exponent: None,
        },
    );
    if !before.norm_ok {
        return Err(Error::HypothesisNotSatisfied(format!(
            "‖G_Λ‖ = {} ≥ B = {b}",
            g.operator_norm
        )));
    }
    if !before.decay_ok {
        return Err(Error::HypothesisNotSatisfied(format!(
            "|G_Λ| exceeds a e^(-γ|m-n|) at {:?}",
            before.worst_pair
        )));
    }

    let log_condition = if eps == 0.0 {
        f64::NEG_INFINITY
    } else {
        eps.ln() + (n as f64).ln() + 2.0 * b.ln() + 2.0 * gamma * k
    };
    let condition_value = log_condition.exp();
    let condition_holds = log_condition < 0.5f64.ln();

    let t2 = TridiagonalMatrix::new(inst.perturbed_diagonal.clone(), inst.off_diagonal.clone())?;
    let after = match greens_of(&t2, inst.interval) {
        Ok(g2) => Some(g2),
        Err(Error::Singular { .. }) => None,
        Err(e) => return Err(e),
    };
    let verdict = match after {
        Some(g2) => {
            let conclusion = verify_goodness(
                &g2,
                &GoodnessCriteria {
                    log_norm_bound: (2.0 * b).ln(),
                    prefactor: a + 1.0,
                    rate: gamma,
                    cutoff: k,
                    strict: true,
                    exponent: None,
                },
            );
            PerturbationVerdict {
                condition_value,
                condition_holds,
                norm_ok: conclusion.norm_ok,
                decay_ok: conclusion.decay_ok,
                norm: g.operator_norm,
                perturbed_norm: g2.operator_norm,
                worst_decay_excess: conclusion.worst_excess,
            }
        }
        None => PerturbationVerdict {
            condition_value,
            condition_holds,
            norm_ok: false,
            decay_ok: false,
            norm: g.operator_norm,
            perturbed_norm: f64::INFINITY,
            worst_decay_excess: f64::INFINITY,
        },
    };
    if condition_holds && !(verdict.norm_ok && verdict.decay_ok) {
        return Err(Error::Falsified(format!(
            "perturbation estimate failed with ε𝒩B²e^(2γK) = {condition_value:e}: ‖G′‖ = {:e} vs 2B = {:e}, decay excess {:e}",
            verdict.perturbed_norm,
            2.0 * b,
            verdict.worst_decay_excess
        )));
    }
    Ok(verdict)
}

/// Sub-intervals of size `m` starting at `I.a`, advancing by `stride`, with
/// the last one flush against `I.b`.
pub fn covering_family(
    interval: LatticeInterval,
    m: usize,
    stride: usize,
) -> Result<Vec<LatticeInterval>> {
    if m == 0 || stride == 0 {
        return Err(Error::InvalidArgument(
            "sub-interval size and stride must be positive".into(),
        ));
    }
    if m >= interval.size() {
        return Ok(vec![interval]);
    }
    let last = interval.b - m as i64 + 1;
    let mut out = Vec::new();
    let mut s = interval.a;
    while s < last {
        out.push(LatticeInterval {
            a: s,
            b: s + m as i64 - 1,
        });
        s += stride as i64;
    }
    out.push(LatticeInterval {
        a: last,
        b: interval.b,
    });
    Ok(out)
}

/// First `k ∈ I` whose window `[k − M/4, k + M/4] ∩ I` lies in no member of `family`.
pub fn first_uncovered(
    interval: LatticeInterval,
    family: &[LatticeInterval],
    m: usize,
) -> Option<i64> {
    let quarter = m as f64 / 4.0;
    interval.sites().find(|&k| {
        let lo = ((k as f64 - quarter).ceil() as i64).max(interval.a);
        let hi = ((k as f64 + quarter).floor() as i64).min(interval.b);
        !family.iter().any(|j| j.a <= lo && hi <= j.b)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PastingVerdict {
    pub sub_intervals: usize,
    /// `‖G_I‖ ≤ e^M`.
    pub norm_ok: bool,
    /// `|G_I(n₁,n₂)| ≤ e^{−|n₁−n₂|/4}` for `|n₁−n₂| > N/10`.
    pub decay_ok: bool,
    pub verdict: GoodnessVerdict,
}

impl PastingVerdict {
    pub fn holds(&self) -> bool {
        self.norm_ok && self.decay_ok
    }
}

/// Good sub-interval reports for a covering family, each judged by
/// [`GoodnessCriteria::pasting_hypothesis`].
pub fn screen_subintervals(
    p: &ModelParameters,
    family: &[LatticeInterval],
    m: usize,
    b: f64,
) -> Result<Vec<(LatticeInterval, GoodnessVerdict)>> {
    let criteria = GoodnessCriteria::pasting_hypothesis(m, b);
    family
        .iter()
        .map(|&j| Ok((j, verify_goodness(&greens(p, j)?, &criteria))))
        .collect()
}

/// Verifies the pasting hypotheses (covering, good size-`M` sub-intervals)
/// and then computes `G_I` directly to check the pasted conclusions.
pub fn paste_intervals(
    p: &ModelParameters,
    interval: LatticeInterval,
    sub_reports: &[(LatticeInterval, GoodnessVerdict)],
    m: usize,
    b: f64,
) -> Result<PastingVerdict> {
    let expected = GoodnessCriteria::pasting_hypothesis(m, b);
    for (j, verdict) in sub_reports {
        if !interval.contains_interval(j) {
            return Err(Error::InvalidArgument(format!(
                "sub-interval {j:?} is not inside {interval:?}"
            )));
        }
        if j.size() != m.min(interval.size()) {
            return Err(Error::HypothesisNotSatisfied(format!(
                "sub-interval {j:?} does not have size {m}"
            )));
        }
        let wanted = if j.size() == m {
            expected
        } else {
            GoodnessCriteria::pasting_hypothesis(j.size(), b)
        };
        if verdict.criteria != wanted {
            return Err(Error::HypothesisNotSatisfied(format!(
                "sub-interval {j:?} was judged with different criteria"
            )));
        }
        if !verdict.is_good() {
            return Err(Error::HypothesisNotSatisfied(format!(
                "sub-interval {j:?} is not good"
            )));
        }
    }
    let family: Vec<LatticeInterval> = sub_reports.iter().map(|(j, _)| *j).collect();
    if let Some(site) = first_uncovered(interval, &family, m) {
        return Err(Error::CoveringViolation { site });
    }
    let g = greens(p, interval)?;
    let verdict = verify_goodness(
        &g,
        &GoodnessCriteria::pasting_conclusion(interval.size(), m),
    );
    Ok(PastingVerdict {
        sub_intervals: sub_reports.len(),
        norm_ok: verdict.norm_ok,
        decay_ok: verdict.decay_ok,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::matrix::greens_of;
    use crate::model::{AnalyticTorusFunction, FrequencyVector, Phase};

    fn instance(eps_factor: f64) -> PerturbationInstance {
        let n = 30;
        let diagonal: Vec<f64> = (0..n)
            .map(|i| 10.0 + 3.0 * ((i as f64) * 0.7).sin())
            .collect();
        let off = vec![-1.0; n - 1];
        let interval = LatticeInterval::new(0, n as i64 - 1).unwrap();
        let g = greens_of(
            &TridiagonalMatrix::new(diagonal.clone(), off.clone()).unwrap(),
            interval,
        )
        .unwrap();
        let (rate, range) = (1.0, 3.0);
        let norm_bound = 1.5 * g.operator_norm.max(1.0);
        let mut prefactor: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = i.abs_diff(j) as f64;
                if d > range {
                    prefactor = prefactor.max(g.entries[(i, j)].abs() * (rate * d).exp());
                }
            }
        }
        let prefactor = 1.01 * prefactor;
        let epsilon = eps_factor / (n as f64 * norm_bound.powi(2) * (2.0 * rate * range).exp());
        let perturbed_diagonal = diagonal
            .iter()
            .enumerate()
            .map(|(i, d)| d + 0.999 * epsilon * if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        PerturbationInstance {
            diagonal,
            perturbed_diagonal,
            off_diagonal: off,
            interval,
            norm_bound,
            range,
            rate,
            prefactor,
            epsilon,
        }
    }

    #[test]
    fn unperturbed_holds() {
        let mut inst = instance(0.0);
        inst.epsilon = 0.0;
        inst.perturbed_diagonal = inst.diagonal.clone();
        let v = perturbation_verify(&inst).unwrap();
        assert!(v.condition_holds && v.norm_ok && v.decay_ok);
        assert_eq!(v.norm, v.perturbed_norm);
    }

    #[test]
    fn boundary_of_condition() {
        let v = perturbation_verify(&instance(0.49)).unwrap();
        assert!(v.condition_holds);
        assert!((v.condition_value - 0.49).abs() < 1e-12);
        assert!(v.norm_ok && v.decay_ok);
    }

    #[test]
    fn hypothesis_failure_is_distinct() {
        let mut inst = instance(0.3);
        inst.norm_bound = 1e-3;
        assert!(matches!(
            perturbation_verify(&inst),
            Err(Error::HypothesisNotSatisfied(_))
        ));
        let mut inst = instance(0.3);
        inst.perturbed_diagonal[4] += inst.epsilon;
        assert!(matches!(
            perturbation_verify(&inst),
            Err(Error::HypothesisNotSatisfied(_))
        ));
    }

    #[test]
    fn covering_family_covers() {
        let i = LatticeInterval::new(0, 99).unwrap();
        let fam = covering_family(i, 25, 12).unwrap();
        assert_eq!(fam.last().unwrap().b, 99);
        assert_eq!(first_uncovered(i, &fam, 25), None);
        let gap: Vec<LatticeInterval> = fam
            .iter()
            .copied()
            .filter(|j| j.a > 60 || j.b < 40)
            .collect();
        assert!(first_uncovered(i, &gap, 25).is_some());
    }

    fn calibration(phase: Phase) -> ModelParameters {
        ModelParameters::new(
            1e4,
            5e3,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            FrequencyVector::golden_silver(),
            phase,
        )
        .unwrap()
    }

    #[test]
    fn single_interval_pasting() {
        let p = calibration(Phase::new(0.2, 0.3));
        let i = LatticeInterval::new(0, 24).unwrap();
        let reports = screen_subintervals(&p, &[i], 25, 0.9).unwrap();
        if reports[0].1.is_good() {
            let v = paste_intervals(&p, i, &reports, 25, 0.9).unwrap();
            assert!(v.holds());
        }
    }

    #[test]
    fn broken_covering_is_reported() {
        let p = calibration(Phase::new(0.2, 0.3));
        let i = LatticeInterval::new(0, 99).unwrap();
        let fam: Vec<LatticeInterval> = covering_family(i, 25, 12)
            .unwrap()
            .into_iter()
            .filter(|j| j.b < 45 || j.a > 55)
            .collect();
        let reports = screen_subintervals(&p, &fam, 25, 0.9).unwrap();
        let reports: Vec<_> = reports.into_iter().filter(|r| r.1.is_good()).collect();
        assert!(matches!(
            paste_intervals(&p, i, &reports, 25, 0.9),
            Err(Error::CoveringViolation { .. })
        ));
    }
}
