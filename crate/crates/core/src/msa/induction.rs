use rayon::prelude::*;
use serde::Serialize;

use super::badset::{assemble_report, estimate_unchecked, BadCell, BadSetReport, PhaseVerdict};
use super::ladder::ScaleLadder;
use crate::greens::{
    covering_family, greens, paste_intervals, screen_subintervals, verify_ldt_bounds,
    PastingVerdict,
};
use crate::model::{Phase, Sampler};
use crate::operator::{LatticeInterval, ModelParameters};
use crate::{Error, Result};

/// One induction step `N̄ → N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleReport {
    pub previous: usize,
    /// Scale `N`; phases are judged on `[−N, N]`.
    pub scale: usize,
    /// Sub-interval size `M₀`.
    pub sub_size: usize,
    pub subintervals_per_phase: usize,
    /// `N^{1−δ}`.
    pub bad_budget: f64,
    /// Largest number of disjoint bad sub-intervals seen at one phase.
    pub max_bad_subintervals: usize,
    /// Phases exceeding the disjoint-bad budget.
    pub over_budget: usize,
    /// Phases whose good sub-intervals still cover `[−N, N]`, so pasting ran.
    pub pasted: usize,
    /// Pasted phases whose conclusions held.
    pub pasting_held: usize,
    /// Pasted phases whose conclusions failed although every hypothesis held.
    pub pasting_failures: usize,
    /// Ground-truth classification of `G_N` at every sampled phase.
    pub bad_set: BadSetReport,
    /// Green's function evaluations spent on this step.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InductionReport {
    pub ladder: ScaleLadder,
    pub base: BadSetReport,
    pub steps: Vec<ScaleReport>,
    pub evaluations: usize,
}

impl InductionReport {
    /// Bad fractions at every scale, base first.
    pub fn bad_fractions(&self) -> Vec<f64> {
        std::iter::once(self.base.bad_fraction)
            .chain(self.steps.iter().map(|s| s.bad_set.bad_fraction))
            .collect()
    }

    pub fn pasting_failures(&self) -> usize {
        self.steps.iter().map(|s| s.pasting_failures).sum()
    }
}

struct PhaseOutcome {
    verdict: PhaseVerdict,
    bad_disjoint: usize,
    pasting: Option<PastingVerdict>,
}

/// Runs the ladder: the first scale by direct classification, each later
/// scale by screening size-`M₀` sub-intervals, pasting where the good ones
/// cover `[−N, N]`, and classifying `G_N` directly. `budget` caps the total
/// number of Green's function evaluations; a step that would exceed it
/// fails with [`Error::BudgetExhausted`] before it starts.
pub fn inductive_scale_verify(
    ladder: &ScaleLadder,
    p: &ModelParameters,
    sampler: Sampler,
    budget: Option<usize>,
) -> Result<InductionReport> {
    let ex = &ladder.exponents;
    let phases = sampler.phases();
    if phases.is_empty() {
        return Err(Error::InvalidArgument("sampler produced no phases".into()));
    }
    let mut used = 0usize;
    let mut charge = |scale: usize, cost: usize| -> Result<()> {
        if budget.is_some_and(|b| used + cost > b) {
            return Err(Error::BudgetExhausted { scale, used });
        }
        used += cost;
        Ok(())
    };
    charge(ladder.scales[0], phases.len())?;
    let base = estimate_unchecked(p, ladder.scales[0], sampler, ex)?;
    let mut steps = Vec::new();
    for w in ladder.scales.windows(2) {
        let (previous, scale) = (w[0], w[1]);
        let interval = LatticeInterval::centered(scale as u64);
        let m = ex.sub_scale(scale).min(interval.size());
        let family = covering_family(interval, m, (m / 4).max(1))?;
        let cost = phases.len() * (family.len() + 2);
        charge(scale, cost)?;
        let outcomes: Vec<PhaseOutcome> = phases
            .par_iter()
            .map(|&phase| step_phase(&p.with_phase(phase), phase, interval, &family, m, ladder))
            .collect::<Result<_>>()?;
        let budget_n = ex.bad_budget(scale);
        let bad_cells: Vec<BadCell> = outcomes
            .iter()
            .filter_map(|o| {
                let v = &o.verdict;
                v.reason().map(|reason| BadCell {
                    x: v.phase.x,
                    y: v.phase.y,
                    scale,
                    energy: p.energy,
                    reason,
                })
            })
            .collect();
        let pasted: Vec<&PastingVerdict> =
            outcomes.iter().filter_map(|o| o.pasting.as_ref()).collect();
        let held = pasted.iter().filter(|v| v.holds()).count();
        steps.push(ScaleReport {
            previous,
            scale,
            sub_size: m,
            subintervals_per_phase: family.len(),
            bad_budget: budget_n,
            max_bad_subintervals: outcomes.iter().map(|o| o.bad_disjoint).max().unwrap_or(0),
            over_budget: outcomes
                .iter()
                .filter(|o| o.bad_disjoint as f64 > budget_n)
                .count(),
            pasted: pasted.len(),
            pasting_held: held,
            pasting_failures: pasted.len() - held,
            bad_set: assemble_report(p, scale, sampler, ex, phases.len(), bad_cells),
            evaluations: cost,
        });
    }
    Ok(InductionReport {
        ladder: ladder.clone(),
        base,
        steps,
        evaluations: used,
    })
}

fn step_phase(
    p: &ModelParameters,
    phase: Phase,
    interval: LatticeInterval,
    family: &[LatticeInterval],
    m: usize,
    ladder: &ScaleLadder,
) -> Result<PhaseOutcome> {
    let ex = &ladder.exponents;
    let screened = match screen_subintervals(p, family, m, ex.b) {
        Ok(s) => Some(s),
        Err(Error::Singular { .. }) => None,
        Err(e) => return Err(e),
    };
    let (bad_disjoint, pasting) = match screened {
        Some(reports) => {
            let mut count = 0;
            let mut last_end = i64::MIN;
            for (j, v) in &reports {
                if !v.is_good() && j.a > last_end {
                    count += 1;
                    last_end = j.b;
                }
            }
            let pasting = if count == 0 {
                match paste_intervals(p, interval, &reports, m, ex.b) {
                    Ok(v) => Some(v),
                    Err(Error::Singular { .. }) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            (count, pasting)
        }
        None => (1, None),
    };
    let verdict = match greens(p, interval) {
        Ok(g) => Some(verify_ldt_bounds(&g, interval.b as f64, ex.b, ex.gamma)),
        Err(Error::Singular { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(PhaseOutcome {
        verdict: PhaseVerdict { phase, verdict },
        bad_disjoint,
        pasting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnalyticTorusFunction, FrequencyVector};
    use crate::msa::{bad_set_estimate, MsaExponents};

    fn calibration(energy: f64) -> ModelParameters {
        ModelParameters::new(
            1e4,
            energy,
            AnalyticTorusFunction::cosine(),
            AnalyticTorusFunction::sin_squared(),
            FrequencyVector::golden_silver(),
            Phase::origin(),
        )
        .unwrap()
    }

    #[test]
    fn single_scale_reduces_to_bad_set_estimate() {
        let p = calibration(5e3);
        let sampler = Sampler::Grid { resolution: 64 };
        let ladder = ScaleLadder::new(vec![10], MsaExponents::default()).unwrap();
        let r = inductive_scale_verify(&ladder, &p, sampler, None).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(
            r.base,
            bad_set_estimate(&p, 10, sampler, &ladder.exponents).unwrap()
        );
    }

    #[test]
    fn two_scale_calibration() {
        let p = calibration(5e3);
        let e = MsaExponents {
            delta: 0.5,
            ..Default::default()
        };
        let ladder = ScaleLadder::new(vec![20, 40], e).unwrap();
        let r = inductive_scale_verify(
            &ladder,
            &p,
            Sampler::MonteCarlo {
                points: 300,
                seed: 4,
            },
            None,
        )
        .unwrap();
        let f = r.bad_fractions();
        assert!(f[1] <= f[0], "{f:?}");
        assert_eq!(r.pasting_failures(), 0);
        assert!(r.steps[0].pasted > 0);
        assert_eq!(r.evaluations, 300 + r.steps[0].evaluations);
    }

    #[test]
    fn budget_is_enforced() {
        let p = calibration(0.0);
        let ladder = ScaleLadder::new(vec![10, 20], MsaExponents::default()).unwrap();
        let err = inductive_scale_verify(
            &ladder,
            &p,
            Sampler::MonteCarlo {
                points: 50,
                seed: 1,
            },
            Some(100),
        );
        assert!(matches!(
            err,
            Err(Error::BudgetExhausted {
                scale: 20,
                used: 50
            })
        ));
    }
}
