use serde::Serialize;

use crate::model::{diophantine_margin, orbit, FrequencyVector, Phase};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitHitReport {
    pub phase0: Phase,
    /// Orbit length `K`; the orbit is `phase0 + kω`, `k = 1..=K`.
    pub length: usize,
    pub hits: usize,
    pub delta: f64,
    /// `K^{1−δ}`.
    pub bound: f64,
    pub within_bound: bool,
    /// `(first k, length)` of the longest run of consecutive misses.
    pub longest_free_run: (usize, usize),
    /// Diophantine condition held for all `0 < |l|₁ ≤ K`.
    pub diophantine_certified: bool,
}

impl OrbitHitReport {
    pub fn hit_fraction(&self) -> f64 {
        self.hits as f64 / self.length as f64
    }
}

/// Counts `k ∈ [1, K]` with `phase0 + kω ∈ S` for the predicate `bad`.
pub fn orbit_hit_count(
    phase0: Phase,
    omega: &FrequencyVector,
    length: usize,
    delta: f64,
    bad: impl Fn(Phase) -> bool,
) -> Result<OrbitHitReport> {
    let margin = diophantine_margin(omega, length as u64)?;
    if !margin.certified {
        log::warn!(
            "ω fails the Diophantine condition below radius {length}: worst {:?}",
            margin.worst
        );
    }
    let mut hits = 0;
    let (mut best, mut run_start, mut run) = ((1, 0), 1, 0);
    for k in 1..=length {
        if bad(orbit(phase0, omega, k as i64)) {
            hits += 1;
            run = 0;
            run_start = k + 1;
        } else {
            run += 1;
            if run > best.1 {
                best = (run_start, run);
            }
        }
    }
    let bound = (length as f64).powf(1.0 - delta);
    Ok(OrbitHitReport {
        phase0,
        length,
        hits,
        delta,
        bound,
        within_bound: (hits as f64) < bound,
        longest_free_run: best,
        diophantine_certified: margin.certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msa::BadCellSet;

    #[test]
    fn empty_and_full_sets() {
        let w = FrequencyVector::golden_silver();
        let p = Phase::new(0.1, 0.2);
        let none = orbit_hit_count(p, &w, 400, 0.1, |_| false).unwrap();
        assert_eq!(none.hits, 0);
        assert_eq!(none.longest_free_run, (1, 400));
        let full = BadCellSet::full(16);
        let all = orbit_hit_count(p, &w, 400, 0.1, |q| full.contains(q)).unwrap();
        assert_eq!(all.hits, 400);
        assert!(!all.within_bound);
    }

    #[test]
    fn longest_run() {
        let w = FrequencyVector::golden_silver();
        let p = Phase::new(0.0, 0.0);
        // hits exactly when k ∈ {3, 10}
        let targets: Vec<Phase> = [3, 10].iter().map(|&k| orbit(p, &w, k)).collect();
        let r = orbit_hit_count(p, &w, 12, 0.1, |q| targets.contains(&q)).unwrap();
        assert_eq!(r.hits, 2);
        assert_eq!(r.longest_free_run, (4, 6));
    }
}
