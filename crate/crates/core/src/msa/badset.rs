use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ladder::MsaExponents;
use crate::greens::{greens, verify_ldt_bounds, GoodnessVerdict};
use crate::model::{Phase, Sampler};
use crate::operator::{LatticeInterval, ModelParameters};
use crate::{Error, Result};

/// Why a sampled phase failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadReason {
    Singular,
    Norm,
    Decay,
    NormDecay,
}

/// One failing sample; on a grid `(x, y)` is the cell center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BadCell {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "N")]
    pub scale: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    pub reason: BadReason,
}

/// Classification of one phase at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVerdict {
    pub phase: Phase,
    /// `None` when `H_N` is singular.
    pub verdict: Option<GoodnessVerdict>,
}

impl PhaseVerdict {
    pub fn reason(&self) -> Option<BadReason> {
        match self.verdict {
            None => Some(BadReason::Singular),
            Some(v) => match (v.norm_ok, v.decay_ok) {
                (true, true) => None,
                (false, true) => Some(BadReason::Norm),
                (true, false) => Some(BadReason::Decay),
                (false, false) => Some(BadReason::NormDecay),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadSetReport {
    #[serde(rename = "N")]
    pub scale: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    pub lambda: f64,
    pub sampler: Sampler,
    /// Cells per axis for a grid sampler.
    pub grid_resolution: Option<usize>,
    pub exponents: MsaExponents,
    pub samples: usize,
    pub bad_count: usize,
    pub bad_fraction: f64,
    /// Binomial standard error of `bad_fraction`.
    pub std_error: f64,
    /// `e^{−N^κ}`.
    pub threshold: f64,
    pub below_threshold: bool,
    pub bad_cells: Vec<BadCell>,
}

impl BadSetReport {
    /// `bad_cells.len() / samples`.
    pub fn recomputed_fraction(&self) -> f64 {
        self.bad_cells.len() as f64 / self.samples as f64
    }

    pub fn membership(&self) -> Result<BadCellSet> {
        let resolution = self.grid_resolution.ok_or_else(|| {
            Error::InvalidArgument("cell membership needs a grid-sampled bad set".into())
        })?;
        Ok(BadCellSet::new(&self.bad_cells, resolution))
    }
}

/// Union of closed-open grid cells `[i/R, (i+1)/R) × [j/R, (j+1)/R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadCellSet {
    resolution: usize,
    cells: HashSet<(usize, usize)>,
}

impl BadCellSet {
    pub fn new(cells: &[BadCell], resolution: usize) -> Self {
        let cells = cells
            .iter()
            .map(|c| cell_of(c.x, c.y, resolution))
            .collect();
        BadCellSet { resolution, cells }
    }

    pub fn full(resolution: usize) -> Self {
        let cells = (0..resolution)
            .flat_map(|i| (0..resolution).map(move |j| (i, j)))
            .collect();
        BadCellSet { resolution, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, p: Phase) -> bool {
        self.cells.contains(&cell_of(p.x, p.y, self.resolution))
    }
}

fn cell_of(x: f64, y: f64, r: usize) -> (usize, usize) {
    let idx = |t: f64| ((t * r as f64).floor() as usize).min(r - 1);
    (idx(x), idx(y))
}

/// Classifies every phase by computing `G_N` on `[−N, N]` and applying
/// [`verify_ldt_bounds`]; singular `H_N` counts as bad. Output order
/// follows `phases`.
pub fn classify_phases(
    p: &ModelParameters,
    scale: usize,
    phases: &[Phase],
    exponents: &MsaExponents,
) -> Result<Vec<PhaseVerdict>> {
    let interval = LatticeInterval::centered(scale as u64);
    phases
        .par_iter()
        .map(|&phase| {
            let verdict = match greens(&p.with_phase(phase), interval) {
                Ok(g) => Some(verify_ldt_bounds(
                    &g,
                    scale as f64,
                    exponents.b,
                    exponents.gamma,
                )),
                Err(Error::Singular { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(PhaseVerdict { phase, verdict })
        })
        .collect()
}

/// Empirical measure of `X_N(E)`, the phases whose `G_N` fails the
/// large-deviation bounds. Needs ≥ 64 cells per axis or ≥ 10³ points.
pub fn bad_set_estimate(
    p: &ModelParameters,
    scale: usize,
    sampler: Sampler,
    exponents: &MsaExponents,
) -> Result<BadSetReport> {
    match sampler {
        Sampler::Grid { resolution } if resolution < 64 => {
            return Err(Error::InvalidArgument(format!(
                "grid resolution {resolution} is below 64 cells per axis"
            )))
        }
        Sampler::MonteCarlo { points, .. } if points < 1000 => {
            return Err(Error::InvalidArgument(format!(
                "{points} Monte Carlo points is below 1000"
            )))
        }
        _ => {}
    }
    estimate_unchecked(p, scale, sampler, exponents)
}

pub(crate) fn estimate_unchecked(
    p: &ModelParameters,
    scale: usize,
    sampler: Sampler,
    exponents: &MsaExponents,
) -> Result<BadSetReport> {
    if scale == 0 {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let phases = sampler.phases();
    if phases.is_empty() {
        return Err(Error::InvalidArgument("sampler produced no phases".into()));
    }
    let verdicts = classify_phases(p, scale, &phases, exponents)?;
    let bad_cells: Vec<BadCell> = verdicts
        .iter()
        .filter_map(|v| {
            v.reason().map(|reason| BadCell {
                x: v.phase.x,
                y: v.phase.y,
                scale,
                energy: p.energy,
                reason,
            })
        })
        .collect();
    Ok(assemble_report(
        p,
        scale,
        sampler,
        exponents,
        phases.len(),
        bad_cells,
    ))
}

pub(crate) fn assemble_report(
    p: &ModelParameters,
    scale: usize,
    sampler: Sampler,
    exponents: &MsaExponents,
    samples: usize,
    bad_cells: Vec<BadCell>,
) -> BadSetReport {
    let bad_count = bad_cells.len();
    let fraction = bad_count as f64 / samples as f64;
    let threshold = exponents.threshold(scale);
    BadSetReport {
        scale,
        energy: p.energy,
        lambda: p.lambda,
        sampler,
        grid_resolution: match sampler {
            Sampler::Grid { resolution } => Some(resolution),
            Sampler::MonteCarlo { .. } => None,
        },
        exponents: *exponents,
        samples,
        bad_count,
        bad_fraction: fraction,
        std_error: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
        threshold,
        below_threshold: fraction < threshold,
        bad_cells,
    }
}

/// Writes `x,y,N,E,reason` rows.
pub fn write_bad_cells(path: &Path, cells: &[BadCell]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if cells.is_empty() {
        w.write_record(["x", "y", "N", "E", "reason"])?;
    }
    for c in cells {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bad_cells(path: &Path) -> Result<Vec<BadCell>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
