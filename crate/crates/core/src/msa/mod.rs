//! Exceptional-set measurement, orbit hits and the multiscale ladder.

pub mod badset;
pub mod induction;
pub mod initial;
pub mod ladder;
pub mod orbit;

pub use badset::{
    bad_set_estimate, classify_phases, read_bad_cells, write_bad_cells, BadCell, BadCellSet,
    BadReason, BadSetReport, PhaseVerdict,
};
pub use induction::{inductive_scale_verify, InductionReport, ScaleReport};
pub use initial::{initial_scale_check, regime_for, InitialScaleVerdict, LAMBDA0_PROXY};
pub use ladder::{MsaExponents, ScaleLadder};
pub use orbit::{orbit_hit_count, OrbitHitReport};
