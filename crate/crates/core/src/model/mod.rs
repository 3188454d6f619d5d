//! Torus functions, weights, frequencies, phases and sublevel sets.

pub mod frequency;
pub mod phase;
pub mod sublevel;
pub mod torus;
pub mod weight;

pub use frequency::{
    diophantine_margin, zero_avoidance_margin, DiophantineMargin, FrequencyVector,
};
pub use phase::{canonical, orbit, rotate, Phase};
pub use sublevel::{sublevel_measure, sublevel_power_law, PowerLawFit, Sampler, SublevelEstimate};
pub use torus::{fourier_truncate, AnalyticTorusFunction, FunctionSpec, TruncatedFunction};
pub use weight::{
    distance_to_set, torus_distance, weight_zero_analysis, WeightFunction, WeightZero,
};
