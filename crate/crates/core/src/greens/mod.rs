//! Finite-volume Green's functions and the lemma verifiers built on them.

pub mod fit;
pub mod goodness;
pub mod lemmas;
pub mod matrix;

pub use fit::{decay_fit, fit_log_decay, fit_log_decay_above, DecayFit, FIT_FLOOR, RELIABLE_R2};
pub use goodness::{verify_goodness, verify_ldt_bounds, GoodnessCriteria, GoodnessVerdict};
pub use lemmas::{
    covering_family, first_uncovered, paste_intervals, perturbation_verify, screen_subintervals,
    PastingVerdict, PerturbationInstance, PerturbationVerdict,
};
pub use matrix::{greens, greens_of, GreensMatrix, SINGULAR_CONDITION};
