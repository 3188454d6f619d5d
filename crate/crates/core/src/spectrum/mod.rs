//! Eigen-decompositions of the weighted problem and localization diagnostics.

pub mod diagnostics;
pub mod distance;
pub mod eigen;
pub mod lyapunov;
pub mod poisson;
pub mod probe;

pub use diagnostics::{
    decay_of_log_vector, decay_rate_of_eigenvector, ipr, summarize, EigenvectorDecay, CORE_RADIUS,
    DECAY_RATE_FLOOR,
};
pub use distance::{distance_to_spectrum, SpectralDistance, DISTANCE_AGREEMENT};
pub use eigen::{
    eigensolve_jacobi, eigensolve_robust, pencil_eigensolve, EigenReport, PencilSolution,
    SolveRoute, VectorDiagnostics, PENCIL_FLOOR,
};
pub use lyapunov::{lyapunov, LyapunovEstimate, MIN_STEPS};
pub use poisson::{poisson_check, poisson_reconstruct, PoissonCheck};
pub use probe::{probe_generalized_eigenvector, GeneralizedEigenvectorProbe};
