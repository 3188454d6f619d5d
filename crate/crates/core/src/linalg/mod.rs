//! Symmetric tridiagonal kernels.

pub mod eigen;
pub mod solve;
pub mod twisted;

pub use eigen::{
    bisect_all, bisect_eigenvalue, gershgorin, negcount, ql_eigenvalues, refined_eigenvalues,
};
pub use solve::{solve_symmetric, TridiagonalLu};
pub use twisted::{
    tridiagonal_inverse, twisted_column, twisted_null_vector, twisted_pivots, LogVector,
    TwistedPivots,
};
