//! Birkhoff-James orthogonality and multiplication-operator rigidity on
//! finite-dimensional normed function spaces.
//!
//! The library is organized bottom-up:
//! - [`normed_space`]: norm specifications (weighted Hilbert, `l^p`, polyhedral,
//!   finite Lipschitz, block sums) with primal and dual norm evaluation,
//!   supporting faces and face dimensions.
//! - [`birkhoff`]: the Birkhoff-James orthogonality predicate via line
//!   minimization, its dual-face characterization, and the eigenvector
//!   orthogonality check for isometries.
//! - [`function_space`]: sampled phase spaces, function-space models
//!   (basis matrix + coefficient norm), point evaluations, reproducing-kernel
//!   and Lipschitz model builders.
//! - [`birkhoff_graph`]: the Birkhoff graph of a model (vertices = phase
//!   points, edges = non-orthogonal point evaluations) and its components.
//! - [`rigidity`]: multiplication-operator detection, isometry checks,
//!   eigenvalue propagation over the Birkhoff graph, rigidity verdicts,
//!   weighted-composition comparison and invariant cores.
//! - [`corpus`]: reproducible example scenarios with machine-checked claims.

pub mod birkhoff;
pub mod birkhoff_graph;
pub mod corpus;
pub mod error;
pub mod function_space;
pub mod normed_space;
pub mod rigidity;

mod lp;

pub use error::Error;

/// Complex column vector used for space elements and functional coefficients.
pub type CVec = nalgebra::DVector<num_complex::Complex64>;
/// Complex matrix used for bases, Gram matrices and operators.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Real matrix used for metrics and polyhedral facet tables.
pub type RMat = nalgebra::DMatrix<f64>;

/// Default relative tolerance for norm-equality decisions.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Relative tolerance for exact-arithmetic consistency checks (Gram symmetry,
/// metric axioms, serialization round-trips).
pub const STRUCT_TOL: f64 = 1e-12;
