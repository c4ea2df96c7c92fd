//! Numerical laboratory for the geometry of finite-dimensional normed spaces
//! and the error analysis of Petrov-Galerkin methods.
//!
//! The crate computes
//!
//! - operator norms between normed spaces ([`opnorm`]),
//! - the Banach-Mazur distance of a plane to the Euclidean plane, and
//!   estimates of the Banach-Mazur constant `C_BM` and the
//!   von Neumann-Jordan constant `C_NJ` ([`geoconst`]),
//! - norms of oblique projections and audits of the bound
//!   `|I - P| <= min{1 + |P|^-1, C_BM} |P|` ([`projlab`]),
//! - continuity and inf-sup constants, Petrov-Galerkin solutions and the
//!   Babuška, sharpened and Hilbert-space error bounds ([`pglab`]),
//! - a seeded battery that checks all of the above on a fixed catalog
//!   ([`suite`]).
//!
//! Suprema over vectors and subspaces are estimated by seeded searches and
//! come with witnesses, so every reported number can be re-evaluated.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geoconst;
pub mod linalg;
pub mod opnorm;
pub mod pglab;
pub mod projlab;
pub mod rng;
pub mod spaces;
pub mod suite;

pub use error::{Error, Result};
pub use opnorm::{inverse_norm, operator_norm, LinearMap, Method, NormEstimate};
pub use spaces::{boundary_point_2d, Norm, NormKind, NormedSpace, SpaceSpec, TwoDimSubspace};
