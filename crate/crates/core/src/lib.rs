//! Kernel-based pseudospectral solvers for linear boundary value problems on
//! boxes, using Gaussian kernels that satisfy the boundary conditions.

pub mod constrained;
pub mod error;
pub mod field;
pub mod functionals;
pub mod harness;
pub mod homogenization;
pub mod kansa;
pub mod kernels;
pub mod numerics;
pub mod problem;
pub mod pseudospectral;

pub use error::{Error, Result, Stage};
pub use kansa::kansa_solve;
pub use pseudospectral::{solve, GridScheme, Solution, SolveMode, SolveOptions};
