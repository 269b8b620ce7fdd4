//! Sparsity-constrained minimization `min f(x) s.t. ||Ax + b||_0 <= k`.
//!
//! The cardinality constraint is rewritten as an equilibrium (complementarity)
//! constraint and attacked with two solvers: an exact penalty method
//! ([`mpec::epm_solve`]) and an alternating direction method
//! ([`mpec::adm_solve`]). Both reduce each iteration to a convex weighted-l1
//! subproblem ([`convex_inner`]) plus a closed-form projection
//! ([`projections`]).
//!
//! [`baselines`] provides the usual comparison methods, [`problems`] builds
//! instances for five applications, and [`harness`] runs benchmark grids.

pub mod banded;
pub mod baselines;
pub mod convex_inner;
pub mod error;
pub mod harness;
pub mod linops;
pub mod mpec;
pub mod problems;
pub mod projections;
pub mod vecops;

pub use error::{Error, Result};
