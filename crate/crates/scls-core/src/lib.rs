//! Solvers for the Stackelberg prediction game with least-squares loss (SPG-LS).
//!
//! The SPG-LS is a bi-level regression game between a learner choosing a linear
//! predictor `w` and a data provider who, knowing `w`, shifts the feature matrix
//! towards its own target labels `z` subject to a quadratic manipulation penalty
//! `gamma`. After the provider's best response is substituted in, the game
//! collapses to a quadratic fractional program in `(w, alpha)` with the coupling
//! constraint `wᵀw = gamma·alpha`. A nonlinear change of variables turns that
//! program into a least-squares problem over the unit sphere,
//!
//! ```text
//!     min  q(r) = ‖L̂ r − b‖²      s.t.  ‖r‖ = 1,
//! ```
//!
//! where `L̂ = [ (√gamma/2)·X | z/2 ]` and `b = y − z/2`. The sphere problem is
//! an equality-constrained trust-region subproblem and is solved here without
//! ever factorizing (or even forming) `H = L̂ᵀL̂`:
//!
//! * [`krylov`] — a generalized Lanczos trust-region engine: grows a Krylov
//!   basis of `H` from the linear term, solves the projected tridiagonal sphere
//!   problem with a safeguarded Newton secular iteration, and certifies the
//!   lifted solution through its KKT system.
//! * [`riemannian`] — a trust-region Newton method on the unit sphere with a
//!   truncated-CG subproblem solver.
//! * [`oracle`] — an exact dense eigendecomposition path for small instances,
//!   including rigorous hard-case treatment. It is the ground-truth reference
//!   the iterative engines are validated against.
//!
//! [`linops`] provides the sparse operator layer (the only matrix access the
//! solvers need is `L̂·r` and `L̂ᵀ·u`), and [`reformulate`] owns the variable
//! maps between the game coordinates `(w, alpha)` and the sphere coordinates.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable default features
//! and enable `libm` instead. File formats, data generation and the command
//! line live in the companion `scls-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("scls-core needs either the `std` feature or the `libm` feature");

pub mod error;
pub(crate) mod math;

pub mod krylov;
pub mod linops;
pub mod oracle;
pub mod reformulate;
pub mod report;
pub mod riemannian;

pub use error::Error;
pub use linops::{ImplicitQuadratic, ScaledAugmentedOperator, SparseMatrix};
pub use reformulate::{build_scls, Dataset, SclsProblem, SpgPoint, SphereVec};
pub use report::{SolveReport, SolverKind};
