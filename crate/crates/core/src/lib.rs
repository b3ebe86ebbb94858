//! Matrix-free parallel-in-time solver for the all-at-once system of the
//! implicit leap-frog discretization of linear wave equations, preconditioned
//! by the absolute-value block alpha-circulant (ABAC) preconditioner and
//! solved with preconditioned MINRES.
//!
//! The crate is `no_std` and only needs `alloc`; the `std` feature uses the
//! platform math library instead of `libm`.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod discretization;
pub mod error;
mod fft;
pub mod minres;
pub mod oracle;
pub mod preconditioner;
pub mod problems;
mod schur;
pub mod transforms;
pub mod vector;

#[cfg(test)]
mod testutil;

pub use discretization::{AllAtOnceOperator, SpaceTimeMesh, SpatialOperator, WaveProblem};
pub use error::{Error, Result};
pub use minres::{minres_solve, ResidualNorm, SolveReport, SolverConfig, StoppingRule};
pub use preconditioner::{AbacPreconditioner, AlphaCirculantSpec};
pub use vector::SpaceTimeVector;
