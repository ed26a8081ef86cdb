//! Open-system dynamics of fermionic Gaussian states in phase space.
//!
//! States are real antisymmetric covariance matrices `Γ` in the interleaved
//! Majorana ordering `(x₁, p₁, x₂, p₂, …)`. Markovian dynamics is the affine
//! flow `dΓ/dt = AΓ + ΓAᵀ + C`, described by a [`GeneratorPair`].
//!
//! The crate covers:
//!
//! * [`linalg`]: Hermitian eigendecomposition, matrix exponential, Lyapunov solve.
//! * [`state`]: covariance matrices, physicality, excitation numbers.
//! * [`generator`]: the `{1, ω, X, Z}` basis and the nine-class partition of `(A, C)`.
//! * [`cp`]: complete-positivity certificates for channels and generators.
//! * [`lindblad`]: conversion to and from Lindblad rates and jump vectors.
//! * [`dynamics`]: channel application, master-equation trajectories, steady states.
//! * [`two_mode`]: the six-parameter two-mode system and the scenario catalog.
//! * [`fock`]: a brute-force Fock-space oracle for `N ≤ 3`.
//! * [`io`]: JSON, CSV and markdown formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cp;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod generator;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod state;
pub mod two_mode;

pub use cp::{CpVerdict, GaussianChannel};
pub use dynamics::{SteadyState, Trajectory};
pub use error::{Error, Result};
pub use generator::{DynamicsClass, GeneratorPair, PartitionReport};
pub use lindblad::LindbladData;
pub use linalg::{ComplexMatrix, HermitianMatrix, RealMatrix};
pub use state::CovarianceMatrix;
