//! Symplectic Euler for separable Hamiltonians, alternating mirror descent for
//! bilinear zero-sum games, and the modified-Hamiltonian series tying the two
//! together.
//!
//! Numeric code is generic over [`Real`] (`f32`, `f64`); symbolic code is
//! generic over [`Coeff`] and usually runs over exact rationals.

pub mod combinatorics;
pub mod diagnostics;
pub mod error;
pub mod family;
pub mod games;
pub mod hamiltonian;
pub mod integrators;
pub mod linalg;
pub mod mh_closed;
pub mod mh_symbolic;
pub mod payoff;
pub mod phase;
pub mod regularizer;
pub mod scalar;

pub use error::{Error, Result};
pub use family::{FamilyKind, ScalarOracle, SmoothScalarFamily};
pub use hamiltonian::SeparableHamiltonian;
pub use integrators::{Scheme, StepperConfig, TrajectoryRecord};
pub use linalg::Matrix;
pub use payoff::{symmetric_decompose, DecompositionStatus, PayoffMatrix};
pub use phase::PhasePoint;
pub use regularizer::{Domain, Regularizer, RegularizerOracle};
pub use scalar::{Coeff, Real};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type PhasePoint64 = PhasePoint<f64>;
pub type PhasePoint32 = PhasePoint<f32>;
pub type Hamiltonian64 = SeparableHamiltonian<f64>;
pub type Hamiltonian32 = SeparableHamiltonian<f32>;
pub type Regularizer64 = Regularizer<f64>;
pub type PayoffMatrix64 = PayoffMatrix<f64>;
