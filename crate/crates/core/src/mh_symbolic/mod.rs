//! Exact term algebra over the derivative symbols of a one-dimensional
//! separable Hamiltonian: Poisson brackets, BCH corrections `H_n`, the
//! one-step Taylor coefficients `C_{j,k}` and the remainder constant `Φ(N)`.

mod bch;
mod bracket;
mod eval;
mod omega;
mod term;

pub use bch::{bch_correction, bch_corrections, dynkin_correction};
pub use bracket::{bracket_with, ipb, ipb_letters, poisson, BracketWord, Letter};
pub use eval::{general_d_truncation_eval, truncated_mh_eval, TruncatedMh};
pub use omega::{
    cancellation_check, cancellation_check_with, omega_coefficient, phi_bound, CancellationReport, OmegaEngine,
};
pub use term::{ExactPoly, Monomial, Symbol, TermPoly};
