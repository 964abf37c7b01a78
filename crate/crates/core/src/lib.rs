//! Exact Fock-space simulation of pair creation for a Dirac field in an
//! expanding Robertson-Walker universe.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: fermionic ladder operators on a `2^N` occupation basis, pure
//!   states, density operators, partial trace and von Neumann entropy.
//! - [`bogolyubov`]: in/out Bogolyubov coefficient sets for the three
//!   conservation scenarios and their antisymmetric squeezing generator.
//! - [`squeeze`]: the Fock-space squeezing unitary, built both by dense
//!   exponentiation and by the closed-form creation/number/annihilation
//!   factorisation.
//! - [`entanglement`]: particle/antiparticle subsystem entropies, numeric and
//!   closed form.
//! - [`dynamics`]: the mode equation in conformal time, asymptotic matching
//!   and the dressing of scalar coefficients into spinor coefficients.

pub mod bogolyubov;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod squeeze;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for every operator in this crate.
pub type Matrix = nalgebra::DMatrix<C64>;
