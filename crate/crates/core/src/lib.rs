//! Exact diagonalization and time-dependent propagation for a ring of
//! Jaynes-Cummings sites whose photon hopping is mediated by dispersively
//! coupled junction qubits.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can be embedded
//! anywhere; file formats, plotting and the command-line front end live in the
//! `jch-cli` crate.
//!
//! Layout:
//!
//! - [`model`]: parameters, number-conserving bases and the effective / full
//!   Hamiltonians as dense symmetric operators.
//! - [`spectra`]: the symmetric eigensolver and the closed-form polariton
//!   results (levels, on-site repulsion, hopping rate, analytic MI/SF states).
//! - [`observables`]: expectation values, on-site number variance, marginals,
//!   fidelity.
//! - [`scan`]: parameter sweeps, phase-boundary extraction, effective-vs-full
//!   and array-size comparisons.
//! - [`dynamics`]: ramp propagation and the number-resolved measurement
//!   protocol.
//!
//! Energies are in units of the on-site coupling `g` and times in `1/g`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dynamics;
mod error;
mod math;
pub mod model;
pub mod observables;
pub mod scan;
pub mod spectra;
pub mod state;

pub use error::{Error, Result};
pub use model::{
    build_effective_hamiltonian, build_full_hamiltonian, build_hopping_hamiltonian,
    build_number_operator, build_repulsion_hamiltonian, enumerate_basis, BasisSet, BasisState,
    ModelParams, SectorSpec, SymmetricOperator,
};
pub use num_complex::Complex64;
pub use state::{Amplitude, ComplexState, RealState, StateVector};
