//! Model parameters, bases and operators.

mod basis;
mod hamiltonian;
mod operator;
mod params;

pub use basis::{enumerate_basis, sector_dimension, BasisSet, BasisState, SectorSpec};
pub use hamiltonian::{
    build_effective_hamiltonian, build_full_hamiltonian, build_hopping_hamiltonian,
    build_number_operator, build_repulsion_hamiltonian,
};
pub use operator::SymmetricOperator;
pub use params::ModelParams;

pub(crate) use operator::SparseOperator;
