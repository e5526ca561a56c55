//! Eigensolution and closed-form polariton results.

mod analytic;
mod eigen;

pub use analytic::{
    analytic_mi_state, analytic_sf_state, hopping_band, kappa, polariton_level, u_eff, Branch,
    PolaritonLevel,
};
pub use eigen::{eigendecompose, ground_state, EigenDecomposition, GroundState, DEGENERACY_GAP};
