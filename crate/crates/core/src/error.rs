use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("override list `{name}` has {found} entries, expected {expected}")]
    OverrideLength {
        name: &'static str,
        expected: usize,
        found: usize,
    },

    #[error(
        "junction {junction}: delta_c = {delta_c} is below the dispersive bound 10 * g_c = {bound}"
    )]
    DispersiveBound {
        junction: usize,
        delta_c: f64,
        bound: f64,
    },

    #[error("coupler detuning must be positive, got {0}")]
    NonPositiveDetuning(f64),

    #[error("basis {}", if *.expected_couplers { "must include coupler qubits" } else { "must not include coupler qubits" })]
    WrongBasisKind { expected_couplers: bool },

    #[error("site {site} out of range for a ring of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("sector mismatch: {0}")]
    SectorMismatch(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state was built over a different basis")]
    BasisMismatch,

    #[error("state norm {0} is not 1")]
    NotNormalized(f64),

    #[error("operator action left the sector")]
    SectorLeak,

    #[error("symmetric eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("negative variance {0}")]
    NegativeVariance(f64),

    #[error("the zero-polariton level has no upper branch")]
    UpperBranchVacuum,

    #[error("sector dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("time step {dt} exceeds duration / 100 = {max}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("norm drift {drift:.3e} at t = {time} exceeds 1e-4 with dt = {dt}; try dt <= {suggested_dt}")]
    NormDrift {
        time: f64,
        drift: f64,
        dt: f64,
        suggested_dt: f64,
    },

    #[error(
        "detuning {delta} is outside the dispersive readout regime (need delta >= 5 g = {min})"
    )]
    DispersiveReadout { delta: f64, min: f64 },
}
