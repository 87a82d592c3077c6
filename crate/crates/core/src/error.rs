use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("fermion sector must hold 2 or 3 particles, got {0}")]
    UnsupportedFermionCount(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("requested {requested} states from a grid of {n_points} points")]
    TooManyStates { requested: usize, n_points: usize },
    #[error("grid too small: edge potential {edge:.4} is below 5x the highest eigenvalue {highest:.4}")]
    GridTooSmall { edge: f64, highest: f64 },
    #[error("potential has {got} samples but the grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parity check failed: {0}")]
    ParityCheck(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("interaction range must be positive, got {0}")]
    ZeroRange(f64),
    #[error("alpha is imaginary: 2 r0 / a_s = {0} >= 1")]
    AlphaImaginary(f64),
    #[error("alpha = {0} is outside the model potential's validity bound (< 2)")]
    AlphaOutOfRange(f64),
    #[error("invalid transverse width a_rho = {0}")]
    InvalidTransverseWidth(f64),
    #[error("quadrature not converged after {refinements} refinements (relative change {change:.3e})")]
    NotConverged { refinements: usize, change: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state is not normalized: norm^2 = {0}")]
    Unnormalized(f64),
    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step too large: dt * ||H|| = {0:.4} exceeds 0.05")]
    StepTooLarge(f64),
    #[error("norm drift {0:.3e} exceeded 1e-9")]
    NormDriftExceeded(f64),
    #[error("invalid time settings: {0}")]
    InvalidTimes(String),
    #[error("tunneling probabilities need N = 2, trajectory has N = {0}")]
    WrongN(usize),
    #[error("initial condition `{0}` has no both-in-one-well reference")]
    NoReferenceWell(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A failure anywhere in the eigensolve, couplings, dynamics, statistics chain,
/// tagged with the stage it came from.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("eigensolver: {0}")]
    Eigen(#[from] EigenError),
    #[error("couplings: {0}")]
    Coupling(#[from] CouplingError),
    #[error("dynamics: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("phase statistics: {0}")]
    State(#[from] StateError),
}
