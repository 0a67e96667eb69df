use thiserror::Error;

/// Every failure the library reports.
///
/// Variant names are stable and are what the command line tool prints on
/// standard error, see [`Error::name`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge {a}-{b} has non-positive weight {w}")]
    NonPositiveWeight { a: String, b: String, w: f64 },
    #[error("vertex {id} has non-positive measure {mu}")]
    NonPositiveMeasure { id: String, mu: f64 },
    #[error("graph is disconnected: vertex {unreachable} cannot be reached from {root}")]
    Disconnected { root: String, unreachable: String },
    #[error("edge {a}-{b} is listed more than once")]
    DuplicateEdge { a: String, b: String },
    #[error("self-loop at vertex {id}")]
    SelfLoop { id: String },
    #[error("vertex {id} is listed more than once")]
    DuplicateVertex { id: String },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("non-finite value {value} in {what}")]
    NonFinite { what: String, value: f64 },
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown vertex {id}")]
    UnknownVertex { id: String },
    #[error("eigen-solver did not converge")]
    EigenFailure,
    #[error("graph with a single vertex has no nonzero eigenvalue")]
    NoSpectralGap,
    #[error("exponential overflow at vertex index {index} (u = {u})")]
    Overflow { index: usize, u: f64 },
    #[error("the energy functional is only defined for sigma = 1 (got {sigma})")]
    SigmaNotOne { sigma: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("Lambda = {lambda_bound} does not bound the parameters: {condition}")]
    LambdaSandwichViolated { lambda_bound: f64, condition: String },
    #[error("box minimizer touched a face at vertex index {index}")]
    OnBoundary { index: usize },
    #[error("no convergence: {reason}")]
    NonConvergence { reason: String },
    #[error("barrier unavailable: {reason}")]
    BarrierUnavailable { reason: String },
    #[error("continuation stopped near a turning point; last good parameter {last_param}")]
    TurningPoint { last_param: f64 },
    #[error("residual {residual} exceeds tolerance {tol}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("hypothesis violated: {reason}")]
    HypothesisViolated { reason: String },
    #[error("map vanishes on the boundary at u = {at}")]
    BoundaryZero { at: f64 },
    #[error("sign mismatch: {reason}")]
    SignMismatch { reason: String },
    #[error("no solvable coupling found up to {cap}")]
    NoSolvableSeed { cap: f64 },
    #[error("singular linear system")]
    SingularSystem,
}

impl Error {
    /// Stable variant name, e.g. `"Disconnected"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::NonPositiveMeasure { .. } => "NonPositiveMeasure",
            Error::Disconnected { .. } => "Disconnected",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::SelfLoop { .. } => "SelfLoop",
            Error::DuplicateVertex { .. } => "DuplicateVertex",
            Error::EmptyGraph => "EmptyGraph",
            Error::NonFinite { .. } => "NonFinite",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnknownVertex { .. } => "UnknownVertex",
            Error::EigenFailure => "EigenFailure",
            Error::NoSpectralGap => "NoSpectralGap",
            Error::Overflow { .. } => "Overflow",
            Error::SigmaNotOne { .. } => "SigmaNotOne",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::LambdaSandwichViolated { .. } => "LambdaSandwichViolated",
            Error::OnBoundary { .. } => "OnBoundary",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::BarrierUnavailable { .. } => "BarrierUnavailable",
            Error::TurningPoint { .. } => "TurningPoint",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::HypothesisViolated { .. } => "HypothesisViolated",
            Error::BoundaryZero { .. } => "BoundaryZero",
            Error::SignMismatch { .. } => "SignMismatch",
            Error::NoSolvableSeed { .. } => "NoSolvableSeed",
            Error::SingularSystem => "SingularSystem",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
