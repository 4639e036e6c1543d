//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShockError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable a{index} exceeds dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("gauss width must be strictly positive, got {width}")]
    NonPositiveGaussWidth { width: f64 },

    #[error("jet order {order} exceeds the truncation cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("time must be positive, got {t}")]
    NonPositiveTime { t: f64 },

    #[error("viscosity must be positive, got {nu}")]
    NonPositiveViscosity { nu: f64 },

    #[error("dimension must be 1, 2 or 3, got {dim}")]
    BadDimension { dim: usize },

    #[error("no search-region certificate: {reason}")]
    NoSearchCertificate { reason: String },

    #[error("search region provably does not contain the minimum: {reason}")]
    SearchRegionInsufficient { reason: String },

    #[error("newton polish diverged on all seeds of cell {cell}")]
    NewtonDiverged { cell: String },

    #[error("quadrature failed to reach tolerance {tol} (estimate {estimate})")]
    QuadratureFailed { tol: f64, estimate: f64 },

    #[error("jet is not at a critical point: |gradient| = {grad_norm}")]
    NotCritical { grad_norm: f64 },

    #[error("minimum is not of the requested type: {reason}")]
    WrongMinimumType { reason: String },

    #[error("degenerate data: {reason}")]
    Degenerate { reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ShockError>;
