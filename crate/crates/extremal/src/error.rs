//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]. Variants carry enough
//! context to produce actionable CLI messages without string parsing.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("point lies outside the unit ball: norm {norm} exceeds 1 beyond tolerance {tol}")]
    OutsideBall { norm: f64, tol: f64 },

    #[error("point lies in the open unit ball (norm {norm}); a boundary point is required")]
    InteriorPoint { norm: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("dimension {dim} exceeds the enumeration cap {cap} for this operation")]
    DimensionCap { dim: usize, cap: usize },

    #[error("evaluation point is not a grid sample (nearest sample distance {nearest})")]
    OffSample { nearest: f64 },

    #[error("grid mappings have incompatible sample sets ({left} vs {right} samples, {common} common)")]
    IncompatibleGrids {
        left: usize,
        right: usize,
        common: usize,
    },

    #[error("operation needs at least {needed} grid samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("spectral iteration did not converge within {budget} sweeps")]
    NoConvergence { budget: usize },

    #[error("negative slack {slack} on a sample pair: the mapping is not nonexpansive")]
    NegativeSlack { slack: f64 },

    #[error("mapping is not nonexpansive: pair ratio {ratio} exceeds 1 beyond tolerance")]
    NotNonexpansive { ratio: f64 },

    #[error("mapping does not map the ball into itself: value norm {norm} exceeds 1 beyond tolerance")]
    NotSelfMap { norm: f64 },

    #[error("linear part is singular or badly conditioned (pivot {pivot})")]
    SingularMatrix { pivot: f64 },

    #[error("mapping is not an isometric bijection of the ball: {message}")]
    NotIsometry { message: String },

    #[error("mapping does not pin the boundary: coordinate {coord} maps pinned value {expected} to {actual}")]
    NotBoundaryPinned {
        coord: usize,
        expected: f64,
        actual: f64,
    },

    #[error("hypothesis not met: {message}")]
    HypothesisNotMet { message: String },

    #[error("no near-isometric pair found within budget (best ratio {best_ratio})")]
    NoPairFound { best_ratio: f64 },

    #[error("degenerate witness: center distance stayed zero after {retries} pair retries")]
    DegenerateWitness { retries: usize },

    #[error(
        "certification refuted: probe {probe} at lambda {lambda} admits margin {margin} <= 0"
    )]
    CertificationRefuted {
        probe: usize,
        lambda: f64,
        margin: f64,
    },

    #[error("decomposition residual {residual} exceeds bound {bound}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Parameter error with a formatted message.
    pub fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    /// Parse error addressed by a document path such as `expr.left.lambda`.
    pub fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
