//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by grid-level operations.
#[derive(Debug, Clone, Error)]
pub enum GridError {
    /// Two grid functions do not live on the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// An origin exponent outside (-1, ∞) or otherwise unusable.
    #[error("invalid origin exponent {0}")]
    InvalidExponent(f64),
    /// Invalid grid parameters.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Errors raised by the Lévy-model layer.
#[derive(Debug, Clone, Error)]
pub enum LevyError {
    /// A moment integral required by the requested representation diverges.
    #[error("non-convergent integral: {0}")]
    NonConvergentIntegral(String),
    /// No finite bracket for ψ(β) = q was found below the β cap.
    #[error("root not bracketed for q = {q} below beta cap {cap}")]
    RootNotBracketed { q: f64, cap: f64 },
    /// The model is a subordinator (monotone paths), which is excluded.
    #[error("subordinator excluded: {0}")]
    SubordinatorExcluded(String),
    /// Invalid model parameters.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Errors raised by the series engine.
#[derive(Debug, Error)]
pub enum SeriesError {
    /// maxTerms was reached with the last term still above tolerance.
    /// The partial sum and its report are attached.
    #[error("series not converged after {terms} terms (last term L1 = {last_term_l1:.3e})")]
    NotConverged {
        terms: usize,
        last_term_l1: f64,
        partial: Box<(crate::grid::GridFunction, crate::series::SeriesReport)>,
    },
    /// A term stopped being representable (overflow / NaN).
    #[error("series accumulation produced a non-finite term at n = {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Errors raised by the scale-function entry points.
#[derive(Debug, Error)]
pub enum ScaleError {
    /// The model's regime does not match the requested method.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    /// A method requiring a finite Lévy measure got an infinite one.
    #[error("infinite Lévy measure: {0}")]
    InfiniteMeasure(String),
    /// The supplied kernel h fails h ∗ ν̄̄ (0+) = 1 beyond tolerance.
    #[error("kernel mismatch: h * integrated tail at 0+ is {got:.6} (want 1 ± {tol})")]
    KernelMismatch { got: f64, tol: f64 },
    /// The perturbing jump law is not a probability distribution.
    #[error("jump law mass is {0}, expected 1")]
    MassNotOne(f64),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Errors raised by the resolvent / renewal solvers.
#[derive(Debug, Error)]
pub enum ResolventError {
    /// A diagonal product-integration weight underflowed.
    #[error("singular Volterra system at node {node} (diagonal weight {weight:.3e})")]
    SingularSystem { node: usize, weight: f64 },
    /// The forward substitution produced a non-positive node value.
    #[error("resolvent not strictly positive at node {node} (value {value:.3e})")]
    NotPositive { node: usize, value: f64 },
    /// g admits no locally integrable resolvent.
    #[error("no locally integrable resolvent: {0}")]
    NoResolvent(String),
    /// The supplied kernel h fails g ∗ h(0+) = 1 beyond tolerance.
    #[error("kernel mismatch: g * h at 0+ is {got:.6} (want 1 ± {tol})")]
    KernelMismatch { got: f64, tol: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Scale(#[from] Box<ScaleError>),
}

/// Errors raised by the verification layer.
#[derive(Debug, Error)]
pub enum VerifyError {
    /// x_max is too short for the requested verification tolerance.
    #[error("domain too short: x_max = {x_max} cannot support tolerance {tol}")]
    DomainTooShort { x_max: f64, tol: f64 },
    /// ψ'(0+) ≤ 0: ruin is certain, the Pollaczeck–Khintchine formula fails.
    #[error("net profit condition violated: psi'(0+) = {0}")]
    NetProfitViolated(f64),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Scale(#[from] Box<ScaleError>),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Crate-level error wrapper.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}
