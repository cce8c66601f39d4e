//! Error type shared by every solver and verifier in the crate.

use thiserror::Error;

/// Errors produced by state validation, the geometric solvers, and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A 2x2 matrix failed the density-matrix checks (unit trace, positivity).
    #[error("density matrix is not physical: {0}")]
    NonPhysicalDensity(String),

    /// A Bloch vector lies outside the unit ball beyond the validation slack.
    #[error("Bloch vector is not physical: norm {norm} exceeds 1")]
    NonPhysicalBloch { norm: f64 },

    /// Priors are not a probability distribution.
    #[error("invalid priors: {0}")]
    BadPriors(String),

    /// The focal separation does not exceed the distance gap, so the branch is empty.
    #[error("degenerate hyperbola: separation {l} does not exceed gap {e}")]
    DegenerateHyperbola { l: f64, e: f64 },

    /// The ray at this angle never meets the hyperbola branch.
    #[error("hyperbola radius unbounded at angle {theta} rad")]
    UnboundedHyperbola { theta: f64 },

    /// The two hyperbola branches spanned by the triangle do not meet.
    #[error("hyperbola branches do not intersect")]
    NoIntersection,

    /// A solver was invoked on a polytope of the wrong shape.
    #[error("wrong polytope shape: expected {expected}, found {found}")]
    WrongShape { expected: &'static str, found: String },

    /// The triangle solution was requested for an infeasible geometry.
    #[error("triangle solution infeasible: {0}")]
    Infeasible(&'static str),

    /// Symmetric-ensemble overlap parameters cannot be realised by qubit states.
    #[error("unrealizable symmetric ensemble: self-overlap {r}, cross-overlap {gamma}")]
    Unrealizable { r: f64, gamma: f64 },

    /// A complementary radius is too small to define a direction but too large to be zero.
    #[error("complementary radius {r} of state {index} is too small to define a direction")]
    DegenerateRadius { index: usize, r: f64 },

    /// No nonnegative weights balance the complementary directions.
    #[error("no valid POVM recoverable: balance residual {residual}")]
    NoValidPovm { residual: f64 },

    /// The subset recursion guard.
    #[error("too many states: {n} exceeds the supported maximum {max}")]
    TooManyStates { n: usize, max: usize },

    /// The dual solver exhausted its evaluation budget.
    #[error("dual solver did not converge: gap estimate {gap}")]
    NoConvergence { gap: f64 },

    /// A POVM failed completeness or element-count checks.
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
