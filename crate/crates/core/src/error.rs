//! Crate error type.

use thiserror::Error;

/// Errors raised by grid construction, operator assembly, solvers, and
/// configuration parsing.
///
/// Outcomes that the underlying theory treats as informative results rather
/// than failures (a barrier gap that is not positive, a verdict that does
/// not hold, an exhausted search budget) are modelled as result enums in
/// their own modules, not as `Error`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} outside valid range {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("psi map is not strictly increasing on the grid: psi'({xi}) = {deriv}")]
    KernelDomain { xi: f64, deriv: f64 },

    #[error("grid needs at least {needed} interior nodes, got {got}")]
    GridSize { needed: usize, got: usize },

    #[error("grid nodes invalid: {0}")]
    GridNodes(String),

    #[error("field shape {field:?} does not match operator grid {grid:?}")]
    GridMismatch {
        field: (usize, usize),
        grid: (usize, usize),
    },

    #[error("coefficient hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("line search failed after {backtracks} backtracks, last step {last_step:e}")]
    LineSearch { backtracks: usize, last_step: f64 },

    #[error("{what} did not converge in {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("inverse power iteration stalled after {iterations} iterations; last Rayleigh quotients {:?}", history.iter().rev().take(4).collect::<Vec<_>>())]
    EigenStalled {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("invariant violated: {what} (worst offense {worst:e} at iteration {iteration})")]
    InvariantViolation {
        what: String,
        worst: f64,
        iteration: usize,
    },

    #[error("strip width delta = {delta} leaves no interior node outside the strip")]
    StripTooWide { delta: f64 },

    #[error("supersolution construction: chi({at}, {at}) = {value} is not positive")]
    Construction { at: f64, value: f64 },

    #[error("test cone is empty")]
    EmptyCone,

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("unknown preset `{name}` for `{kind}`")]
    UnknownPreset { kind: &'static str, name: String },

    #[error("field deserialization: {0}")]
    Deserialize(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Parameter { name, value, range }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
