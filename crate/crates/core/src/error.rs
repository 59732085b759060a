use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::grid::GridFunction;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Best iterate and residual history of a solve that did not reach its
/// tolerance.
#[derive(Debug, Clone)]
pub struct IterationFailure {
    pub epsilon: f64,
    pub best: GridFunction,
    pub best_residual: f64,
    pub residual_history: alloc::vec::Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Error {
    /// Argument outside the effective domain of a graph.
    Domain {
        value: f64,
    },
    /// Graph representation is not monotone or not maximal.
    InvalidGraph(String),
    InvalidParameter(String),
    InvalidGrid(String),
    /// Two fields live on different grids.
    GridMismatch,
    /// A field expected to vanish on the boundary does not.
    NotDirichlet,
    /// A ratio was requested for an identically zero field.
    ZeroField,
    /// Flux derivative is not finite at the requested argument.
    DerivativeOverflow {
        xi: f64,
    },
    /// Linear system is numerically singular.
    Singular {
        column: usize,
    },
    /// Nonlinear iteration stopped without meeting its tolerance.
    IterationFailure(Box<IterationFailure>),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { value } => write!(f, "argument {value} lies outside the graph domain"),
            Error::InvalidGraph(msg) => write!(f, "invalid monotone graph: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::GridMismatch => f.write_str("fields are defined on different grids"),
            Error::NotDirichlet => f.write_str("field does not vanish on the boundary"),
            Error::ZeroField => f.write_str("ratio undefined for the zero field"),
            Error::DerivativeOverflow { xi } => {
                write!(f, "flux derivative is not finite at xi = {xi}")
            }
            Error::Singular { column } => write!(f, "singular linear system (pivot column {column})"),
            Error::IterationFailure(fail) => write!(
                f,
                "nonlinear solve at eps = {} did not converge (best residual {:.3e} after {} iterations)",
                fail.epsilon,
                fail.best_residual,
                fail.residual_history.len()
            ),
        }
    }
}

impl core::error::Error for Error {}
