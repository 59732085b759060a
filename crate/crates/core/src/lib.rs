//! Numerical core for anisotropic Stefan-type elliptic problems
//!
//! ```text
//! β(u) − div(a(x, Du) + F(u)) ∋ f   in Ω,      u = 0 on ∂Ω
//! ```
//!
//! where β is a maximal monotone graph (possibly with jumps), `a` is a
//! Leray–Lions flux with per-axis growth exponents and `F` is a locally
//! Lipschitz convection field.
//!
//! The crate is `no_std` (it needs `alloc`). It provides
//!
//! * [`graph`]: exact calculus for piecewise monotone graphs (resolvent,
//!   Yosida approximation, convex primitives);
//! * [`truncation`]: truncation and cutoff functions used by renormalized
//!   formulations;
//! * [`grid`]: tensor-product grids with staggered difference/divergence
//!   operators, quadrature and level-set measures;
//! * [`flux`]: the anisotropic flux family, convection fields and assumption
//!   checks;
//! * [`solver`]: the regularized discrete problem, semismooth Newton with a
//!   Picard fallback, ε-continuation and the two-sided data truncation driver;
//! * [`diagnostics`] and [`embeddings`]: certificates evaluated on computed
//!   solutions.
//!
//! IO, configuration files and the command line live in the `aniso-stefan`
//! crate.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod anchors;
pub mod diagnostics;
pub mod embeddings;
mod error;
pub mod flux;
pub mod graph;
pub mod grid;
mod linalg;
pub mod solver;
pub mod truncation;

pub use error::{Error, IterationFailure, Result};
pub use flux::{AnisotropicExponents, ConvectionModel, FluxModel, PowerFlux};
pub use graph::{Interval, MonotoneGraph};
pub use grid::{EdgeField, Grid, GridFunction};
pub use solver::{DataClass, ProblemSpec, SolveReport, SolverConfig};
