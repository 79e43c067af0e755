//! Exact algebra of semilinear subsets of Q^m.
//!
//! A set is stored as a finite union of basic cells, each a conjunction of
//! affine equalities, strict inequalities and weak inequalities. Emptiness,
//! projection and sampling run on Fourier–Motzkin elimination; dimension is
//! computed by promoting degenerate weak inequalities to equalities until a
//! fixpoint; the flat-topology operators (flat closure, boundary, essential
//! boundary, essential half-flats) are built on top of those primitives.

mod cell;
mod decompose;
mod flats;
pub(crate) mod json;
mod sample;
mod set;
pub mod testgen;

pub use cell::{Atom, BasicCell, Rel};
pub use decompose::{cells_of, decompose_space, decomposed_dim};
pub use flats::{affine_hull, Cube, Flat, HalfFlat};
pub use json::{set_from_json, set_to_json};
pub use set::{Dim, SemilinearSet};

use thiserror::Error;

/// Dimension of the empty set; `Dim` is `Option<usize>` with `None` below
/// every finite value, standing in for -infinity.
pub const DIM_EMPTY: Dim = None;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires a nonempty input")]
    EmptyInput,
    #[error("set is not contained in the given flat")]
    NotASubset,
    #[error("flat closure is not a single flat")]
    ClosureNotAFlat,
    #[error("flat closure differs from the half-flat's ambient flat")]
    ClosureMismatch,
    #[error("inconsistent linear system defines no flat")]
    EmptyFlat,
    #[error("degenerate half-flat: {0}")]
    DegenerateHalfFlat(String),
    #[error("budget exceeded in {0}")]
    BudgetExceeded(String),
    #[error("cannot parse rational: {0}")]
    BadRational(String),
    #[error("invalid set JSON: {0}")]
    BadJson(String),
}
