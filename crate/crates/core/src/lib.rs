//! Exact-arithmetic computation with semilinear set systems: quantifier
//! elimination, flat-topology operators, parameterized family transforms,
//! shatter-function counting, and the symbolic reduction that outputs the
//! integer exponent s with π(t) = Θ(t^s).

pub mod families;
pub mod kernel;
pub mod linalg;
pub mod pipeline;
pub mod rat;
pub mod simple;

pub use kernel::{
    Atom, BasicCell, Cube, Dim, Flat, HalfFlat, KernelError, Rel, SemilinearSet, DIM_EMPTY,
};
pub use linalg::LinTerm;
pub use rat::Rat;
