//! Numerical toolkit for distinguished algebraic varieties of the bidisc, the
//! symmetrized bidisc, and the polydisc, computed from finite model triples
//! (a projection plus a unitary) and from matrix-valued rational inner
//! functions given by unitary colligations.
//!
//! The crate converts between the two descriptions, samples the varieties,
//! tests membership, and produces numerical certificates (numerical-radius
//! sweeps, torus symmetry, fiber counts) for distinguishedness.

pub mod bidisc;
pub mod canonical;
pub mod error;
pub mod hermitian;
pub mod inner;
pub mod io;
pub mod joint;
pub mod matrix;
pub mod model;
pub mod numrad;
pub mod poly;
pub mod polydisc;
pub mod random;
pub mod schur;
pub mod svd;
pub mod symm;

pub use error::{Error, Result};
pub use matrix::{C64, Matrix};
