//! Conformal capacity of planar condensers.
//!
//! The crate bundles closed-form capacities and bounds, conformal moduli of
//! polygonal quadrilaterals via Schwarz–Christoffel/hypergeometric formulas,
//! hyperbolic-geometry helpers for the unit disk, and a finite-difference
//! variational capacity solver used as an independent numerical check.

pub mod capforms;
pub mod capsolve;
pub mod cli;
pub mod error;
pub mod geomgen;
pub mod hypgeom;
pub mod literal;
pub mod quadmod;
pub mod quadrature;
pub mod ringbound;
pub mod solve;
pub mod specfun;
pub mod tables;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A point of the complex plane.
pub type ComplexPoint = Complex64;
