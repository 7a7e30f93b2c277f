//! Numerical geometry of surfaces and curves in the complex hyperbolic and
//! complex projective planes.

pub mod ambient;
pub mod autodiff;
pub mod error;
pub mod jacobi;
pub mod numerics;
pub mod submanifold;
pub mod catalog;
pub mod cli;
pub mod suites;
pub mod surface_file;
pub mod verifier;

pub use error::{GeometryError, Result};
